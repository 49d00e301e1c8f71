#pragma once

#include "mfda/nn/network.hpp"

namespace mfda {

/// Fusion network for the groundwater-flow benchmark at a given hierarchy
/// level: one parameter branch (n_params -> four 128-wide GeLU layers and a
/// 128-wide linear embedding) plus n_lf_branches coarse-output branches
/// (n_outputs -> one 128-wide linear layer), concatenated and mapped through
/// two 128-wide GeLU layers to a linear n_outputs layer. Level l uses
/// n_lf_branches = l.
NetworkSpec darcy_fusion_spec(int n_lf_branches, int n_params = 64, int n_outputs = 25);

/// Fusion network for the reaction-diffusion benchmark, applied per time step
/// with weights shared across steps: one parameter branch (n_params -> three
/// 64-wide GeLU layers and a 64-wide linear embedding) plus n_lf_branches
/// reduced-coefficient branches (n_modes -> one 64-wide linear layer), then an
/// output block of 64-wide GeLU, tanh, tanh, GeLU layers and a linear n_modes
/// layer.
NetworkSpec rd_fusion_spec(int n_lf_branches, int n_params = 2, int n_modes = 25);

}  // namespace mfda
