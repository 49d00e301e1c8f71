#pragma once

#include "mfda/rd/solver.hpp"

namespace mfda {

/// Resamples a periodic nodal field onto an n_out x n_out uniform grid of the
/// same domain by bilinear interpolation with periodic wrap-around.
Eigen::MatrixXd bilinear_periodic_resample(const Eigen::MatrixXd& field, int n_out);

/// Lifts a coarse trajectory to a finer space-time resolution: each frame is
/// resampled bilinearly in space, then every node's history is interpolated
/// in time with a natural cubic spline through the initial state and the
/// stored frames. The result has n_outputs_out frames at the output cadence
/// k * t_end / n_outputs_out. Requesting the input resolution reproduces the
/// input (up to rounding).
RdSolution interpolate_to_hf(const RdSolution& coarse, int n_out, int n_outputs_out);

}  // namespace mfda
