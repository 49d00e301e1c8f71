#include "mfda/nn/architectures.hpp"

#include <stdexcept>

namespace mfda {

NetworkSpec darcy_fusion_spec(int n_lf_branches, int n_params, int n_outputs) {
    if (n_lf_branches < 1)
        throw std::invalid_argument("darcy_fusion_spec: need at least one coarse branch");
    NetworkSpec spec;
    BranchSpec params;
    params.input_dim = n_params;
    for (int i = 0; i < 4; ++i) params.layers.push_back({128, Activation::gelu});
    params.layers.push_back({128, Activation::linear});
    spec.branches.push_back(std::move(params));
    for (int l = 0; l < n_lf_branches; ++l) {
        BranchSpec lf;
        lf.input_dim = n_outputs;
        lf.layers.push_back({128, Activation::linear});
        spec.branches.push_back(std::move(lf));
    }
    spec.output_block = {{128, Activation::gelu}, {128, Activation::gelu},
                         {n_outputs, Activation::linear}};
    spec.validate();
    return spec;
}

NetworkSpec rd_fusion_spec(int n_lf_branches, int n_params, int n_modes) {
    if (n_lf_branches < 1)
        throw std::invalid_argument("rd_fusion_spec: need at least one coarse branch");
    NetworkSpec spec;
    BranchSpec params;
    params.input_dim = n_params;
    for (int i = 0; i < 3; ++i) params.layers.push_back({64, Activation::gelu});
    params.layers.push_back({64, Activation::linear});
    spec.branches.push_back(std::move(params));
    for (int l = 0; l < n_lf_branches; ++l) {
        BranchSpec lf;
        lf.input_dim = n_modes;
        lf.layers.push_back({64, Activation::linear});
        spec.branches.push_back(std::move(lf));
    }
    spec.output_block = {{64, Activation::gelu},
                         {64, Activation::tanh},
                         {64, Activation::tanh},
                         {64, Activation::gelu},
                         {n_modes, Activation::linear}};
    spec.validate();
    return spec;
}

}  // namespace mfda
