#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "mfda/nn/activation.hpp"
#include "mfda/prob/random.hpp"

namespace mfda {

struct LayerSpec {
    int width = 0;
    Activation activation = Activation::linear;
};

/// One input branch: a stack of dense layers applied to a single input source
/// (parameter vector or one coarse-model output). An empty layer list passes
/// the input straight to the fusion point.
struct BranchSpec {
    int input_dim = 0;
    std::vector<LayerSpec> layers;

    /// Width the branch contributes to the fusion layer.
    int final_width() const { return layers.empty() ? input_dim : layers.back().width; }
};

/// Branch-fusion feedforward network: each branch processes one input source,
/// the branch outputs are concatenated, and a dense output block maps the
/// concatenation to the prediction. The last output layer must be linear.
struct NetworkSpec {
    std::vector<BranchSpec> branches;
    std::vector<LayerSpec> output_block;

    int n_branches() const { return static_cast<int>(branches.size()); }
    int fusion_width() const;
    int output_dim() const;

    /// Throws std::invalid_argument on structural violations: no branches,
    /// non-positive widths or input dims, empty output block, or a non-linear
    /// final layer.
    void validate() const;
};

struct LayerParams {
    Eigen::MatrixXd W;  // width x fan_in
    Eigen::VectorXd b;  // width
};

/// Dense parameters in canonical order: branch 0 layers, branch 1 layers,
/// ..., then the output block.
struct NetworkWeights {
    std::vector<LayerParams> layers;

    long parameter_count() const;
};

/// Glorot-uniform initialization, U(-a, a) with a = sqrt(6 / (fan_in + fan_out)),
/// drawn in canonical layer order so results are reproducible from the seed.
NetworkWeights glorot_init(const NetworkSpec& spec, RandomSource& rng);

/// All-zero parameters with the shapes demanded by spec (also used for
/// gradient and optimizer-moment storage).
NetworkWeights zeros_like(const NetworkSpec& spec);

/// Throws std::invalid_argument if the weight shapes do not match the spec.
void check_shapes(const NetworkSpec& spec, const NetworkWeights& w);

/// Batch forward pass. branch_inputs[j] is (branches[j].input_dim x n) with
/// one sample per column; the result is (output_dim x n).
Eigen::MatrixXd forward_batch(const NetworkSpec& spec, const NetworkWeights& w,
                              const std::vector<Eigen::MatrixXd>& branch_inputs);

/// Single-sample convenience wrapper around forward_batch.
Eigen::VectorXd forward(const NetworkSpec& spec, const NetworkWeights& w,
                        const std::vector<Eigen::VectorXd>& branch_inputs);

/// Mean-over-samples, sum-over-output-dimensions squared error
///   L = (1/n) sum_i ||prediction_i - target_i||^2
/// together with its reverse-mode gradient with respect to every weight and
/// bias. targets is (output_dim x n). The batch must be non-empty.
double mse_and_grad(const NetworkSpec& spec, const NetworkWeights& w,
                    const std::vector<Eigen::MatrixXd>& branch_inputs,
                    const Eigen::MatrixXd& targets, NetworkWeights& grads);

/// Loss only (same convention as mse_and_grad).
double mse_loss(const NetworkSpec& spec, const NetworkWeights& w,
                const std::vector<Eigen::MatrixXd>& branch_inputs,
                const Eigen::MatrixXd& targets);

}  // namespace mfda
