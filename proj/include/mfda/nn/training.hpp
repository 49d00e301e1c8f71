#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "mfda/nn/network.hpp"

namespace mfda {

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Moment estimates for Adam, shaped like the network weights.
struct AdamState {
    NetworkWeights m;  // first moments
    NetworkWeights v;  // second moments
    long t = 0;

    static AdamState create(const NetworkSpec& spec);
};

/// One bias-corrected Adam update in place. At t = 1 this reduces to
/// w -= lr * g / (|g| + eps) elementwise.
void adam_step(AdamState& state, NetworkWeights& w, const NetworkWeights& grads,
               const AdamConfig& config);

/// Regression data for one branch-fusion network: one matrix per branch with
/// samples as columns, plus the target matrix on the same column order.
struct TrainingDataset {
    std::vector<Eigen::MatrixXd> branch_inputs;
    Eigen::MatrixXd targets;

    int n_records() const { return static_cast<int>(targets.cols()); }

    /// Throws std::invalid_argument if record counts or dimensions are
    /// inconsistent with the spec.
    void validate_against(const NetworkSpec& spec) const;

    /// Copies the given record columns into a new dataset.
    TrainingDataset select(const std::vector<int>& record_indices) const;
};

struct TrainConfig {
    int epochs = 100;
    int batch_size = 64;
    double learning_rate = 1e-3;
    std::uint64_t seed = 0;
    double validation_fraction = 0.1;
};

struct EpochStats {
    double train_loss = 0.0;       // full-pass loss on the training split
    double validation_loss = 0.0;  // NaN when the validation split is empty
};

struct TrainResult {
    NetworkWeights weights;
    std::vector<EpochStats> history;  // one entry per completed epoch
};

/// Mini-batch Adam on the MSE loss. The record order is shuffled once with the
/// seeded generator, the tail validation_fraction of records is held out, and
/// each epoch reshuffles the training split before slicing batches. Weights
/// start from a Glorot initialization drawn from the same generator, so the
/// whole run is deterministic given the seed; epochs = 0 returns that
/// initialization untouched. Throws std::runtime_error if the loss becomes
/// non-finite.
TrainResult train(const NetworkSpec& spec, const TrainingDataset& dataset,
                  const TrainConfig& config);

}  // namespace mfda
