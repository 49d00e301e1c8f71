#pragma once

#include <Eigen/Core>
#include <vector>

#include "mfda/nn/network.hpp"
#include "mfda/nn/standardizer.hpp"
#include "mfda/nn/training.hpp"

namespace mfda {

/// A trained branch-fusion network bundled with the per-branch input
/// normalizers and the target normalizer it was trained with. Prediction is
/// pure and safe to call concurrently on shared instances.
class FusionSurrogate {
public:
    FusionSurrogate(NetworkSpec spec, NetworkWeights weights,
                    std::vector<Standardizer> input_normalizers, Standardizer target_normalizer);

    const NetworkSpec& spec() const { return spec_; }
    const NetworkWeights& weights() const { return weights_; }
    const std::vector<Standardizer>& input_normalizers() const { return input_normalizers_; }
    const Standardizer& target_normalizer() const { return target_normalizer_; }

    /// Standardizes each branch input, runs the network, and maps the result
    /// back to target units.
    Eigen::VectorXd predict(const std::vector<Eigen::VectorXd>& branch_inputs) const;

    /// Column-batched version of predict (one sample per column).
    Eigen::MatrixXd predict_batch(const std::vector<Eigen::MatrixXd>& branch_inputs) const;

    /// Multi-fidelity convention: branch 0 is the parameter vector, the
    /// remaining branches are coarse-model outputs ordered coarsest first.
    Eigen::VectorXd predict_mf(const Eigen::VectorXd& theta,
                               const std::vector<Eigen::VectorXd>& lf_outputs) const;

private:
    NetworkSpec spec_;
    NetworkWeights weights_;
    std::vector<Standardizer> input_normalizers_;
    Standardizer target_normalizer_;
};

struct FusionTrainResult {
    FusionSurrogate surrogate;
    std::vector<EpochStats> history;  // losses in standardized target units
};

/// Fits per-feature standardizers for every branch input and for the targets
/// over the full dataset, then trains on the standardized data.
FusionTrainResult train_fusion_surrogate(const NetworkSpec& spec, const TrainingDataset& raw,
                                         const TrainConfig& config);

}  // namespace mfda
