#include "mfda/nn/predictor.hpp"

#include <stdexcept>
#include <string>

namespace mfda {

FusionSurrogate::FusionSurrogate(NetworkSpec spec, NetworkWeights weights,
                                 std::vector<Standardizer> input_normalizers,
                                 Standardizer target_normalizer)
    : spec_(std::move(spec)),
      weights_(std::move(weights)),
      input_normalizers_(std::move(input_normalizers)),
      target_normalizer_(std::move(target_normalizer)) {
    spec_.validate();
    check_shapes(spec_, weights_);
    if (static_cast<int>(input_normalizers_.size()) != spec_.n_branches())
        throw std::invalid_argument("FusionSurrogate: one input normalizer per branch required");
    for (int j = 0; j < spec_.n_branches(); ++j)
        if (input_normalizers_[j].dim() != spec_.branches[j].input_dim)
            throw std::invalid_argument("FusionSurrogate: normalizer " + std::to_string(j) +
                                        " dimension mismatch");
    if (target_normalizer_.dim() != spec_.output_dim())
        throw std::invalid_argument("FusionSurrogate: target normalizer dimension mismatch");
}

Eigen::VectorXd FusionSurrogate::predict(
    const std::vector<Eigen::VectorXd>& branch_inputs) const {
    if (static_cast<int>(branch_inputs.size()) != spec_.n_branches())
        throw std::invalid_argument("FusionSurrogate::predict: wrong branch count");
    std::vector<Eigen::VectorXd> standardized;
    standardized.reserve(branch_inputs.size());
    for (size_t j = 0; j < branch_inputs.size(); ++j)
        standardized.push_back(input_normalizers_[j].transform(branch_inputs[j]));
    return target_normalizer_.inverse(forward(spec_, weights_, standardized));
}

Eigen::MatrixXd FusionSurrogate::predict_batch(
    const std::vector<Eigen::MatrixXd>& branch_inputs) const {
    if (static_cast<int>(branch_inputs.size()) != spec_.n_branches())
        throw std::invalid_argument("FusionSurrogate::predict_batch: wrong branch count");
    std::vector<Eigen::MatrixXd> standardized;
    standardized.reserve(branch_inputs.size());
    for (size_t j = 0; j < branch_inputs.size(); ++j)
        standardized.push_back(input_normalizers_[j].transform(branch_inputs[j]));
    return target_normalizer_.inverse(forward_batch(spec_, weights_, standardized));
}

Eigen::VectorXd FusionSurrogate::predict_mf(
    const Eigen::VectorXd& theta, const std::vector<Eigen::VectorXd>& lf_outputs) const {
    if (static_cast<int>(lf_outputs.size()) + 1 != spec_.n_branches())
        throw std::invalid_argument(
            "FusionSurrogate::predict_mf: expected " + std::to_string(spec_.n_branches() - 1) +
            " coarse-model outputs, got " + std::to_string(lf_outputs.size()));
    std::vector<Eigen::VectorXd> branch_inputs;
    branch_inputs.reserve(lf_outputs.size() + 1);
    branch_inputs.push_back(theta);
    for (const auto& out : lf_outputs) branch_inputs.push_back(out);
    return predict(branch_inputs);
}

FusionTrainResult train_fusion_surrogate(const NetworkSpec& spec, const TrainingDataset& raw,
                                         const TrainConfig& config) {
    raw.validate_against(spec);
    std::vector<Standardizer> input_normalizers;
    input_normalizers.reserve(raw.branch_inputs.size());
    TrainingDataset standardized;
    standardized.branch_inputs.reserve(raw.branch_inputs.size());
    for (const auto& X : raw.branch_inputs) {
        Standardizer norm = Standardizer::fit(X);
        standardized.branch_inputs.push_back(norm.transform(X));
        input_normalizers.push_back(std::move(norm));
    }
    Standardizer target_normalizer = Standardizer::fit(raw.targets);
    standardized.targets = target_normalizer.transform(raw.targets);

    TrainResult trained = train(spec, standardized, config);
    return FusionTrainResult{
        FusionSurrogate(spec, std::move(trained.weights), std::move(input_normalizers),
                        std::move(target_normalizer)),
        std::move(trained.history)};
}

}  // namespace mfda
