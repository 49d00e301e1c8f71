#include "mfda/nn/training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace mfda {

AdamState AdamState::create(const NetworkSpec& spec) {
    AdamState s;
    s.m = zeros_like(spec);
    s.v = zeros_like(spec);
    s.t = 0;
    return s;
}

void adam_step(AdamState& state, NetworkWeights& w, const NetworkWeights& grads,
               const AdamConfig& config) {
    if (state.m.layers.size() != w.layers.size() || grads.layers.size() != w.layers.size())
        throw std::invalid_argument("adam_step: shape mismatch between state, weights, grads");
    state.t += 1;
    const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.t));
    for (size_t i = 0; i < w.layers.size(); ++i) {
        auto update = [&](auto& m, auto& v, auto& param, const auto& g) {
            m = config.beta1 * m + (1.0 - config.beta1) * g;
            v = config.beta2 * v + (1.0 - config.beta2) * g.cwiseProduct(g);
            param.array() -= config.learning_rate * (m.array() / bc1) /
                             ((v.array() / bc2).sqrt() + config.epsilon);
        };
        update(state.m.layers[i].W, state.v.layers[i].W, w.layers[i].W, grads.layers[i].W);
        update(state.m.layers[i].b, state.v.layers[i].b, w.layers[i].b, grads.layers[i].b);
    }
}

void TrainingDataset::validate_against(const NetworkSpec& spec) const {
    spec.validate();
    if (static_cast<int>(branch_inputs.size()) != spec.n_branches())
        throw std::invalid_argument("TrainingDataset: branch count mismatch");
    const Eigen::Index n = targets.cols();
    if (n < 1) throw std::invalid_argument("TrainingDataset: no records");
    if (targets.rows() != spec.output_dim())
        throw std::invalid_argument("TrainingDataset: target dimension mismatch");
    for (int j = 0; j < spec.n_branches(); ++j) {
        if (branch_inputs[j].rows() != spec.branches[j].input_dim)
            throw std::invalid_argument("TrainingDataset: branch " + std::to_string(j) +
                                        " input dimension mismatch");
        if (branch_inputs[j].cols() != n)
            throw std::invalid_argument("TrainingDataset: branch " + std::to_string(j) +
                                        " record count mismatch");
    }
}

TrainingDataset TrainingDataset::select(const std::vector<int>& record_indices) const {
    TrainingDataset out;
    const int k = static_cast<int>(record_indices.size());
    out.branch_inputs.reserve(branch_inputs.size());
    for (const auto& X : branch_inputs) {
        Eigen::MatrixXd sel(X.rows(), k);
        for (int i = 0; i < k; ++i) sel.col(i) = X.col(record_indices[i]);
        out.branch_inputs.push_back(std::move(sel));
    }
    out.targets.resize(targets.rows(), k);
    for (int i = 0; i < k; ++i) out.targets.col(i) = targets.col(record_indices[i]);
    return out;
}

namespace {

/// Fisher-Yates shuffle driven by our own generator so batch schedules are
/// identical across platforms.
void shuffle_indices(std::vector<int>& idx, RandomSource& rng) {
    for (int i = static_cast<int>(idx.size()) - 1; i > 0; --i)
        std::swap(idx[i], idx[rng.uniform_int(i + 1)]);
}

std::vector<Eigen::MatrixXd> gather_columns(const std::vector<Eigen::MatrixXd>& mats,
                                            const std::vector<int>& idx, int begin, int count) {
    std::vector<Eigen::MatrixXd> out;
    out.reserve(mats.size());
    for (const auto& X : mats) {
        Eigen::MatrixXd sel(X.rows(), count);
        for (int i = 0; i < count; ++i) sel.col(i) = X.col(idx[begin + i]);
        out.push_back(std::move(sel));
    }
    return out;
}

Eigen::MatrixXd gather_target_columns(const Eigen::MatrixXd& Y, const std::vector<int>& idx,
                                      int begin, int count) {
    Eigen::MatrixXd sel(Y.rows(), count);
    for (int i = 0; i < count; ++i) sel.col(i) = Y.col(idx[begin + i]);
    return sel;
}

}  // namespace

TrainResult train(const NetworkSpec& spec, const TrainingDataset& dataset,
                  const TrainConfig& config) {
    dataset.validate_against(spec);
    if (config.epochs < 0) throw std::invalid_argument("train: epochs must be >= 0");
    if (config.batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
    if (config.validation_fraction < 0.0 || config.validation_fraction >= 1.0)
        throw std::invalid_argument("train: validation_fraction must be in [0, 1)");

    Mt19937Source rng(config.seed);
    TrainResult result;
    result.weights = glorot_init(spec, rng);
    if (config.epochs == 0) return result;

    const int n = dataset.n_records();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    shuffle_indices(order, rng);

    const int n_val = static_cast<int>(std::floor(config.validation_fraction * n));
    const int n_train = n - n_val;
    if (n_train < 1) throw std::invalid_argument("train: empty training split");
    std::vector<int> train_idx(order.begin(), order.begin() + n_train);
    std::vector<int> val_idx(order.begin() + n_train, order.end());

    auto val_inputs = gather_columns(dataset.branch_inputs, val_idx, 0, n_val);
    auto val_targets = gather_target_columns(dataset.targets, val_idx, 0, n_val);
    auto train_inputs_full = gather_columns(dataset.branch_inputs, train_idx, 0, n_train);
    auto train_targets_full = gather_target_columns(dataset.targets, train_idx, 0, n_train);

    AdamState adam = AdamState::create(spec);
    AdamConfig adam_config;
    adam_config.learning_rate = config.learning_rate;
    NetworkWeights grads;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        shuffle_indices(train_idx, rng);
        for (int begin = 0; begin < n_train; begin += config.batch_size) {
            const int count = std::min(config.batch_size, n_train - begin);
            auto batch_in = gather_columns(dataset.branch_inputs, train_idx, begin, count);
            auto batch_y = gather_target_columns(dataset.targets, train_idx, begin, count);
            double loss = mse_and_grad(spec, result.weights, batch_in, batch_y, grads);
            if (!std::isfinite(loss))
                throw std::runtime_error("train: loss became non-finite at epoch " +
                                         std::to_string(epoch) + " (diverged)");
            adam_step(adam, result.weights, grads, adam_config);
        }
        EpochStats stats;
        stats.train_loss = mse_loss(spec, result.weights, train_inputs_full, train_targets_full);
        stats.validation_loss =
            n_val > 0 ? mse_loss(spec, result.weights, val_inputs, val_targets)
                      : std::numeric_limits<double>::quiet_NaN();
        if (!std::isfinite(stats.train_loss))
            throw std::runtime_error("train: loss became non-finite at epoch " +
                                     std::to_string(epoch) + " (diverged)");
        result.history.push_back(stats);
    }
    return result;
}

}  // namespace mfda
