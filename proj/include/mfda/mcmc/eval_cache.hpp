#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "mfda/prob/likelihood.hpp"

namespace mfda {

using ForwardFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Memo table of per-level forward-model outputs keyed by the exact byte
/// pattern of the parameter vector. Within one chain every level's solver
/// therefore runs at most once per distinct parameter vector, and a hit
/// returns the stored output bit for bit.
///
/// Not thread safe; each chain owns its own cache.
class EvalCache {
public:
    explicit EvalCache(int n_levels);

    int n_levels() const { return static_cast<int>(store_.size()); }

    /// Returns the cached output for (level, theta), computing and storing it
    /// on a miss.
    const Eigen::VectorXd& fetch(int level, const Eigen::VectorXd& theta,
                                 const ForwardFn& compute);

    bool contains(int level, const Eigen::VectorXd& theta) const;

    long hits(int level) const { return hits_.at(level); }
    long misses(int level) const { return misses_.at(level); }
    long total_hits() const;
    long total_misses() const;
    std::size_t entries() const;

private:
    static std::string key_of(const Eigen::VectorXd& theta);

    std::vector<std::unordered_map<std::string, Eigen::VectorXd>> store_;
    std::vector<long> hits_;
    std::vector<long> misses_;
};

/// Wraps a forward model and counts invocations. Copyable; copies share the
/// counter. Used to audit solver-call schedules and to verify that a run
/// never touches a given model.
class CountingForward {
public:
    explicit CountingForward(ForwardFn fn)
        : fn_(std::move(fn)), count_(std::make_shared<std::atomic<long>>(0)) {}

    Eigen::VectorXd operator()(const Eigen::VectorXd& theta) const {
        count_->fetch_add(1, std::memory_order_relaxed);
        return fn_(theta);
    }

    long count() const { return count_->load(std::memory_order_relaxed); }
    void reset() { count_->store(0, std::memory_order_relaxed); }

private:
    ForwardFn fn_;
    std::shared_ptr<std::atomic<long>> count_;
};

/// Predicted observations from the parameter vector and the outputs of all
/// ladder levels up to and including the likelihood's own level.
using FusionFn =
    std::function<Eigen::VectorXd(const Eigen::VectorXd&, const std::vector<Eigen::VectorXd>&)>;

/// Level-l surrogate log likelihood: pulls the outputs of forward levels
/// 0..level through a shared EvalCache, fuses them into a predicted
/// observation vector and scores it against y_obs under Gaussian noise.
class MultiFidelityLikelihood {
public:
    MultiFidelityLikelihood(std::vector<ForwardFn> forward_levels, int level, FusionFn fusion,
                            Eigen::VectorXd y_obs, NoiseModel noise,
                            std::shared_ptr<EvalCache> cache);

    double operator()(const Eigen::VectorXd& theta) const;

    /// The fused prediction itself (useful for initialization and reports).
    Eigen::VectorXd predict(const Eigen::VectorXd& theta) const;

private:
    std::vector<ForwardFn> forward_levels_;
    int level_;
    FusionFn fusion_;
    Eigen::VectorXd y_obs_;
    NoiseModel noise_;
    std::shared_ptr<EvalCache> cache_;
};

}  // namespace mfda
