#include "mfda/mcmc/eval_cache.hpp"

#include <stdexcept>

namespace mfda {

EvalCache::EvalCache(int n_levels) {
    if (n_levels <= 0) throw std::invalid_argument("EvalCache: n_levels must be positive");
    store_.resize(n_levels);
    hits_.assign(n_levels, 0);
    misses_.assign(n_levels, 0);
}

std::string EvalCache::key_of(const Eigen::VectorXd& theta) {
    return std::string(reinterpret_cast<const char*>(theta.data()),
                       static_cast<std::size_t>(theta.size()) * sizeof(double));
}

const Eigen::VectorXd& EvalCache::fetch(int level, const Eigen::VectorXd& theta,
                                        const ForwardFn& compute) {
    auto& table = store_.at(level);
    std::string key = key_of(theta);
    auto it = table.find(key);
    if (it != table.end()) {
        hits_[level]++;
        return it->second;
    }
    misses_[level]++;
    auto [pos, inserted] = table.emplace(std::move(key), compute(theta));
    return pos->second;
}

bool EvalCache::contains(int level, const Eigen::VectorXd& theta) const {
    return store_.at(level).count(key_of(theta)) > 0;
}

long EvalCache::total_hits() const {
    long s = 0;
    for (long h : hits_) s += h;
    return s;
}

long EvalCache::total_misses() const {
    long s = 0;
    for (long m : misses_) s += m;
    return s;
}

std::size_t EvalCache::entries() const {
    std::size_t s = 0;
    for (const auto& t : store_) s += t.size();
    return s;
}

MultiFidelityLikelihood::MultiFidelityLikelihood(std::vector<ForwardFn> forward_levels, int level,
                                                 FusionFn fusion, Eigen::VectorXd y_obs,
                                                 NoiseModel noise,
                                                 std::shared_ptr<EvalCache> cache)
    : forward_levels_(std::move(forward_levels)),
      level_(level),
      fusion_(std::move(fusion)),
      y_obs_(std::move(y_obs)),
      noise_(noise),
      cache_(std::move(cache)) {
    if (level_ < 0 || level_ >= static_cast<int>(forward_levels_.size()))
        throw std::invalid_argument("MultiFidelityLikelihood: level out of range");
    if (!fusion_) throw std::invalid_argument("MultiFidelityLikelihood: null fusion");
    if (!cache_) throw std::invalid_argument("MultiFidelityLikelihood: null cache");
    if (cache_->n_levels() < level_ + 1)
        throw std::invalid_argument("MultiFidelityLikelihood: cache has too few levels");
}

Eigen::VectorXd MultiFidelityLikelihood::predict(const Eigen::VectorXd& theta) const {
    std::vector<Eigen::VectorXd> outputs;
    outputs.reserve(level_ + 1);
    for (int k = 0; k <= level_; ++k)
        outputs.push_back(cache_->fetch(k, theta, forward_levels_[k]));
    return fusion_(theta, outputs);
}

double MultiFidelityLikelihood::operator()(const Eigen::VectorXd& theta) const {
    return log_likelihood(predict(theta), y_obs_, noise_);
}

}  // namespace mfda
