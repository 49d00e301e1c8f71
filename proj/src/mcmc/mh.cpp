#include "mfda/mcmc/mh.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mfda {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

MhSampler::MhSampler(LogLikelihoodFn log_like, Prior prior, Proposal proposal,
                     Eigen::VectorXd theta0, RandomSource& rng)
    : log_like_(std::move(log_like)),
      prior_(std::move(prior)),
      proposal_(std::move(proposal)),
      rng_(rng),
      theta_(std::move(theta0)) {
    if (!log_like_) throw std::invalid_argument("MhSampler: null likelihood");
    log_prior_value_ = prior_.log_density(theta_);
    if (std::isinf(log_prior_value_))
        throw std::invalid_argument("MhSampler: initial state outside prior support");
    log_like_value_ = log_like_(theta_);
    chain_.proposals_per_level.assign(1, 0);
    chain_.accepts_per_level.assign(1, 0);
}

void MhSampler::advance(int n_steps) {
    auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < n_steps; ++i) {
        Eigen::VectorXd cand = proposal_.propose(theta_, rng_);
        chain_.proposals_per_level[0]++;

        double cand_prior = prior_.log_density(cand);
        double cand_like = kNegInf;
        double alpha;
        if (std::isinf(cand_prior)) {
            alpha = 0.0;  // out of support; the model is not evaluated
        } else {
            cand_like = log_like_(cand);
            alpha = mh_accept_prob(log_like_value_ + log_prior_value_, cand_like + cand_prior);
        }
        double u = rng_.uniform01();
        bool accept = u < alpha;
        if (accept) {
            theta_ = std::move(cand);
            log_like_value_ = cand_like;
            log_prior_value_ = cand_prior;
            chain_.accepts_per_level[0]++;
        }
        chain_.samples.push_back(theta_);
        chain_.log_likelihoods.push_back(log_like_value_);
        chain_.accepted.push_back(accept ? 1 : 0);
        chain_.top_accept_probs.push_back(alpha);
    }
    chain_.wall_time_seconds +=
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Chain run_mh(const LogLikelihoodFn& log_like, const Prior& prior, const Proposal& proposal,
             const Eigen::VectorXd& theta0, int n, RandomSource& rng) {
    if (n < 0) throw std::invalid_argument("run_mh: n must be nonnegative");
    MhSampler sampler(log_like, prior, proposal, theta0, rng);
    sampler.advance(n);
    return sampler.chain();
}

}  // namespace mfda
