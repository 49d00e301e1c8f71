#pragma once

#include <Eigen/Core>

#include "mfda/mcmc/chain.hpp"

namespace mfda {

/// Random-walk Metropolis sampler targeting likelihood * prior. Resumable:
/// advance() can be called repeatedly and appends to the same chain, which is
/// how convergence-gated drivers run it in slices.
///
/// Randomness consumption per step is fixed: dim proposal normals followed by
/// one acceptance uniform, drawn also when the candidate is rejected out of
/// hand, so a scripted source can replay the decision sequence.
class MhSampler {
public:
    MhSampler(LogLikelihoodFn log_like, Prior prior, Proposal proposal, Eigen::VectorXd theta0,
              RandomSource& rng);

    void advance(int n_steps);

    const Chain& chain() const { return chain_; }
    Chain& chain() { return chain_; }

    const Eigen::VectorXd& current() const { return theta_; }
    double current_log_likelihood() const { return log_like_value_; }

private:
    LogLikelihoodFn log_like_;
    Prior prior_;
    Proposal proposal_;
    RandomSource& rng_;

    Eigen::VectorXd theta_;
    double log_like_value_;
    double log_prior_value_;
    Chain chain_;
};

/// Runs a fresh Metropolis chain of length n from theta0.
Chain run_mh(const LogLikelihoodFn& log_like, const Prior& prior, const Proposal& proposal,
             const Eigen::VectorXd& theta0, int n, RandomSource& rng);

}  // namespace mfda
