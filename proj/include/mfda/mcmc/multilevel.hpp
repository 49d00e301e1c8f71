#pragma once

#include <memory>

#include <Eigen/Core>

#include "mfda/mcmc/chain.hpp"
#include "mfda/mcmc/eval_cache.hpp"

namespace mfda {

/// Log acceptance probability of a delayed-acceptance transition between two
/// adjacent levels. The candidate is the end state of the sub-chain run one
/// level below, so it is already distributed under the coarse posterior and
/// the prior cancels; only the two likelihoods enter:
///   alpha = min{1, [L_fine(cand) * L_coarse(cur)] / [L_fine(cur) * L_coarse(cand)]}
/// Returns exactly 1 when the ratio is balanced (identical levels).
double mlda_level_accept(double log_like_fine_cand, double log_like_fine_cur,
                         double log_like_coarse_cur, double log_like_coarse_cand);

/// Delayed-acceptance sampler over a ladder of two or more likelihood levels.
///
/// One finest-level transition works top down: the proposal for level l is
/// the end state of a sub-chain of the configured length at level l-1, whose
/// own proposals come recursively from level l-2, down to a plain Metropolis
/// sub-chain on the coarsest posterior. Each sub-chain restarts from the
/// current state of the level above it, and a level's acceptance uses only
/// the two adjacent likelihoods (see mlda_level_accept).
///
/// Resumable like MhSampler; finest-level likelihood evaluations number
/// exactly one per transition plus one for the initial state.
class DelayedAcceptanceSampler {
public:
    DelayedAcceptanceSampler(FidelityStack stack, Eigen::VectorXd theta0, RandomSource& rng);

    void advance(int n_fine_steps);

    const Chain& chain() const { return chain_; }
    Chain& chain() { return chain_; }

    const Eigen::VectorXd& current() const { return current_.theta; }

private:
    struct LevelState {
        Eigen::VectorXd theta;
        double log_like;   // at the level the state currently lives on
        double log_prior;  // shared by all levels
    };

    LevelState metropolis_step(const LevelState& cur);
    LevelState subchain(int level, LevelState start, int length);
    LevelState da_step(int level, const LevelState& cur);
    double eval_like(int level, const Eigen::VectorXd& theta) const;

    FidelityStack stack_;
    RandomSource& rng_;
    int top_;
    LevelState current_;
    Chain chain_;
};

/// Runs a delayed-acceptance chain of n_fine finest-level samples. A
/// single-level ladder degenerates to plain Metropolis.
Chain run_mlda(const FidelityStack& stack, const Eigen::VectorXd& theta0, int n_fine,
               RandomSource& rng);

/// Multifidelity variant: identical control flow, but every level of the
/// stack is expected to be a surrogate likelihood backed by the given cache,
/// so no high-fidelity solver is touched while sampling. The cache argument
/// ties the run to its memo table; callers inspect it afterwards for
/// hit/miss accounting.
Chain run_mfda(const FidelityStack& stack, const std::shared_ptr<EvalCache>& cache,
               const Eigen::VectorXd& theta0, int n_fine, RandomSource& rng);

}  // namespace mfda
