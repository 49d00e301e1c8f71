#include "mfda/mcmc/multilevel.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mfda/mcmc/mh.hpp"

namespace mfda {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

double mlda_level_accept(double log_like_fine_cand, double log_like_fine_cur,
                         double log_like_coarse_cur, double log_like_coarse_cand) {
    double log_alpha =
        (log_like_fine_cand - log_like_fine_cur) + (log_like_coarse_cur - log_like_coarse_cand);
    if (log_alpha >= 0.0) return 1.0;
    return std::exp(log_alpha);
}

DelayedAcceptanceSampler::DelayedAcceptanceSampler(FidelityStack stack, Eigen::VectorXd theta0,
                                                   RandomSource& rng)
    : stack_(std::move(stack)), rng_(rng) {
    const int n_levels = static_cast<int>(stack_.levels.size());
    if (n_levels < 2)
        throw std::invalid_argument("DelayedAcceptanceSampler: need at least 2 levels");
    for (const auto& lvl : stack_.levels)
        if (!lvl.log_likelihood)
            throw std::invalid_argument("DelayedAcceptanceSampler: null level likelihood");
    for (int l = 0; l + 1 < n_levels; ++l)
        if (stack_.levels[l].subchain_length < 1)
            throw std::invalid_argument("DelayedAcceptanceSampler: sub-chain lengths must be >= 1");
    top_ = n_levels - 1;

    double lp = stack_.prior.log_density(theta0);
    if (std::isinf(lp))
        throw std::invalid_argument("DelayedAcceptanceSampler: initial state outside prior support");
    current_ = LevelState{std::move(theta0), 0.0, lp};
    current_.log_like = eval_like(top_, current_.theta);

    chain_.proposals_per_level.assign(n_levels, 0);
    chain_.accepts_per_level.assign(n_levels, 0);
}

double DelayedAcceptanceSampler::eval_like(int level, const Eigen::VectorXd& theta) const {
    return stack_.levels[level].log_likelihood(theta);
}

// One Metropolis step on the coarsest posterior (likelihood * prior).
DelayedAcceptanceSampler::LevelState DelayedAcceptanceSampler::metropolis_step(
    const LevelState& cur) {
    Eigen::VectorXd cand = stack_.proposal.propose(cur.theta, rng_);
    chain_.proposals_per_level[0]++;

    double cand_prior = stack_.prior.log_density(cand);
    double cand_like = kNegInf;
    double alpha;
    if (std::isinf(cand_prior)) {
        alpha = 0.0;  // out of support; the model is not evaluated
    } else {
        cand_like = eval_like(0, cand);
        alpha = mh_accept_prob(cur.log_like + cur.log_prior, cand_like + cand_prior);
    }
    double u = rng_.uniform01();
    if (u < alpha) {
        chain_.accepts_per_level[0]++;
        return LevelState{std::move(cand), cand_like, cand_prior};
    }
    return cur;
}

DelayedAcceptanceSampler::LevelState DelayedAcceptanceSampler::subchain(int level,
                                                                        LevelState start,
                                                                        int length) {
    LevelState state = std::move(start);
    for (int i = 0; i < length; ++i)
        state = (level == 0) ? metropolis_step(state) : da_step(level, state);
    return state;
}

// One delayed-acceptance transition at level >= 1. The candidate is the end
// state of a fresh sub-chain one level below, started from the current state.
DelayedAcceptanceSampler::LevelState DelayedAcceptanceSampler::da_step(int level,
                                                                       const LevelState& cur) {
    const int below = level - 1;
    double cur_like_below = eval_like(below, cur.theta);
    LevelState below_start{cur.theta, cur_like_below, cur.log_prior};
    LevelState cand = subchain(below, std::move(below_start),
                               stack_.levels[below].subchain_length);

    double cand_like = eval_like(level, cand.theta);
    double alpha = mlda_level_accept(cand_like, cur.log_like, cur_like_below, cand.log_like);

    chain_.proposals_per_level[level]++;
    double u = rng_.uniform01();
    bool accept = u < alpha;
    if (accept) chain_.accepts_per_level[level]++;

    if (level == top_) {
        chain_.top_accept_probs.push_back(alpha);
        chain_.accepted.push_back(accept ? 1 : 0);
    }
    if (accept) return LevelState{std::move(cand.theta), cand_like, cand.log_prior};
    return cur;
}

void DelayedAcceptanceSampler::advance(int n_fine_steps) {
    auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < n_fine_steps; ++i) {
        current_ = da_step(top_, current_);
        chain_.samples.push_back(current_.theta);
        chain_.log_likelihoods.push_back(current_.log_like);
    }
    chain_.wall_time_seconds +=
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Chain run_mlda(const FidelityStack& stack, const Eigen::VectorXd& theta0, int n_fine,
               RandomSource& rng) {
    if (n_fine < 0) throw std::invalid_argument("run_mlda: n_fine must be nonnegative");
    if (stack.levels.empty()) throw std::invalid_argument("run_mlda: empty level ladder");
    if (stack.levels.size() == 1)
        return run_mh(stack.levels[0].log_likelihood, stack.prior, stack.proposal, theta0, n_fine,
                      rng);
    DelayedAcceptanceSampler sampler(stack, theta0, rng);
    sampler.advance(n_fine);
    return sampler.chain();
}

Chain run_mfda(const FidelityStack& stack, const std::shared_ptr<EvalCache>& cache,
               const Eigen::VectorXd& theta0, int n_fine, RandomSource& rng) {
    if (!cache) throw std::invalid_argument("run_mfda: null cache");
    return run_mlda(stack, theta0, n_fine, rng);
}

}  // namespace mfda
