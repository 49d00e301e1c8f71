#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mfda/prob/prior.hpp"
#include "mfda/prob/proposal.hpp"

namespace mfda {

using LogLikelihoodFn = std::function<double(const Eigen::VectorXd&)>;

/// One level of the fidelity ladder: a log-likelihood handle plus the length
/// of the sub-chain run at this level to generate one proposal for the level
/// above. subchain_length is ignored on the topmost level.
struct LevelSpec {
    LogLikelihoodFn log_likelihood;
    int subchain_length = 1;
    std::string label;
};

/// Ordered ladder of likelihood levels, coarsest first and finest last,
/// sharing one prior and one random-walk proposal (used by the coarsest
/// level's Metropolis sub-chain).
struct FidelityStack {
    std::vector<LevelSpec> levels;
    Prior prior;
    Proposal proposal;
};

/// Record of one sampling run. Samples are finest-level states, one entry per
/// finest-level transition; the initial state is not included.
struct Chain {
    std::vector<Eigen::VectorXd> samples;
    std::vector<double> log_likelihoods;   // finest-level log likelihood per sample
    std::vector<char> accepted;            // finest-level accept flag per sample
    std::vector<double> top_accept_probs;  // finest-level acceptance probability per sample

    // One entry per level, coarsest first. For a single-level run these have
    // length 1.
    std::vector<long> proposals_per_level;
    std::vector<long> accepts_per_level;

    double wall_time_seconds = 0.0;
    std::uint64_t seed = 0;

    int length() const { return static_cast<int>(samples.size()); }
    int dim() const { return samples.empty() ? 0 : static_cast<int>(samples[0].size()); }

    double acceptance_rate(int level) const {
        if (level < 0 || level >= static_cast<int>(proposals_per_level.size()) ||
            proposals_per_level[level] == 0)
            return 0.0;
        return static_cast<double>(accepts_per_level[level]) /
               static_cast<double>(proposals_per_level[level]);
    }

    std::vector<double> acceptance_rates() const {
        std::vector<double> r(proposals_per_level.size());
        for (std::size_t l = 0; l < r.size(); ++l) r[l] = acceptance_rate(static_cast<int>(l));
        return r;
    }

    /// One coordinate of the sample series.
    std::vector<double> component(int i) const {
        std::vector<double> out(samples.size());
        for (std::size_t k = 0; k < samples.size(); ++k) out[k] = samples[k][i];
        return out;
    }
};

}  // namespace mfda
