#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mfda/diag/diagnostics.hpp"
#include "mfda/harness/offline.hpp"
#include "mfda/mcmc/chain.hpp"
#include "mfda/mcmc/least_squares_init.hpp"

namespace mfda::harness {

/// A synthetic observation record: the data vector, the parameter it was
/// generated from, and the noise level and seed that produced it.
struct Observations {
    Eigen::VectorXd y;
    Eigen::VectorXd theta_true;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
};

std::string observations_dir(const ExperimentConfig& config);

/// Evaluates the reference model at the configured truth (or at a fresh
/// prior draw when none is pinned), adds independent Gaussian noise of the
/// configured standard deviation, and persists data, truth and seed under
/// observations_dir(config). A zero noise level stores the exact model
/// output.
Observations synthesize_observations(const ExperimentConfig& config);

Observations load_observations(const std::string& dir);

/// Outcome of one posterior sampling run: the chains, their diagnostics,
/// and the full solver-call accounting needed to audit the scheme.
struct InferenceRun {
    Scheme scheme = Scheme::mh;
    std::vector<Chain> chains;
    DiagnosticsReport diagnostics;  ///< computed on the post burn-in samples
    bool converged = false;
    double max_rhat = 0.0;       ///< last computed value (0 when never computed)
    long samples_per_chain = 0;  ///< including burn-in

    long hf_calls = 0;           ///< reference-solver calls over the whole run
    std::vector<long> lf_calls;  ///< coarse-solver calls per level (empty for mh)
    std::vector<long> cache_hits;    ///< per ladder level, surrogate scheme only
    std::vector<long> cache_misses;  ///< per ladder level, surrogate scheme only

    double init_seconds = 0.0;
    double sampling_seconds = 0.0;
    double offline_seconds = 0.0;  ///< dataset generation + training (surrogate scheme)

    LeastSquaresInit init;
    std::string run_dir;
};

/// Runs the configured scheme against the observations: one least-squares
/// initialization shared by all chains, then n_chains chains advanced
/// concurrently in slices of check_interval samples until every component's
/// potential scale reduction factor drops below the threshold or the sample
/// cap is reached. Writes per-chain CSVs and sidecars, a report.json, and
/// histogram / parameter-error CSVs under <output_dir>/runs/<scheme>.
///
/// The surrogate scheme samples through per-chain memo tables over counted
/// coarse-solver handles and never touches the reference solver; this is
/// enforced, not assumed (a reference-solver call makes the run throw).
InferenceRun run_inference(const ExperimentConfig& config, const Observations& obs);

/// Aggregates the report.json files of several runs into comparison.csv and
/// comparison.json under out_dir: per scheme the offline / initialization /
/// sampling cost split, time per effective sample, solver-call counts, and
/// the parameter-recovery error. Re-running over the same inputs reproduces
/// the output files byte for byte.
void emit_report(const std::vector<std::string>& run_dirs, const std::string& out_dir);

}  // namespace mfda::harness
