#pragma once

#include <vector>

#include <Eigen/Core>

namespace mfda {

/// Sample autocorrelation of a scalar series at lags 0..max_lag, normalized
/// by the full series length N (biased estimator), so rho[0] == 1. Throws on
/// series shorter than 2 or with zero variance.
std::vector<double> autocorrelation(const std::vector<double>& series, int max_lag);

/// Effective sample size N / (1 + 2 sum_t rho_t). The lag sum is truncated by
/// the initial-positive-sequence rule: consecutive lag pairs (rho_{2k},
/// rho_{2k+1}) are accumulated while their sum stays positive. The result is
/// clamped to (0, N]. Throws on zero variance.
double ess(const std::vector<double>& series);

/// Classic potential scale reduction factor over M >= 2 equal-length scalar
/// chains:
///   R = sqrt(((N-1)/N * W + B/N) / W)
/// with W the mean within-chain variance and B/N the variance of the chain
/// means. Throws if any chain is degenerate (W == 0) or lengths differ.
double gelman_rubin(const std::vector<std::vector<double>>& chains);

/// Quality metrics for a set of multivariate chains (same length, same
/// dimension). Chains are assumed to be post burn-in already.
struct DiagnosticsReport {
    int n_chains = 0;
    int n_samples = 0;  // per chain
    int dim = 0;
    Eigen::VectorXd mean;                // pooled posterior mean
    Eigen::VectorXd sd;                  // pooled posterior standard deviation
    Eigen::VectorXd ess_per_component;   // summed across chains
    Eigen::VectorXd rhat_per_component;  // empty when only one chain
    bool rhat_available = false;
    double min_ess = 0.0;
    double max_rhat = 0.0;
    std::vector<double> acceptance_rates_per_level;  // filled in by the caller
    double wall_time_seconds = 0.0;
    double time_per_ess = 0.0;  // wall time / smallest per-component ESS
    bool has_rmse = false;
    double rmse_vs_truth = 0.0;  // RMSE of pooled mean against a known truth
};

/// Computes per-component ESS and R-hat, pooled moments, time per ESS and,
/// when theta_true is given, the RMSE of the pooled posterior mean against
/// it. R-hat is omitted (flagged) when only one chain is supplied.
DiagnosticsReport summarize(const std::vector<std::vector<Eigen::VectorXd>>& chains,
                            const Eigen::VectorXd* theta_true, double wall_time_seconds);

/// Drops the leading fraction of every chain (burn-in removal).
std::vector<std::vector<Eigen::VectorXd>> discard_burn_in(
    const std::vector<std::vector<Eigen::VectorXd>>& chains, double fraction);

/// Extracts one coordinate of a multivariate sample series.
std::vector<double> component_series(const std::vector<Eigen::VectorXd>& samples, int component);

}  // namespace mfda
