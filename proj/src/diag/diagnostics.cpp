#include "mfda/diag/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mfda {

namespace {

// Centered autocovariance at lag t, normalized by N.
double autocovariance(const std::vector<double>& x, double mean, int t) {
    const int n = static_cast<int>(x.size());
    double s = 0.0;
    for (int i = 0; i + t < n; ++i) s += (x[i] - mean) * (x[i + t] - mean);
    return s / n;
}

double series_mean(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

// A variance this small relative to the series magnitude is rounding noise
// from a constant series, not signal.
bool degenerate_variance(double c0, double mean) {
    return c0 <= 1e-24 * (1.0 + mean * mean);
}

double sample_variance(const std::vector<double>& x) {
    const int n = static_cast<int>(x.size());
    double mean = series_mean(x);
    double s = 0.0;
    for (double v : x) s += (v - mean) * (v - mean);
    return s / (n - 1);
}

}  // namespace

std::vector<double> autocorrelation(const std::vector<double>& series, int max_lag) {
    const int n = static_cast<int>(series.size());
    if (n < 2) throw std::invalid_argument("autocorrelation: series length must be >= 2");
    if (max_lag < 0 || max_lag >= n)
        throw std::invalid_argument("autocorrelation: max_lag must be in [0, N)");
    double mean = series_mean(series);
    double c0 = autocovariance(series, mean, 0);
    if (degenerate_variance(c0, mean))
        throw std::invalid_argument("autocorrelation: series has zero variance");
    std::vector<double> rho(max_lag + 1);
    for (int t = 0; t <= max_lag; ++t) rho[t] = autocovariance(series, mean, t) / c0;
    rho[0] = 1.0;
    return rho;
}

double ess(const std::vector<double>& series) {
    const int n = static_cast<int>(series.size());
    if (n < 2) throw std::invalid_argument("ess: series length must be >= 2");
    double mean = series_mean(series);
    double c0 = autocovariance(series, mean, 0);
    if (degenerate_variance(c0, mean))
        throw std::invalid_argument("ess: series has zero variance");

    // Sum lag pairs (rho_{2k}, rho_{2k+1}) while the pair sum stays positive.
    double pair_sum_total = 0.0;
    for (int k = 0; 2 * k + 1 < n; ++k) {
        double a = autocovariance(series, mean, 2 * k) / c0;
        double b = autocovariance(series, mean, 2 * k + 1) / c0;
        if (a + b <= 0.0) break;
        pair_sum_total += a + b;
    }
    // tau = 1 + 2 sum_{t>=1} rho_t = 2 * (sum of retained pairs) - 1.
    double tau = 2.0 * pair_sum_total - 1.0;
    tau = std::max(tau, 1e-12);
    double result = static_cast<double>(n) / tau;
    return std::min(result, static_cast<double>(n));
}

double gelman_rubin(const std::vector<std::vector<double>>& chains) {
    const int m = static_cast<int>(chains.size());
    if (m < 2) throw std::invalid_argument("gelman_rubin: need at least 2 chains");
    const int n = static_cast<int>(chains[0].size());
    if (n < 10) throw std::invalid_argument("gelman_rubin: chains must have length >= 10");
    for (const auto& c : chains)
        if (static_cast<int>(c.size()) != n)
            throw std::invalid_argument("gelman_rubin: chains must have equal lengths");

    double w = 0.0;
    std::vector<double> means(m);
    for (int j = 0; j < m; ++j) {
        means[j] = series_mean(chains[j]);
        w += sample_variance(chains[j]);
    }
    w /= m;
    if (w <= 0.0) throw std::invalid_argument("gelman_rubin: degenerate within-chain variance");

    double grand = series_mean(means);
    double var_means = 0.0;
    for (double mu : means) var_means += (mu - grand) * (mu - grand);
    var_means /= (m - 1);  // equals B/N in the classic notation

    double v_hat = (static_cast<double>(n - 1) / n) * w + var_means;
    return std::sqrt(v_hat / w);
}

DiagnosticsReport summarize(const std::vector<std::vector<Eigen::VectorXd>>& chains,
                            const Eigen::VectorXd* theta_true, double wall_time_seconds) {
    if (chains.empty() || chains[0].empty())
        throw std::invalid_argument("summarize: need at least one nonempty chain");
    const int m = static_cast<int>(chains.size());
    const int n = static_cast<int>(chains[0].size());
    const int dim = static_cast<int>(chains[0][0].size());
    for (const auto& c : chains)
        if (static_cast<int>(c.size()) != n)
            throw std::invalid_argument("summarize: chains must have equal lengths");

    DiagnosticsReport rep;
    rep.n_chains = m;
    rep.n_samples = n;
    rep.dim = dim;
    rep.wall_time_seconds = wall_time_seconds;

    // Pooled moments
    rep.mean = Eigen::VectorXd::Zero(dim);
    for (const auto& c : chains)
        for (const auto& x : c) rep.mean += x;
    rep.mean /= static_cast<double>(m) * n;
    Eigen::VectorXd ss = Eigen::VectorXd::Zero(dim);
    for (const auto& c : chains)
        for (const auto& x : c) ss += (x - rep.mean).cwiseAbs2();
    rep.sd = (ss / std::max(1, m * n - 1)).cwiseSqrt();

    rep.ess_per_component = Eigen::VectorXd::Zero(dim);
    rep.rhat_available = (m >= 2);
    if (rep.rhat_available) rep.rhat_per_component = Eigen::VectorXd::Zero(dim);

    for (int d = 0; d < dim; ++d) {
        std::vector<std::vector<double>> comp(m);
        for (int j = 0; j < m; ++j) comp[j] = component_series(chains[j], d);
        double e = 0.0;
        for (int j = 0; j < m; ++j) e += ess(comp[j]);
        rep.ess_per_component[d] = e;
        if (rep.rhat_available) rep.rhat_per_component[d] = gelman_rubin(comp);
    }
    rep.min_ess = rep.ess_per_component.minCoeff();
    rep.max_rhat = rep.rhat_available ? rep.rhat_per_component.maxCoeff() : 0.0;
    rep.time_per_ess = rep.min_ess > 0.0 ? wall_time_seconds / rep.min_ess : 0.0;

    if (theta_true != nullptr) {
        if (theta_true->size() != dim)
            throw std::invalid_argument("summarize: theta_true dimension mismatch");
        rep.has_rmse = true;
        rep.rmse_vs_truth = std::sqrt((rep.mean - *theta_true).squaredNorm() / dim);
    }
    return rep;
}

std::vector<std::vector<Eigen::VectorXd>> discard_burn_in(
    const std::vector<std::vector<Eigen::VectorXd>>& chains, double fraction) {
    if (fraction < 0.0 || fraction >= 1.0)
        throw std::invalid_argument("discard_burn_in: fraction must be in [0, 1)");
    std::vector<std::vector<Eigen::VectorXd>> out;
    out.reserve(chains.size());
    for (const auto& c : chains) {
        auto skip = static_cast<std::size_t>(fraction * static_cast<double>(c.size()));
        out.emplace_back(c.begin() + skip, c.end());
    }
    return out;
}

std::vector<double> component_series(const std::vector<Eigen::VectorXd>& samples, int component) {
    std::vector<double> out(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) out[i] = samples[i][component];
    return out;
}

}  // namespace mfda
