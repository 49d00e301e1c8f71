#pragma once

// Shared statistical helpers for test binaries only.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace testsupport {

// Survival function of the Kolmogorov distribution.
inline double kolmogorov_q(double lambda) {
    if (lambda <= 0.0) return 1.0;
    double sum = 0.0;
    for (int j = 1; j <= 100; ++j) {
        double term = 2.0 * ((j % 2 == 1) ? 1.0 : -1.0) * std::exp(-2.0 * j * j * lambda * lambda);
        sum += term;
        if (std::abs(term) < 1e-12) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

// Two-sample Kolmogorov-Smirnov p-value (asymptotic, with the usual
// small-sample correction).
inline double ks_p_value(std::vector<double> a, std::vector<double> b) {
    if (a.size() < 2 || b.size() < 2) throw std::invalid_argument("ks_p_value: samples too small");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    double ne = std::sqrt(na * nb / (na + nb));
    return kolmogorov_q((ne + 0.12 + 0.11 / ne) * d);
}

// Keeps every k-th element (reduces serial dependence before a KS test).
inline std::vector<double> thin(const std::vector<double>& x, int k) {
    std::vector<double> out;
    out.reserve(x.size() / k + 1);
    for (std::size_t i = 0; i < x.size(); i += k) out.push_back(x[i]);
    return out;
}

}  // namespace testsupport
