#include "mfda/rd/interpolate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace mfda {

Eigen::MatrixXd bilinear_periodic_resample(const Eigen::MatrixXd& field, int n_out) {
    const int n_in = static_cast<int>(field.rows());
    if (field.cols() != n_in)
        throw std::invalid_argument("bilinear_periodic_resample: field must be square");
    if (n_out < 2)
        throw std::invalid_argument("bilinear_periodic_resample: output grid too small");
    if (n_out == n_in) return field;

    // Output node p sits at fractional input index p * n_in / n_out.
    std::vector<int> lo(n_out), hi(n_out);
    std::vector<double> frac(n_out);
    for (int p = 0; p < n_out; ++p) {
        const double g = static_cast<double>(p) * n_in / n_out;
        const int base = static_cast<int>(std::floor(g));
        lo[p] = base % n_in;
        hi[p] = (base + 1) % n_in;
        frac[p] = g - base;
    }

    Eigen::MatrixXd out(n_out, n_out);
    for (int j = 0; j < n_out; ++j)
        for (int i = 0; i < n_out; ++i) {
            const double fx = frac[i], fy = frac[j];
            out(i, j) = (1.0 - fx) * (1.0 - fy) * field(lo[i], lo[j]) +
                        fx * (1.0 - fy) * field(hi[i], lo[j]) +
                        (1.0 - fx) * fy * field(lo[i], hi[j]) +
                        fx * fy * field(hi[i], hi[j]);
        }
    return out;
}

namespace {

/// Natural cubic spline through (knots(k), rows of values) evaluated at the
/// query times; values holds one column per node series, one row per knot.
Eigen::MatrixXd spline_rows(const Eigen::VectorXd& knots, const Eigen::MatrixXd& values,
                            const Eigen::VectorXd& queries) {
    const int n_knots = static_cast<int>(knots.size());
    const Eigen::Index width = values.cols();
    Eigen::MatrixXd moments = Eigen::MatrixXd::Zero(n_knots, width);

    if (n_knots > 2) {
        // Tridiagonal moment system, one right-hand side per column; the
        // natural end conditions pin the first and last moments to zero.
        const int m = n_knots - 2;
        Eigen::VectorXd diag(m), lower(m), upper(m);
        Eigen::MatrixXd rhs(m, width);
        for (int k = 1; k <= m; ++k) {
            const double h0 = knots(k) - knots(k - 1);
            const double h1 = knots(k + 1) - knots(k);
            lower(k - 1) = h0;
            diag(k - 1) = 2.0 * (h0 + h1);
            upper(k - 1) = h1;
            rhs.row(k - 1) = 6.0 * ((values.row(k + 1) - values.row(k)) / h1 -
                                    (values.row(k) - values.row(k - 1)) / h0);
        }
        // Thomas elimination across the knot index.
        for (int k = 1; k < m; ++k) {
            const double w = lower(k) / diag(k - 1);
            diag(k) -= w * upper(k - 1);
            rhs.row(k) -= w * rhs.row(k - 1);
        }
        moments.row(m) = rhs.row(m - 1) / diag(m - 1);
        for (int k = m - 1; k >= 1; --k)
            moments.row(k) = (rhs.row(k - 1) - upper(k - 1) * moments.row(k + 1)) / diag(k - 1);
    }

    Eigen::MatrixXd out(queries.size(), width);
    for (Eigen::Index q = 0; q < queries.size(); ++q) {
        const double t = queries(q);
        int k = static_cast<int>(std::upper_bound(knots.data(), knots.data() + n_knots, t) -
                                 knots.data()) -
                1;
        k = std::clamp(k, 0, n_knots - 2);
        const double h = knots(k + 1) - knots(k);
        const double a = knots(k + 1) - t, b = t - knots(k);
        out.row(q) = moments.row(k) * (a * a * a / (6.0 * h)) +
                     moments.row(k + 1) * (b * b * b / (6.0 * h)) +
                     (values.row(k) / h - moments.row(k) * (h / 6.0)) * a +
                     (values.row(k + 1) / h - moments.row(k + 1) * (h / 6.0)) * b;
    }
    return out;
}

}  // namespace

RdSolution interpolate_to_hf(const RdSolution& coarse, int n_out, int n_outputs_out) {
    const int n_frames = coarse.n_frames();
    if (n_frames < 1) throw std::invalid_argument("interpolate_to_hf: empty trajectory");
    if (n_outputs_out < 1)
        throw std::invalid_argument("interpolate_to_hf: need at least one output frame");
    const double t_end = coarse.times(n_frames - 1);

    RdSolution fine;
    fine.u0 = bilinear_periodic_resample(coarse.u0, n_out);
    fine.v0 = bilinear_periodic_resample(coarse.v0, n_out);

    // Node histories as rows: knot 0 is the initial state.
    const Eigen::Index n2 = static_cast<Eigen::Index>(n_out) * n_out;
    Eigen::MatrixXd u_hist(n_frames + 1, n2), v_hist(n_frames + 1, n2);
    Eigen::VectorXd knots(n_frames + 1);
    knots(0) = 0.0;
    u_hist.row(0) = fine.u0.reshaped().transpose();
    v_hist.row(0) = fine.v0.reshaped().transpose();
    for (int k = 0; k < n_frames; ++k) {
        knots(k + 1) = coarse.times(k);
        u_hist.row(k + 1) =
            bilinear_periodic_resample(coarse.u[k], n_out).reshaped().transpose();
        v_hist.row(k + 1) =
            bilinear_periodic_resample(coarse.v[k], n_out).reshaped().transpose();
    }

    const double interval = t_end / n_outputs_out;
    fine.times.resize(n_outputs_out);
    for (int k = 0; k < n_outputs_out; ++k) fine.times(k) = (k + 1) * interval;

    Eigen::MatrixXd u_out = spline_rows(knots, u_hist, fine.times);
    Eigen::MatrixXd v_out = spline_rows(knots, v_hist, fine.times);
    fine.u.reserve(n_outputs_out);
    fine.v.reserve(n_outputs_out);
    for (int k = 0; k < n_outputs_out; ++k) {
        fine.u.push_back(u_out.row(k).reshaped(n_out, n_out));
        fine.v.push_back(v_out.row(k).reshaped(n_out, n_out));
    }
    return fine;
}

}  // namespace mfda
