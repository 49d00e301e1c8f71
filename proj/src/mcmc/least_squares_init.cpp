#include "mfda/mcmc/least_squares_init.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>

namespace mfda {

namespace {

Eigen::VectorXd clamp_to_box(Eigen::VectorXd x, const LeastSquaresOptions& opts) {
    if (opts.clamp_lower.size() == 0) return x;
    return x.cwiseMax(opts.clamp_lower).cwiseMin(opts.clamp_upper);
}

// Central finite-difference Jacobian of model at theta, one column per
// parameter, with per-component step fd_step * (1 + |theta_i|).
Eigen::MatrixXd fd_jacobian(const ForwardFn& model, const Eigen::VectorXd& theta, double fd_step,
                            int out_dim) {
    const int m = static_cast<int>(theta.size());
    Eigen::MatrixXd jac(out_dim, m);
    Eigen::VectorXd probe = theta;
    for (int i = 0; i < m; ++i) {
        double h = fd_step * (1.0 + std::abs(theta[i]));
        probe[i] = theta[i] + h;
        Eigen::VectorXd fp = model(probe);
        probe[i] = theta[i] - h;
        Eigen::VectorXd fm = model(probe);
        probe[i] = theta[i];
        jac.col(i) = (fp - fm) / (2.0 * h);
    }
    return jac;
}

// Factors the normal matrix, adding the ridge term if it is singular.
Eigen::LDLT<Eigen::MatrixXd> factor_normal(Eigen::MatrixXd normal, double ridge) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
    if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() <= 0.0) {
        normal.diagonal().array() += ridge;
        ldlt.compute(normal);
        if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() <= 0.0)
            throw std::runtime_error("init_from_least_squares: normal matrix not positive definite"
                                     " even after regularization");
    }
    return ldlt;
}

}  // namespace

LeastSquaresInit init_from_least_squares(const ForwardFn& model, const Eigen::VectorXd& y_obs,
                                         const NoiseModel& noise, const Eigen::VectorXd& x0,
                                         const LeastSquaresOptions& opts) {
    if (!model) throw std::invalid_argument("init_from_least_squares: null model");
    if (noise.sigma <= 0.0)
        throw std::invalid_argument("init_from_least_squares: sigma must be positive");
    const int m = static_cast<int>(x0.size());
    const int d = static_cast<int>(y_obs.size());
    const bool has_prior = opts.prior_precision.size() > 0;
    if (has_prior && (opts.prior_precision.rows() != m || opts.prior_precision.cols() != m))
        throw std::invalid_argument("init_from_least_squares: prior precision shape mismatch");

    auto objective_at = [&](const Eigen::VectorXd& theta) {
        Eigen::VectorXd r = (model(theta) - y_obs) / noise.sigma;
        double phi = 0.5 * r.squaredNorm();
        if (has_prior) phi += 0.5 * theta.dot(opts.prior_precision * theta);
        return phi;
    };

    LeastSquaresInit result;
    Eigen::VectorXd theta = clamp_to_box(x0, opts);
    Eigen::VectorXd best = theta;
    double best_phi = objective_at(theta);
    result.converged = false;

    int it = 0;
    for (; it < opts.max_iterations; ++it) {
        Eigen::VectorXd r = (model(theta) - y_obs) / noise.sigma;
        Eigen::MatrixXd jac = fd_jacobian(model, theta, opts.fd_step, d) / noise.sigma;

        Eigen::MatrixXd normal = jac.transpose() * jac;
        Eigen::VectorXd grad = jac.transpose() * r;
        if (has_prior) {
            normal += opts.prior_precision;
            grad += opts.prior_precision * theta;
        }
        Eigen::LDLT<Eigen::MatrixXd> ldlt = factor_normal(std::move(normal), opts.regularization);
        Eigen::VectorXd delta = ldlt.solve(-grad);

        theta = clamp_to_box(theta + delta, opts);
        double phi = objective_at(theta);
        if (phi < best_phi) {
            best_phi = phi;
            best = theta;
        }
        if (delta.norm() < opts.step_tolerance) {
            result.converged = true;
            ++it;
            break;
        }
    }
    result.iterations = it;
    result.theta0 = best;
    result.objective = best_phi;

    // Proposal covariance from the normal matrix at the returned point.
    Eigen::MatrixXd jac = fd_jacobian(model, best, opts.fd_step, d) / noise.sigma;
    Eigen::MatrixXd normal = jac.transpose() * jac;
    if (has_prior) normal += opts.prior_precision;
    Eigen::LDLT<Eigen::MatrixXd> ldlt = factor_normal(std::move(normal), opts.regularization);
    double factor = opts.proposal_scale_numerator * opts.proposal_scale_numerator /
                    static_cast<double>(m);
    result.proposal_covariance =
        ldlt.solve(Eigen::MatrixXd::Identity(m, m)) * factor;
    // Symmetrize against round-off so the proposal factorization is clean.
    result.proposal_covariance =
        0.5 * (result.proposal_covariance + result.proposal_covariance.transpose()).eval();
    return result;
}

}  // namespace mfda
