#pragma once

#include <Eigen/Core>

#include "mfda/mcmc/eval_cache.hpp"
#include "mfda/prob/likelihood.hpp"
#include "mfda/prob/proposal.hpp"

namespace mfda {

struct LeastSquaresOptions {
    int max_iterations = 50;
    double step_tolerance = 1e-8;  // stop when the update norm drops below this
    double fd_step = 1e-5;         // central-difference step, scaled by (1 + |theta_i|)
    double regularization = 1e-8;  // added to the normal matrix when it is singular

    /// Optional Gaussian-prior precision added to the normal matrix and
    /// gradient (turns the objective into a penalized least squares). Leave
    /// empty for the plain problem.
    Eigen::MatrixXd prior_precision;

    /// Optional box projection applied to every iterate. Leave empty for
    /// unconstrained iterations.
    Eigen::VectorXd clamp_lower;
    Eigen::VectorXd clamp_upper;

    /// The proposal covariance is the inverse normal matrix scaled by
    /// (scale_numerator^2 / dim).
    double proposal_scale_numerator = 2.38;
};

struct LeastSquaresInit {
    Eigen::VectorXd theta0;                // best iterate found
    Eigen::MatrixXd proposal_covariance;   // already carries the 2.38^2/dim factor
    bool converged = false;
    int iterations = 0;
    double objective = 0.0;  // 0.5 * ||residual||^2 (+ prior penalty) at theta0

    Proposal make_proposal() const { return Proposal(proposal_covariance, 1.0); }
};

/// Gauss-Newton minimization of 0.5 * ||(model(theta) - y_obs) / sigma||^2
/// starting from x0, with a central finite-difference Jacobian. Returns the
/// minimizer together with a random-walk proposal covariance formed from the
/// Gauss-Newton normal matrix. If the iteration cap is hit the best iterate
/// is returned with converged == false.
LeastSquaresInit init_from_least_squares(const ForwardFn& model, const Eigen::VectorXd& y_obs,
                                         const NoiseModel& noise, const Eigen::VectorXd& x0,
                                         const LeastSquaresOptions& opts = {});

}  // namespace mfda
