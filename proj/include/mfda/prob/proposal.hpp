#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "mfda/prob/random.hpp"

namespace mfda {

/// Symmetric Gaussian random-walk proposal:
///   candidate = current + scale * F z,  F F^T = covariance,  z ~ N(0, I).
class Proposal {
public:
    /// Factors the covariance once. Throws std::invalid_argument if the
    /// matrix is not square or any factorization pivot is <= 1e-14.
    Proposal(Eigen::MatrixXd covariance, double scale);

    int dim() const { return static_cast<int>(factor_.rows()); }
    double scale() const { return scale_; }
    const Eigen::MatrixXd& covariance() const { return covariance_; }

    /// Draws a candidate. Consumes exactly dim() normal variates, also when
    /// scale is 0 (in which case the candidate equals current).
    Eigen::VectorXd propose(const Eigen::VectorXd& current, RandomSource& rng) const;

    /// Log transition density q(to | from), including the Gaussian
    /// normalizing constant. Symmetric in its two arguments. Requires a
    /// positive scale.
    double log_density(const Eigen::VectorXd& to, const Eigen::VectorXd& from) const;

    /// Returns a copy with a different step scale but the same covariance.
    Proposal with_scale(double scale) const;

private:
    Eigen::MatrixXd covariance_;
    double scale_;
    Eigen::MatrixXd factor_;
    Eigen::LDLT<Eigen::MatrixXd> ldlt_;
};

/// Draws a candidate state from proposal centered at current.
Eigen::VectorXd propose(const Eigen::VectorXd& current, const Proposal& proposal,
                        RandomSource& rng);

/// Metropolis acceptance probability for a symmetric proposal:
/// min(1, exp(log_post_new - log_post_current)). An out-of-support candidate
/// (log_post_new = -infinity) yields exactly 0.
double mh_accept_prob(double log_post_current, double log_post_new);

}  // namespace mfda
