#include "mfda/prob/proposal.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mfda {

Proposal::Proposal(Eigen::MatrixXd covariance, double scale)
    : covariance_(std::move(covariance)), scale_(scale) {
    if (covariance_.rows() == 0 || covariance_.rows() != covariance_.cols())
        throw std::invalid_argument("Proposal: covariance must be square and nonempty");
    if (!(scale_ >= 0.0)) throw std::invalid_argument("Proposal: scale must be nonnegative");
    ldlt_.compute(covariance_);
    if (ldlt_.info() != Eigen::Success || ldlt_.vectorD().minCoeff() <= 1e-14)
        throw std::invalid_argument("Proposal: covariance is not positive definite (pivot <= 1e-14)");
    // P^T L sqrt(D) reconstitutes a square root of the covariance.
    factor_ = ldlt_.transpositionsP().transpose() *
              Eigen::MatrixXd(Eigen::MatrixXd(ldlt_.matrixL()) *
                              ldlt_.vectorD().cwiseSqrt().asDiagonal());
}

Eigen::VectorXd Proposal::propose(const Eigen::VectorXd& current, RandomSource& rng) const {
    if (current.size() != factor_.rows())
        throw std::invalid_argument("Proposal::propose: dimension mismatch");
    Eigen::VectorXd z = sample_standard_normal_vector(dim(), rng);
    if (scale_ == 0.0) return current;
    return current + scale_ * (factor_ * z);
}

double Proposal::log_density(const Eigen::VectorXd& to, const Eigen::VectorXd& from) const {
    if (scale_ <= 0.0) throw std::logic_error("Proposal::log_density: degenerate (scale 0)");
    if (to.size() != factor_.rows() || from.size() != factor_.rows())
        throw std::invalid_argument("Proposal::log_density: dimension mismatch");
    const int d = dim();
    Eigen::VectorXd delta = (to - from) / scale_;
    double quad = delta.dot(ldlt_.solve(delta));
    double log_det = ldlt_.vectorD().array().log().sum() + 2.0 * d * std::log(scale_);
    return -0.5 * (quad + log_det + d * std::log(2.0 * std::numbers::pi));
}

Proposal Proposal::with_scale(double scale) const { return Proposal(covariance_, scale); }

Eigen::VectorXd propose(const Eigen::VectorXd& current, const Proposal& proposal,
                        RandomSource& rng) {
    return proposal.propose(current, rng);
}

double mh_accept_prob(double log_post_current, double log_post_new) {
    if (std::isinf(log_post_new) && log_post_new < 0.0) return 0.0;
    double d = log_post_new - log_post_current;
    if (d >= 0.0) return 1.0;
    return std::exp(d);
}

}  // namespace mfda
