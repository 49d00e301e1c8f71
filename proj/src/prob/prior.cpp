#include "mfda/prob/prior.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace mfda {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

Prior Prior::standard_normal(int dim) {
    if (dim <= 0) throw std::invalid_argument("Prior::standard_normal: dim must be positive");
    return Prior(Family::kStandardNormal, dim);
}

Prior Prior::uniform_box(Eigen::VectorXd lower, Eigen::VectorXd upper) {
    if (lower.size() == 0 || lower.size() != upper.size())
        throw std::invalid_argument("Prior::uniform_box: bounds must be nonempty and equal length");
    if (((upper - lower).array() <= 0.0).any())
        throw std::invalid_argument("Prior::uniform_box: upper must exceed lower on every axis");
    Prior p(Family::kUniformBox, static_cast<int>(lower.size()));
    p.lower_ = std::move(lower);
    p.upper_ = std::move(upper);
    return p;
}

double Prior::log_density(const Eigen::VectorXd& x) const {
    if (x.size() != dim_) throw std::invalid_argument("Prior::log_density: dimension mismatch");
    switch (family_) {
        case Family::kStandardNormal:
            return -0.5 * x.squaredNorm() - 0.5 * dim_ * std::log(2.0 * std::numbers::pi);
        case Family::kUniformBox:
            return in_support(x) ? 0.0 : kNegInf;
    }
    return kNegInf;
}

bool Prior::in_support(const Eigen::VectorXd& x) const {
    if (x.size() != dim_) throw std::invalid_argument("Prior::in_support: dimension mismatch");
    if (family_ == Family::kStandardNormal) return x.allFinite();
    return (x.array() >= lower_.array()).all() && (x.array() <= upper_.array()).all();
}

Eigen::VectorXd Prior::sample(RandomSource& rng) const {
    if (family_ == Family::kStandardNormal) return sample_standard_normal_vector(dim_, rng);
    Eigen::VectorXd x(dim_);
    for (int i = 0; i < dim_; ++i) x[i] = lower_[i] + rng.uniform01() * (upper_[i] - lower_[i]);
    return x;
}

const Eigen::VectorXd& Prior::lower() const {
    if (family_ != Family::kUniformBox) throw std::logic_error("Prior::lower: not a uniform box");
    return lower_;
}

const Eigen::VectorXd& Prior::upper() const {
    if (family_ != Family::kUniformBox) throw std::logic_error("Prior::upper: not a uniform box");
    return upper_;
}

double log_prior(const Prior& prior, const Eigen::VectorXd& x) { return prior.log_density(x); }

}  // namespace mfda
