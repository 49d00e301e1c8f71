#pragma once

#include <Eigen/Core>

#include "mfda/prob/random.hpp"

namespace mfda {

/// Prior over the parameter vector. Two families cover everything in this
/// toolkit: iid standard normal coefficients (random field expansions) and a
/// uniform box (physical PDE coefficients).
class Prior {
public:
    static Prior standard_normal(int dim);
    static Prior uniform_box(Eigen::VectorXd lower, Eigen::VectorXd upper);

    int dim() const { return dim_; }

    /// Log density. The standard normal carries its full normalizing
    /// constant; the uniform box evaluates to 0 inside the box. Points
    /// outside the support return -infinity.
    double log_density(const Eigen::VectorXd& x) const;

    bool in_support(const Eigen::VectorXd& x) const;

    /// One draw from the prior.
    Eigen::VectorXd sample(RandomSource& rng) const;

    bool is_uniform_box() const { return family_ == Family::kUniformBox; }
    const Eigen::VectorXd& lower() const;
    const Eigen::VectorXd& upper() const;

private:
    enum class Family { kStandardNormal, kUniformBox };

    Prior(Family family, int dim) : family_(family), dim_(dim) {}

    Family family_;
    int dim_;
    Eigen::VectorXd lower_;
    Eigen::VectorXd upper_;
};

/// Log prior density of x.
double log_prior(const Prior& prior, const Eigen::VectorXd& x);

}  // namespace mfda
