#pragma once

#include <Eigen/Core>

namespace mfda {

/// Observation noise model: independent zero-mean Gaussian noise with a
/// common standard deviation on each of dim observation components.
struct NoiseModel {
    double sigma = 1.0;
    int dim = 0;
};

/// Unnormalized Gaussian log likelihood
///   -0.5 * || (predicted - observed) / sigma ||^2.
/// Constant terms are dropped; only differences of this quantity enter the
/// samplers.
double log_likelihood(const Eigen::VectorXd& predicted, const Eigen::VectorXd& observed,
                      const NoiseModel& noise);

}  // namespace mfda
