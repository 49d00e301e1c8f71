#pragma once

#include <vector>

#include <Eigen/Core>

#include "mfda/prob/random.hpp"

namespace mfda {

/// n stratified samples over the axis-aligned box [lower, upper]. Each axis
/// is divided into n equal-width strata; every stratum receives exactly one
/// point, at a uniformly jittered position, with an independent random
/// stratum permutation per axis.
std::vector<Eigen::VectorXd> latin_hypercube(int n, const Eigen::VectorXd& lower,
                                             const Eigen::VectorXd& upper, RandomSource& rng);

}  // namespace mfda
