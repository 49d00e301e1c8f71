#include "mfda/prob/likelihood.hpp"

#include <stdexcept>

namespace mfda {

double log_likelihood(const Eigen::VectorXd& predicted, const Eigen::VectorXd& observed,
                      const NoiseModel& noise) {
    if (predicted.size() != observed.size())
        throw std::invalid_argument("log_likelihood: predicted/observed size mismatch");
    if (noise.dim != 0 && noise.dim != predicted.size())
        throw std::invalid_argument("log_likelihood: noise dimension mismatch");
    if (noise.sigma <= 0.0) throw std::invalid_argument("log_likelihood: sigma must be positive");
    double s = (predicted - observed).squaredNorm();
    return -0.5 * s / (noise.sigma * noise.sigma);
}

}  // namespace mfda
