#include "mfda/nn/standardizer.hpp"

#include <cmath>
#include <stdexcept>

namespace mfda {

Standardizer::Standardizer(Eigen::VectorXd mean, Eigen::VectorXd scale)
    : mean_(std::move(mean)), scale_(std::move(scale)) {
    if (mean_.size() != scale_.size())
        throw std::invalid_argument("Standardizer: mean/scale size mismatch");
    for (Eigen::Index i = 0; i < scale_.size(); ++i)
        if (!(scale_(i) > 0.0))
            throw std::invalid_argument("Standardizer: scales must be positive");
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& data) {
    if (data.cols() < 1) throw std::invalid_argument("Standardizer::fit: no records");
    const double n = static_cast<double>(data.cols());
    Eigen::VectorXd mean = data.rowwise().mean();
    Eigen::VectorXd var =
        (data.colwise() - mean).rowwise().squaredNorm() / std::max(n - 1.0, 1.0);
    Eigen::VectorXd scale = var.array().sqrt();
    for (Eigen::Index i = 0; i < scale.size(); ++i)
        if (scale(i) < 1e-12) scale(i) = 1.0;
    return Standardizer(std::move(mean), std::move(scale));
}

Standardizer Standardizer::identity(int dim) {
    return Standardizer(Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Ones(dim));
}

Eigen::MatrixXd Standardizer::transform(const Eigen::MatrixXd& data) const {
    if (data.rows() != mean_.size())
        throw std::invalid_argument("Standardizer::transform: dimension mismatch");
    return (data.colwise() - mean_).array().colwise() / scale_.array();
}

Eigen::VectorXd Standardizer::transform(const Eigen::VectorXd& x) const {
    if (x.size() != mean_.size())
        throw std::invalid_argument("Standardizer::transform: dimension mismatch");
    return (x - mean_).cwiseQuotient(scale_);
}

Eigen::MatrixXd Standardizer::inverse(const Eigen::MatrixXd& data) const {
    if (data.rows() != mean_.size())
        throw std::invalid_argument("Standardizer::inverse: dimension mismatch");
    return (data.array().colwise() * scale_.array()).matrix().colwise() + mean_;
}

Eigen::VectorXd Standardizer::inverse(const Eigen::VectorXd& x) const {
    if (x.size() != mean_.size())
        throw std::invalid_argument("Standardizer::inverse: dimension mismatch");
    return x.cwiseProduct(scale_) + mean_;
}

}  // namespace mfda
