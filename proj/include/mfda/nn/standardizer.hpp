#pragma once

#include <Eigen/Core>

namespace mfda {

/// Per-feature affine normalization x -> (x - mean) / scale with scale equal
/// to the feature standard deviation, floored so constant features map to
/// zero instead of dividing by zero.
class Standardizer {
public:
    Standardizer() = default;
    Standardizer(Eigen::VectorXd mean, Eigen::VectorXd scale);

    /// Fits mean and standard deviation over the columns of data (one record
    /// per column). Features with deviation below 1e-12 get scale 1.
    static Standardizer fit(const Eigen::MatrixXd& data);

    /// Identity transform of the given dimension.
    static Standardizer identity(int dim);

    int dim() const { return static_cast<int>(mean_.size()); }
    const Eigen::VectorXd& mean() const { return mean_; }
    const Eigen::VectorXd& scale() const { return scale_; }

    Eigen::MatrixXd transform(const Eigen::MatrixXd& data) const;
    Eigen::VectorXd transform(const Eigen::VectorXd& x) const;
    Eigen::MatrixXd inverse(const Eigen::MatrixXd& data) const;
    Eigen::VectorXd inverse(const Eigen::VectorXd& x) const;

private:
    Eigen::VectorXd mean_;
    Eigen::VectorXd scale_;
};

}  // namespace mfda
