#pragma once

#include <Eigen/Core>
#include <complex>

struct fftw_plan_s;

namespace mfda {

/// Two-dimensional complex FFT pair on an n x n grid wrapping a pair of FFTW
/// plans and their shared work buffer. Fields are stored column-major with
/// the x index as the row, so the transform treats y as the outer dimension;
/// the layout is symmetric for square grids. Instances are not thread-safe;
/// give each thread its own. Plan creation and destruction are serialized
/// internally because the FFTW planner mutates global state.
class Fft2 {
public:
    explicit Fft2(int n);
    ~Fft2();
    Fft2(const Fft2&) = delete;
    Fft2& operator=(const Fft2&) = delete;

    int n() const { return n_; }

    /// Forward transform, no normalization.
    Eigen::MatrixXcd forward(const Eigen::MatrixXcd& field) const;

    /// Inverse transform scaled by 1/n^2, so inverse(forward(f)) == f.
    Eigen::MatrixXcd inverse(const Eigen::MatrixXcd& field) const;

private:
    void run(fftw_plan_s* plan, const Eigen::MatrixXcd& in, Eigen::MatrixXcd& out) const;

    int n_;
    fftw_plan_s* forward_plan_;
    fftw_plan_s* backward_plan_;
    mutable Eigen::MatrixXcd buffer_;
};

}  // namespace mfda
