#include "mfda/rd/spectral.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace mfda {

namespace {

std::mutex& planner_mutex() {
    static std::mutex mutex;
    return mutex;
}

}  // namespace

Fft2::Fft2(int n) : n_(n) {
    if (n < 2) throw std::invalid_argument("Fft2: grid size must be at least 2");
    buffer_.resize(n, n);
    auto* data = reinterpret_cast<fftw_complex*>(buffer_.data());
    std::lock_guard<std::mutex> lock(planner_mutex());
    forward_plan_ = fftw_plan_dft_2d(n, n, data, data, FFTW_FORWARD, FFTW_ESTIMATE);
    backward_plan_ = fftw_plan_dft_2d(n, n, data, data, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (forward_plan_ == nullptr || backward_plan_ == nullptr)
        throw std::runtime_error("Fft2: plan creation failed");
}

Fft2::~Fft2() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(forward_plan_);
    fftw_destroy_plan(backward_plan_);
}

void Fft2::run(fftw_plan_s* plan, const Eigen::MatrixXcd& in, Eigen::MatrixXcd& out) const {
    if (in.rows() != n_ || in.cols() != n_)
        throw std::invalid_argument("Fft2: field shape does not match the plan");
    buffer_ = in;
    fftw_execute(plan);
    out = buffer_;
}

Eigen::MatrixXcd Fft2::forward(const Eigen::MatrixXcd& field) const {
    Eigen::MatrixXcd out;
    run(forward_plan_, field, out);
    return out;
}

Eigen::MatrixXcd Fft2::inverse(const Eigen::MatrixXcd& field) const {
    Eigen::MatrixXcd out;
    run(backward_plan_, field, out);
    out /= static_cast<double>(n_) * static_cast<double>(n_);
    return out;
}

}  // namespace mfda
