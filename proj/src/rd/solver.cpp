#include "mfda/rd/solver.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "mfda/rd/grid.hpp"
#include "mfda/rd/spectral.hpp"

namespace mfda {

Eigen::MatrixXd spiral_initial_condition(int n) {
    Eigen::VectorXd x = rd_grid_coordinates(n);
    Eigen::MatrixXd field(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double r = std::hypot(x(i), x(j));
            const double angle = std::atan2(x(j), x(i));
            field(i, j) = std::tanh(r * std::cos(angle - r));
        }
    return field;
}

namespace {

void check_config(const RdSolverConfig& config, double mu2, const Eigen::MatrixXd& u0,
                  const Eigen::MatrixXd& v0) {
    if (config.n < 4 || config.n % 2 != 0)
        throw std::invalid_argument("solve_rd: grid size must be even and at least 4");
    if (config.t_end <= 0.0) throw std::invalid_argument("solve_rd: t_end must be positive");
    if (config.n_outputs < 1)
        throw std::invalid_argument("solve_rd: need at least one output frame");
    if (config.max_internal_dt <= 0.0)
        throw std::invalid_argument("solve_rd: max_internal_dt must be positive");
    if (mu2 <= 0.0) throw std::invalid_argument("solve_rd: diffusion mu2 must be positive");
    if (u0.rows() != config.n || u0.cols() != config.n || v0.rows() != config.n ||
        v0.cols() != config.n)
        throw std::invalid_argument("solve_rd: initial fields must be n x n");
}

Eigen::MatrixXcd reaction(const Eigen::MatrixXcd& w, double mu1) {
    const std::complex<double> coupling(1.0, mu1);
    return w.array() * (1.0 - coupling * w.array().abs2());
}

}  // namespace

RdSolution solve_rd(const RdSolverConfig& config, double mu1, double mu2,
                    const Eigen::MatrixXd& u0, const Eigen::MatrixXd& v0) {
    check_config(config, mu2, u0, v0);
    const int n = config.n;
    const double interval = config.t_end / config.n_outputs;
    const int substeps =
        std::max(1, static_cast<int>(std::ceil(interval / config.max_internal_dt - 1e-12)));
    const double h = interval / substeps;

    Fft2 fft(n);
    Eigen::MatrixXd k2 = rd_wavenumber_squares(n);
    Eigen::MatrixXcd half = (-0.5 * mu2 * h * k2.array()).exp().cast<std::complex<double>>();
    Eigen::MatrixXcd full = (-mu2 * h * k2.array()).exp().cast<std::complex<double>>();

    Eigen::MatrixXcd w = u0.cast<std::complex<double>>() +
                         std::complex<double>(0.0, 1.0) * v0.cast<std::complex<double>>();
    Eigen::MatrixXcd what = fft.forward(w);

    auto reaction_hat = [&](const Eigen::MatrixXcd& state_hat) {
        return fft.forward(reaction(fft.inverse(state_hat), mu1));
    };

    RdSolution solution;
    solution.u0 = u0;
    solution.v0 = v0;
    solution.u.reserve(config.n_outputs);
    solution.v.reserve(config.n_outputs);
    solution.times.resize(config.n_outputs);

    for (int frame = 0; frame < config.n_outputs; ++frame) {
        for (int step = 0; step < substeps; ++step) {
            Eigen::MatrixXcd k1 = reaction_hat(what);
            Eigen::MatrixXcd k2s =
                reaction_hat((half.array() * (what + 0.5 * h * k1).array()).matrix());
            Eigen::MatrixXcd k3 = reaction_hat(
                (half.array() * what.array() + 0.5 * h * k2s.array()).matrix());
            Eigen::MatrixXcd k4 = reaction_hat(
                (full.array() * what.array() + h * half.array() * k3.array()).matrix());
            what = (full.array() * what.array() +
                    (h / 6.0) * (full.array() * k1.array() +
                                 2.0 * half.array() * (k2s.array() + k3.array()) +
                                 k4.array()))
                       .matrix();
        }
        Eigen::MatrixXcd state = fft.inverse(what);
        if (!state.allFinite())
            throw std::runtime_error("solve_rd: state lost finiteness during integration");
        solution.u.push_back(state.real());
        solution.v.push_back(state.imag());
        solution.times(frame) = (frame + 1) * interval;
    }
    return solution;
}

RdSolution solve_rd(const RdSolverConfig& config, double mu1, double mu2) {
    Eigen::MatrixXd profile = spiral_initial_condition(config.n);
    return solve_rd(config, mu1, mu2, profile, profile);
}

}  // namespace mfda
