#pragma once

#include <Eigen/Core>
#include <vector>

namespace mfda {

struct RdSolverConfig {
    int n = 64;                    ///< grid nodes per side
    double t_end = 50.0;           ///< final time
    int n_outputs = 250;           ///< stored frames after t = 0
    double max_internal_dt = 0.5;  ///< cap on the RK4 substep between frames
};

/// Trajectory of the two-species field: the initial frames plus n_outputs
/// snapshots at times k * t_end / n_outputs, k = 1..n_outputs.
struct RdSolution {
    Eigen::MatrixXd u0, v0;
    std::vector<Eigen::MatrixXd> u, v;
    Eigen::VectorXd times;

    int grid_size() const { return static_cast<int>(u0.rows()); }
    int n_frames() const { return static_cast<int>(u.size()); }
};

/// Spiral profile tanh(r cos(theta - r)), the initial state of both species.
Eigen::MatrixXd spiral_initial_condition(int n);

/// Integrates the oscillatory reaction-diffusion system
///   u_t = (1 - r^2) u + mu1 r^2 v + mu2 lap(u)
///   v_t = -mu1 r^2 u + (1 - r^2) v + mu2 lap(v),   r^2 = u^2 + v^2,
/// on the periodic square (-20, 20)^2. The species combine into the complex
/// field w = u + i v whose reaction term is (1 - (1 + i mu1) |w|^2) w; the
/// diffusion is absorbed exactly in Fourier space by the integrating factor
/// exp(-mu2 |k|^2 t) and the rest is stepped with classical RK4. Throws when
/// the state loses finiteness (step size too large for the reaction).
RdSolution solve_rd(const RdSolverConfig& config, double mu1, double mu2,
                    const Eigen::MatrixXd& u0, const Eigen::MatrixXd& v0);

/// Same, starting from the spiral profile.
RdSolution solve_rd(const RdSolverConfig& config, double mu1, double mu2);

}  // namespace mfda
