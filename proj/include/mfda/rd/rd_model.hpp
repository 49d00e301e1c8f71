#pragma once

#include <Eigen/Core>

#include "mfda/rd/solver.hpp"

namespace mfda {

/// Fixed lattice of measurement points for the reaction-diffusion problem.
struct RdSensorGrid {
    Eigen::MatrixXd locations;  // one row per sensor
    int count() const { return static_cast<int>(locations.rows()); }
};

/// 13 x 13 lattice spanning [-20, 20]^2 inclusive.
RdSensorGrid default_rd_sensors();

/// Index of the grid node nearest a coordinate, clamped to [0, n-1] rather
/// than wrapped, so the +20 edge maps to the last node.
int rd_nearest_node(double coordinate, int n);

/// Samples both species at the grid node nearest each sensor (clamped to the
/// domain, no wrap) for every stored frame. The result is flattened row-major
/// with u sensors first: entry (r, frame) lives at r * n_frames + frame, and
/// the v block starts at count * n_frames.
Eigen::VectorXd observe_rd(const RdSolution& solution, const RdSensorGrid& sensors);

struct RdConfig {
    int n_grid = 64;     ///< this level's grid nodes per side
    int n_outputs = 250; ///< this level's stored frames
    int n_grid_hf = 64;  ///< reference grid the observations live on
    int n_outputs_hf = 250;
    double t_end = 50.0;
    double max_internal_dt = 0.5;
};

/// Forward map theta = (mu1, mu2) -> sensor observations. The solve runs on
/// this level's resolution from the spiral initial state; coarser levels are
/// lifted onto the reference grid and cadence before observation, so every
/// level produces observations of the same dimension.
class RdModel {
public:
    explicit RdModel(const RdConfig& config);

    int parameter_dim() const { return 2; }
    int observation_dim() const;
    const RdConfig& config() const { return config_; }
    const RdSensorGrid& sensors() const { return sensors_; }

    /// Trajectory at this level's own resolution.
    RdSolution solve(const Eigen::VectorXd& theta) const;

    /// Trajectory lifted to the reference grid and cadence.
    RdSolution solve_on_reference(const Eigen::VectorXd& theta) const;

    Eigen::VectorXd operator()(const Eigen::VectorXd& theta) const;

private:
    RdConfig config_;
    RdSensorGrid sensors_;
};

}  // namespace mfda
