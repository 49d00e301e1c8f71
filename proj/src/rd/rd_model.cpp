#include "mfda/rd/rd_model.hpp"

#include <cmath>
#include <stdexcept>

#include "mfda/rd/grid.hpp"
#include "mfda/rd/interpolate.hpp"

namespace mfda {

RdSensorGrid default_rd_sensors() {
    RdSensorGrid grid;
    grid.locations.resize(13 * 13, 2);
    int row = 0;
    for (int j = 0; j < 13; ++j)
        for (int i = 0; i < 13; ++i) {
            grid.locations(row, 0) = -kRdHalfWidth + 2.0 * kRdHalfWidth * i / 12.0;
            grid.locations(row, 1) = -kRdHalfWidth + 2.0 * kRdHalfWidth * j / 12.0;
            ++row;
        }
    return grid;
}

int rd_nearest_node(double coordinate, int n) {
    const double dx = 2.0 * kRdHalfWidth / n;
    const int index = static_cast<int>(std::lround((coordinate + kRdHalfWidth) / dx));
    return std::clamp(index, 0, n - 1);
}

Eigen::VectorXd observe_rd(const RdSolution& solution, const RdSensorGrid& sensors) {
    const int n = solution.grid_size();
    const int n_frames = solution.n_frames();
    const int n_sensors = sensors.count();
    if (n_frames < 1) throw std::invalid_argument("observe_rd: empty trajectory");

    Eigen::VectorXd out(2 * n_sensors * n_frames);
    for (int s = 0; s < n_sensors; ++s) {
        const int i = rd_nearest_node(sensors.locations(s, 0), n);
        const int j = rd_nearest_node(sensors.locations(s, 1), n);
        for (int t = 0; t < n_frames; ++t) {
            out(s * n_frames + t) = solution.u[t](i, j);
            out((n_sensors + s) * n_frames + t) = solution.v[t](i, j);
        }
    }
    return out;
}

RdModel::RdModel(const RdConfig& config) : config_(config), sensors_(default_rd_sensors()) {
    if (config.n_grid_hf < config.n_grid || config.n_outputs_hf < config.n_outputs)
        throw std::invalid_argument("RdModel: reference resolution below the level's own");
}

int RdModel::observation_dim() const { return 2 * sensors_.count() * config_.n_outputs_hf; }

RdSolution RdModel::solve(const Eigen::VectorXd& theta) const {
    if (theta.size() != 2)
        throw std::invalid_argument("RdModel: expected parameters (mu1, mu2)");
    RdSolverConfig solver;
    solver.n = config_.n_grid;
    solver.t_end = config_.t_end;
    solver.n_outputs = config_.n_outputs;
    solver.max_internal_dt = config_.max_internal_dt;
    return solve_rd(solver, theta(0), theta(1));
}

RdSolution RdModel::solve_on_reference(const Eigen::VectorXd& theta) const {
    RdSolution level = solve(theta);
    if (config_.n_grid == config_.n_grid_hf && config_.n_outputs == config_.n_outputs_hf)
        return level;
    return interpolate_to_hf(level, config_.n_grid_hf, config_.n_outputs_hf);
}

Eigen::VectorXd RdModel::operator()(const Eigen::VectorXd& theta) const {
    return observe_rd(solve_on_reference(theta), sensors_);
}

}  // namespace mfda
