#include "mfda/darcy/darcy_model.hpp"

#include <stdexcept>

namespace mfda {

struct DarcyModel::State {
    DarcyConfig config;
    StructuredTriMesh mesh;
    KlBasis kl;
    SensorSet sensors;

    State(const DarcyConfig& cfg, SensorSet sens)
        : config(cfg),
          mesh(cfg.n_cells),
          kl(build_kl_basis_cached(mesh, cfg.mean_log_t, cfg.sigma, cfg.corr_length,
                                   cfg.n_modes, cfg.kl_cache_dir)),
          sensors(std::move(sens)) {
        if (sensors.count() < 1)
            throw std::invalid_argument("DarcyModel: at least one sensor required");
    }
};

DarcyModel::DarcyModel(const DarcyConfig& config) : DarcyModel(config, default_sensor_grid()) {}

DarcyModel::DarcyModel(const DarcyConfig& config, SensorSet sensors)
    : state_(std::make_shared<const State>(config, std::move(sensors))) {}

Eigen::VectorXd DarcyModel::operator()(const Eigen::VectorXd& theta) const {
    return observe(state_->mesh, solve_heads(theta), state_->sensors);
}

Eigen::VectorXd DarcyModel::solve_heads(const Eigen::VectorXd& theta) const {
    Eigen::VectorXd log_t = nodal_log_transmissivity(state_->kl, theta);
    Eigen::VectorXd t = element_transmissivity(state_->mesh, log_t);
    return solve_darcy(state_->mesh, t);
}

int DarcyModel::parameter_dim() const { return state_->kl.n_modes(); }
int DarcyModel::observation_dim() const { return state_->sensors.count(); }
const StructuredTriMesh& DarcyModel::mesh() const { return state_->mesh; }
const KlBasis& DarcyModel::kl() const { return state_->kl; }
const SensorSet& DarcyModel::sensors() const { return state_->sensors; }
const DarcyConfig& DarcyModel::config() const { return state_->config; }

}  // namespace mfda
