#pragma once

#include <Eigen/Core>
#include <memory>
#include <string>

#include "mfda/darcy/fem.hpp"
#include "mfda/darcy/kl_basis.hpp"
#include "mfda/darcy/mesh.hpp"

namespace mfda {

struct DarcyConfig {
    int n_cells = 50;
    int n_modes = 64;
    double mean_log_t = 1.0;
    double sigma = 0.1;
    double corr_length = 0.1;
    std::string kl_cache_dir;  // empty disables the on-disk basis cache
};

/// Parameter-to-observable map of the groundwater problem at one mesh
/// resolution: theta -> log-transmissivity via the KL basis -> FEM heads ->
/// sensor values. Construction builds (or loads) the mesh and KL basis; the
/// call operator is pure, and copies share the immutable internals, so one
/// model can serve many threads.
class DarcyModel {
public:
    explicit DarcyModel(const DarcyConfig& config);
    DarcyModel(const DarcyConfig& config, SensorSet sensors);

    /// Sensor observations for one parameter vector (dimension n_modes).
    Eigen::VectorXd operator()(const Eigen::VectorXd& theta) const;

    /// Nodal heads for one parameter vector.
    Eigen::VectorXd solve_heads(const Eigen::VectorXd& theta) const;

    int parameter_dim() const;
    int observation_dim() const;
    const StructuredTriMesh& mesh() const;
    const KlBasis& kl() const;
    const SensorSet& sensors() const;
    const DarcyConfig& config() const;

private:
    struct State;
    std::shared_ptr<const State> state_;
};

}  // namespace mfda
