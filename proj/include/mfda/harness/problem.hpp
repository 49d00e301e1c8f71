#pragma once

#include <vector>

#include <Eigen/Core>

#include "mfda/darcy/darcy_model.hpp"
#include "mfda/harness/config.hpp"
#include "mfda/mcmc/eval_cache.hpp"
#include "mfda/mcmc/least_squares_init.hpp"
#include "mfda/prob/prior.hpp"
#include "mfda/rd/rd_model.hpp"

namespace mfda::harness {

/// Solver-side realization of a config: the coarse-solver ladder, the
/// reference solver, the prior and the least-squares settings used to build
/// chain starting points. Construction is the expensive part (meshes and
/// covariance bases); the forward handles returned afterwards are pure
/// closures over shared immutable state and safe to call concurrently.
class ProblemBundle {
public:
    explicit ProblemBundle(const ExperimentConfig& config);

    const ExperimentConfig& config() const { return config_; }
    Problem problem() const { return config_.problem; }
    int n_levels() const { return config_.n_lf_levels(); }
    int param_dim() const { return config_.parameter_dim(); }
    int obs_dim() const { return obs_dim_; }
    const Prior& prior() const { return prior_; }

    /// Sensor observations of coarse level l (1-based), on the reference
    /// observation grid (coarse reaction-diffusion trajectories are lifted
    /// before sampling the sensors).
    ForwardFn lf_observation(int level) const;
    ForwardFn hf_observation() const;

    const DarcyModel& darcy_level(int level) const;
    const DarcyModel& darcy_hf() const;
    const RdModel& rd_level(int level) const;
    const RdModel& rd_hf() const;

    /// Starting point and settings for the least-squares initialization:
    /// zero coefficients with a unit prior penalty for the field problem,
    /// the box midpoint with box clamping for the kinetics problem.
    Eigen::VectorXd gn_start() const;
    LeastSquaresOptions gn_options() const;

private:
    ExperimentConfig config_;
    Prior prior_;
    int obs_dim_ = 0;
    std::vector<DarcyModel> darcy_models_;  // coarse levels then the reference
    std::vector<RdModel> rd_models_;
};

}  // namespace mfda::harness
