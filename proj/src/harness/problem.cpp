#include "mfda/harness/problem.hpp"

#include <stdexcept>

#include "mfda/io/file_io.hpp"

namespace mfda::harness {

namespace {

Prior build_prior(const ExperimentConfig& c) {
    if (c.problem == Problem::darcy) return Prior::standard_normal(c.darcy.n_modes);
    return Prior::uniform_box(c.rd.prior_lower, c.rd.prior_upper);
}

DarcyConfig darcy_config_at(const ExperimentConfig& c, int n_cells, const std::string& cache_dir) {
    DarcyConfig d;
    d.n_cells = n_cells;
    d.n_modes = c.darcy.n_modes;
    d.mean_log_t = c.darcy.mean_log_t;
    d.sigma = c.darcy.sigma;
    d.corr_length = c.darcy.corr_length;
    d.kl_cache_dir = cache_dir;
    return d;
}

RdConfig rd_config_at(const ExperimentConfig& c, int grid, int frames) {
    RdConfig r;
    r.n_grid = grid;
    r.n_outputs = frames;
    r.n_grid_hf = c.rd.hf_grid;
    r.n_outputs_hf = c.rd.hf_frames;
    r.t_end = c.rd.t_end;
    r.max_internal_dt = c.rd.max_internal_dt;
    return r;
}

}  // namespace

ProblemBundle::ProblemBundle(const ExperimentConfig& config)
    : config_(config), prior_(build_prior(config)) {
    config_.validate();
    if (config_.problem == Problem::darcy) {
        // Covariance bases are cached on disk so repeated runs skip the
        // eigensolves; the cache lives next to the other artifacts.
        const std::string cache_dir = config_.output_dir + "/kl_cache";
        ensure_directory(cache_dir);
        for (int cells : config_.darcy.lf_cells)
            darcy_models_.emplace_back(darcy_config_at(config_, cells, cache_dir));
        darcy_models_.emplace_back(darcy_config_at(config_, config_.darcy.hf_cells, cache_dir));
        obs_dim_ = darcy_models_.back().observation_dim();
    } else {
        for (const auto& lvl : config_.rd.lf_levels)
            rd_models_.emplace_back(rd_config_at(config_, lvl.grid, lvl.frames));
        rd_models_.emplace_back(rd_config_at(config_, config_.rd.hf_grid, config_.rd.hf_frames));
        obs_dim_ = rd_models_.back().observation_dim();
    }
}

ForwardFn ProblemBundle::lf_observation(int level) const {
    if (level < 1 || level > n_levels())
        throw std::out_of_range("lf_observation: level out of range");
    if (problem() == Problem::darcy) {
        DarcyModel model = darcy_models_[level - 1];
        return [model](const Eigen::VectorXd& theta) { return model(theta); };
    }
    RdModel model = rd_models_[level - 1];
    return [model](const Eigen::VectorXd& theta) { return model(theta); };
}

ForwardFn ProblemBundle::hf_observation() const {
    if (problem() == Problem::darcy) {
        DarcyModel model = darcy_models_.back();
        return [model](const Eigen::VectorXd& theta) { return model(theta); };
    }
    RdModel model = rd_models_.back();
    return [model](const Eigen::VectorXd& theta) { return model(theta); };
}

const DarcyModel& ProblemBundle::darcy_level(int level) const {
    if (problem() != Problem::darcy) throw std::logic_error("not a darcy bundle");
    if (level < 1 || level > n_levels()) throw std::out_of_range("darcy_level: out of range");
    return darcy_models_[level - 1];
}

const DarcyModel& ProblemBundle::darcy_hf() const {
    if (problem() != Problem::darcy) throw std::logic_error("not a darcy bundle");
    return darcy_models_.back();
}

const RdModel& ProblemBundle::rd_level(int level) const {
    if (problem() != Problem::reaction_diffusion) throw std::logic_error("not an rd bundle");
    if (level < 1 || level > n_levels()) throw std::out_of_range("rd_level: out of range");
    return rd_models_[level - 1];
}

const RdModel& ProblemBundle::rd_hf() const {
    if (problem() != Problem::reaction_diffusion) throw std::logic_error("not an rd bundle");
    return rd_models_.back();
}

Eigen::VectorXd ProblemBundle::gn_start() const {
    if (problem() == Problem::darcy) return Eigen::VectorXd::Zero(param_dim());
    return 0.5 * (config_.rd.prior_lower + config_.rd.prior_upper);
}

LeastSquaresOptions ProblemBundle::gn_options() const {
    LeastSquaresOptions opts;
    if (problem() == Problem::darcy) {
        // Fewer observations than coefficients: the unit prior precision of
        // the standard normal coefficients makes the normal matrix full rank.
        opts.prior_precision = Eigen::MatrixXd::Identity(param_dim(), param_dim());
    } else {
        opts.clamp_lower = config_.rd.prior_lower;
        opts.clamp_upper = config_.rd.prior_upper;
    }
    return opts;
}

}  // namespace mfda::harness
