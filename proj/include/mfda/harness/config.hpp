#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

namespace mfda::harness {

enum class Problem { darcy, reaction_diffusion };
enum class Scheme { mh, mlda, mfda };

std::string to_string(Problem p);
std::string to_string(Scheme s);
Problem problem_from_string(const std::string& s);
Scheme scheme_from_string(const std::string& s);

/// One row of a scheme's level table: which forward model evaluates the
/// likelihood at this level ("lf<k>" for the k-th coarse solver, "hf" for the
/// reference solver, "mf<k>" for the k-th fused surrogate) and the length of
/// the sub-chain run here to produce one proposal for the level above. The
/// topmost row's sub-chain length is ignored and conventionally 0.
struct LevelEntry {
    std::string forward;
    int subchain_length = 0;

    bool operator==(const LevelEntry&) const = default;
};

/// Groundwater problem sizes: coarse meshes (cells per side, ascending), the
/// reference mesh, and the log-transmissivity field parameters.
struct DarcyScale {
    std::vector<int> lf_cells{5, 10, 25};
    int hf_cells = 50;
    int n_modes = 64;
    double mean_log_t = 1.0;
    double sigma = 0.1;
    double corr_length = 0.1;

    bool operator==(const DarcyScale&) const = default;
};

/// One reaction-diffusion resolution: grid nodes per side and stored frames.
struct RdLevelScale {
    int grid = 16;
    int frames = 50;

    bool operator==(const RdLevelScale&) const = default;
};

/// Reaction-diffusion problem sizes: the coarse solver ladder, the reference
/// solver, the admissible parameter box, and the reduced-basis settings.
struct RdScale {
    std::vector<RdLevelScale> lf_levels{{16, 50}, {32, 100}};
    int hf_grid = 64;
    int hf_frames = 250;
    double t_end = 50.0;
    double max_internal_dt = 0.5;
    Eigen::Vector2d prior_lower{0.5, 0.01};
    Eigen::Vector2d prior_upper{1.5, 0.1};
    double pod_energy = 0.95;
    int pod_draws = 20;
    int pod_frame_stride = 1;  ///< keep every stride-th frame when building the basis
    int max_pod_rank = 25;

    bool operator==(const RdScale&) const = default;
};

struct TrainingParams {
    int epochs = 400;
    int batch_size = 64;
    double learning_rate = 1e-3;
    double validation_fraction = 0.1;

    bool operator==(const TrainingParams&) const = default;
};

/// Complete description of one experiment, serializable as a single JSON
/// document. The level tables for all three schemes are carried together
/// (they describe the same ladder) and `scheme` selects the active one.
struct ExperimentConfig {
    Problem problem = Problem::darcy;
    Scheme scheme = Scheme::mfda;
    std::map<Scheme, std::vector<LevelEntry>> level_tables;

    int n_train = 2000;
    double noise_sigma = 0.01;
    std::uint64_t seed = 1;

    int n_chains = 5;
    long sample_cap = 100000;
    double rhat_threshold = 1.01;
    int check_interval = 100;
    double burn_in_fraction = 0.2;

    std::string output_dir = "out";
    std::string preset_name;  ///< informational; set when built from a preset

    DarcyScale darcy;
    RdScale rd;
    TrainingParams training;

    /// Optional pinned truth for observation synthesis; empty means a fresh
    /// prior draw at synthesis time.
    Eigen::VectorXd theta_true;

    int n_lf_levels() const;
    int parameter_dim() const;
    const std::vector<LevelEntry>& active_levels() const;

    /// Throws std::invalid_argument on an inconsistent document: unknown
    /// forward labels, level tables that do not match the scheme shape
    /// (MH: single hf row; MLDA: lf1..lfK then hf; MFDA: mf1..mfK), missing
    /// sub-chain lengths, or out-of-range scalars.
    void validate() const;
};

/// The level table a scheme gets by default for a given ladder depth:
/// MH {hf}; MLDA {lf1..lfK, hf} with sub-chains (5, 2, ..., 2, 1) (K >= 2)
/// or (5, 1) / (5) for shallow ladders; MFDA {mf1..mfK} with sub-chains
/// (10, 2, ..., 2, 1) truncated to the ladder depth.
std::vector<LevelEntry> default_level_table(Scheme scheme, Problem problem, int n_lf_levels);

/// Named experiment setups. "darcy-desk" and "rd-desk" are small enough to
/// run end to end on one workstation; "darcy-paper" and "rd-paper" carry the
/// full-size ladders and training-set sizes.
ExperimentConfig preset(const std::string& name);
std::vector<std::string> preset_names();

nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);

/// Load/store a config as a JSON file (stored pretty-printed, atomically).
ExperimentConfig load_config(const std::string& path);
void save_config(const ExperimentConfig& config, const std::string& path);

}  // namespace mfda::harness
