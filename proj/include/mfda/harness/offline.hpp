#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "mfda/harness/problem.hpp"
#include "mfda/nn/predictor.hpp"
#include "mfda/rom/pod.hpp"

namespace mfda::harness {

/// Inventory of one generated training set: parameter draws, per-level
/// solver outputs, the reference outputs, and the content hash of every
/// file, so any later modification is detected before training.
struct DatasetManifest {
    Problem problem = Problem::darcy;
    std::uint64_t seed = 0;
    int n_train = 0;
    int n_resampled = 0;
    double generation_seconds = 0.0;
    std::string theta_file;
    std::vector<std::string> level_files;  ///< surrogate branch inputs per coarse level
    std::string hf_file;                   ///< training targets
    std::string pod_file;                  ///< reduced basis (kinetics problem only)
    int pod_rank = 0;
    nlohmann::json scale;  ///< echo of the problem-scale block the data was built at
    std::map<std::string, std::string> hashes;

    nlohmann::json to_json() const;
    static DatasetManifest from_json(const nlohmann::json& j);
};

std::string dataset_dir(const ExperimentConfig& config);
std::string surrogate_dir(const ExperimentConfig& config);

/// The problem-scale block of a config (plus the training-set size), used to
/// key datasets to the exact setup they were generated from.
nlohmann::json scale_json(const ExperimentConfig& config);

/// Draws n_train parameters (prior draws for the field problem, stratified
/// box samples for the kinetics problem), evaluates every coarse solver and
/// the reference solver at each draw in parallel, and persists everything
/// under dataset_dir(config) together with a manifest. A draw whose solve
/// fails is logged and replaced by a fresh one. For the kinetics problem the
/// reduced basis is built first from dedicated reference trajectories and
/// the stored per-level outputs are reduced coefficients.
DatasetManifest generate_dataset(const ExperimentConfig& config);

DatasetManifest load_manifest(const std::string& dir);
void save_manifest(const DatasetManifest& manifest, const std::string& dir);

/// Recomputes every listed file hash; throws std::runtime_error on any
/// mismatch or missing file.
void verify_manifest(const DatasetManifest& manifest, const std::string& dir);

/// One fused surrogate per coarse level plus, for the kinetics problem, the
/// reduced basis and its sensor-observation rows.
struct SurrogateStack {
    std::vector<std::shared_ptr<FusionSurrogate>> nets;  ///< level l at index l-1
    std::shared_ptr<PodBasis> basis;
    Eigen::MatrixXd observation_rows;  ///< (2 * n_sensors) x rank
    int n_frames = 0;

    int n_levels() const { return static_cast<int>(nets.size()); }
};

/// Trains one fusion network per coarse level on (theta, level outputs
/// 1..l) -> reference output and writes one weight file per level plus a
/// training summary. Verifies the manifest hashes and the problem scale
/// first. Training divergence aborts with the offending level in the
/// message. Returns the weight file paths.
std::vector<std::string> train_surrogates(const ExperimentConfig& config,
                                          const DatasetManifest& manifest);

SurrogateStack load_surrogates(const ExperimentConfig& config);

/// Branch input the level-l fusion net consumes for one parameter vector:
/// the level's sensor observation (field problem) or the flattened reduced
/// coefficients of the lifted trajectory (kinetics problem).
ForwardFn branch_forward(const ProblemBundle& bundle, const SurrogateStack& stack, int level);

/// Combines the parameter vector and the cached branch inputs of levels
/// 1..l into a predicted observation vector.
FusionFn fusion_for_level(const ProblemBundle& bundle, const SurrogateStack& stack, int level);

/// Direct theta -> predicted observation through the level-l surrogate,
/// running the branch forwards itself (no cache); used wherever a plain
/// forward-model handle is expected.
ForwardFn mf_predictor(const ProblemBundle& bundle, const SurrogateStack& stack, int level);

/// Reduced coefficients of a reference-resolution trajectory, one column
/// per stored frame.
Eigen::MatrixXd reduce_frames(const RdSolution& reference_solution, const PodBasis& basis);

struct LevelAccuracy {
    double lf_rmse = 0.0;
    double mf_rmse = 0.0;
};

/// Observation-space accuracy of each coarse solver and its fused surrogate
/// against the reference solver over n_test fresh draws.
std::vector<LevelAccuracy> evaluate_surrogates(const ProblemBundle& bundle,
                                               const SurrogateStack& stack, int n_test,
                                               std::uint64_t seed);

}  // namespace mfda::harness
