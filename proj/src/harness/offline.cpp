#include "mfda/harness/offline.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <iostream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "mfda/io/file_io.hpp"
#include "mfda/nn/architectures.hpp"
#include "mfda/nn/weights_io.hpp"
#include "mfda/prob/latin_hypercube.hpp"
#include "mfda/prob/random.hpp"

namespace mfda::harness {

namespace {

// Stream tags feeding derive_seed so every random consumer of the base seed
// gets an independent, scheduling-free stream.
constexpr std::uint64_t kThetaStream = 0x101;
constexpr std::uint64_t kPodStream = 0x202;
constexpr std::uint64_t kResampleStream = 0x303;
constexpr std::uint64_t kTrainStream = 0x404;
constexpr std::uint64_t kEvalStream = 0x505;

void parallel_for(int n, const std::function<void(int)>& body) {
    int n_threads = static_cast<int>(std::thread::hardware_concurrency());
    if (n_threads <= 0) n_threads = 4;
    n_threads = std::min({n_threads, 8, n});
    if (n_threads <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    auto worker = [&] {
        while (true) {
            int i = next.fetch_add(1);
            if (i >= n) return;
            {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (first_error) return;
            }
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> threads;
    threads.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

Eigen::VectorXd flatten(const Eigen::MatrixXd& m) { return m.reshaped(); }

}  // namespace

std::string dataset_dir(const ExperimentConfig& config) { return config.output_dir + "/dataset"; }

std::string surrogate_dir(const ExperimentConfig& config) {
    return config.output_dir + "/surrogates";
}

nlohmann::json scale_json(const ExperimentConfig& config) {
    nlohmann::json full = to_json(config);
    nlohmann::json s;
    s["problem"] = full.at("problem");
    s["n_train"] = config.n_train;
    s[config.problem == Problem::darcy ? "darcy" : "rd"] =
        full.at(config.problem == Problem::darcy ? "darcy" : "rd");
    return s;
}

nlohmann::json DatasetManifest::to_json() const {
    nlohmann::json j;
    j["problem"] = harness::to_string(problem);
    j["seed"] = seed;
    j["n_train"] = n_train;
    j["n_resampled"] = n_resampled;
    j["generation_seconds"] = generation_seconds;
    j["theta_file"] = theta_file;
    j["level_files"] = level_files;
    j["hf_file"] = hf_file;
    if (!pod_file.empty()) {
        j["pod_file"] = pod_file;
        j["pod_rank"] = pod_rank;
    }
    j["scale"] = scale;
    j["hashes"] = hashes;
    return j;
}

DatasetManifest DatasetManifest::from_json(const nlohmann::json& j) {
    DatasetManifest m;
    m.problem = problem_from_string(j.at("problem").get<std::string>());
    m.seed = j.at("seed").get<std::uint64_t>();
    m.n_train = j.at("n_train").get<int>();
    m.n_resampled = j.value("n_resampled", 0);
    m.generation_seconds = j.value("generation_seconds", 0.0);
    m.theta_file = j.at("theta_file").get<std::string>();
    m.level_files = j.at("level_files").get<std::vector<std::string>>();
    m.hf_file = j.at("hf_file").get<std::string>();
    m.pod_file = j.value("pod_file", std::string());
    m.pod_rank = j.value("pod_rank", 0);
    m.scale = j.at("scale");
    m.hashes = j.at("hashes").get<std::map<std::string, std::string>>();
    return m;
}

DatasetManifest load_manifest(const std::string& dir) {
    return DatasetManifest::from_json(nlohmann::json::parse(read_file(dir + "/manifest.json")));
}

void save_manifest(const DatasetManifest& manifest, const std::string& dir) {
    write_file_atomic(dir + "/manifest.json", manifest.to_json().dump(2) + "\n");
}

void verify_manifest(const DatasetManifest& manifest, const std::string& dir) {
    for (const auto& [file, expected] : manifest.hashes) {
        std::string actual;
        try {
            actual = fnv1a64_hex_of_file(dir + "/" + file);
        } catch (const std::exception& e) {
            throw std::runtime_error("dataset file missing or unreadable: " + file + " (" +
                                     e.what() + ")");
        }
        if (actual != expected)
            throw std::runtime_error("dataset file changed since generation: " + file);
    }
    if (static_cast<int>(manifest.level_files.size()) == 0)
        throw std::runtime_error("manifest lists no level files");
}

namespace {

/// Parameter matrix (dim x n): prior draws for the field problem, stratified
/// box samples for the kinetics problem.
Eigen::MatrixXd draw_parameters(const ExperimentConfig& config, const Prior& prior, int n,
                                std::uint64_t stream) {
    Mt19937Source rng(derive_seed(config.seed, stream));
    Eigen::MatrixXd theta(prior.dim(), n);
    if (config.problem == Problem::darcy) {
        for (int i = 0; i < n; ++i) theta.col(i) = prior.sample(rng);
    } else {
        auto points = latin_hypercube(n, config.rd.prior_lower, config.rd.prior_upper, rng);
        for (int i = 0; i < n; ++i) theta.col(i) = points[static_cast<std::size_t>(i)];
    }
    return theta;
}

/// Runs solve(theta_i) for every column, replacing a draw whose solve throws
/// by a fresh one (up to 32 attempts) and counting replacements.
void solve_draws_resampling(const ExperimentConfig& config, const Prior& prior,
                            Eigen::MatrixXd& theta, std::uint64_t resample_stream,
                            const std::function<void(int, const Eigen::VectorXd&)>& solve,
                            std::atomic<int>& n_resampled) {
    parallel_for(static_cast<int>(theta.cols()), [&](int i) {
        Eigen::VectorXd th = theta.col(i);
        for (int attempt = 1;; ++attempt) {
            try {
                solve(i, th);
                theta.col(i) = th;
                return;
            } catch (const std::exception& e) {
                if (attempt >= 32)
                    throw std::runtime_error("dataset draw " + std::to_string(i) +
                                             " kept failing: " + e.what());
                std::cerr << "dataset draw " << i << " failed (" << e.what() << "); resampling\n";
                n_resampled.fetch_add(1);
                Mt19937Source rng(derive_seed(derive_seed(config.seed, resample_stream),
                                              static_cast<std::uint64_t>(i) * 64 +
                                                  static_cast<std::uint64_t>(attempt)));
                th = prior.sample(rng);
            }
        }
    });
}

}  // namespace

Eigen::MatrixXd reduce_frames(const RdSolution& reference_solution, const PodBasis& basis) {
    const int n_frames = reference_solution.n_frames();
    Eigen::MatrixXd z(basis.rank(), n_frames);
    for (int t = 0; t < n_frames; ++t)
        z.col(t) = basis.modes.transpose() *
                   stack_state(reference_solution.u[static_cast<std::size_t>(t)],
                               reference_solution.v[static_cast<std::size_t>(t)]);
    return z;
}

DatasetManifest generate_dataset(const ExperimentConfig& config) {
    config.validate();
    const auto t_start = std::chrono::steady_clock::now();
    ProblemBundle bundle(config);
    const std::string dir = dataset_dir(config);
    ensure_directory(dir);

    const int n = config.n_train;
    const int n_levels = bundle.n_levels();
    Eigen::MatrixXd theta = draw_parameters(config, bundle.prior(), n, kThetaStream);
    std::atomic<int> n_resampled{0};

    DatasetManifest manifest;
    manifest.problem = config.problem;
    manifest.seed = config.seed;
    manifest.n_train = n;
    manifest.scale = scale_json(config);
    manifest.theta_file = "theta.bin";
    manifest.hf_file = "hf.bin";
    for (int l = 1; l <= n_levels; ++l)
        manifest.level_files.push_back("lf_" + std::to_string(l) + ".bin");

    std::vector<Eigen::MatrixXd> level_outputs;
    Eigen::MatrixXd hf_outputs;

    if (config.problem == Problem::darcy) {
        for (int l = 0; l < n_levels; ++l)
            level_outputs.emplace_back(bundle.obs_dim(), n);
        hf_outputs.resize(bundle.obs_dim(), n);
        solve_draws_resampling(
            config, bundle.prior(), theta, kResampleStream,
            [&](int i, const Eigen::VectorXd& th) {
                // The reference solve runs first: a bad draw is rejected
                // before any level output is written for it.
                Eigen::VectorXd hf = bundle.darcy_hf()(th);
                for (int l = 0; l < n_levels; ++l)
                    level_outputs[static_cast<std::size_t>(l)].col(i) =
                        bundle.darcy_level(l + 1)(th);
                hf_outputs.col(i) = hf;
            },
            n_resampled);
    } else {
        // The reduced basis comes first, from dedicated reference
        // trajectories at parameters disjoint from the training draws.
        Eigen::MatrixXd pod_theta =
            draw_parameters(config, bundle.prior(), config.rd.pod_draws, kPodStream);
        const int kept = config.rd.hf_frames / config.rd.pod_frame_stride;
        if (kept < 1) throw std::invalid_argument("pod_frame_stride leaves no frames");
        const int state_dim = 2 * config.rd.hf_grid * config.rd.hf_grid;
        Eigen::MatrixXd snapshots(state_dim, static_cast<Eigen::Index>(kept) * config.rd.pod_draws);
        solve_draws_resampling(
            config, bundle.prior(), pod_theta, kPodStream + 7,
            [&](int i, const Eigen::VectorXd& th) {
                RdSolution sol = bundle.rd_hf().solve(th);
                snapshots.middleCols(static_cast<Eigen::Index>(i) * kept, kept) =
                    solution_snapshots(sol, config.rd.pod_frame_stride);
            },
            n_resampled);
        PodBasis basis = compute_pod(snapshots, config.rd.pod_energy);
        if (basis.rank() > config.rd.max_pod_rank)
            basis.modes = basis.modes.leftCols(config.rd.max_pod_rank).eval();
        manifest.pod_file = "pod_basis.bin";
        manifest.pod_rank = basis.rank();
        write_matrices_binary(dir + "/" + manifest.pod_file,
                              {basis.modes, Eigen::MatrixXd(basis.singular_values)});

        const int r = basis.rank();
        const int frames = config.rd.hf_frames;
        for (int l = 0; l < n_levels; ++l)
            level_outputs.emplace_back(static_cast<Eigen::Index>(r) * frames, n);
        hf_outputs.resize(static_cast<Eigen::Index>(r) * frames, n);
        solve_draws_resampling(
            config, bundle.prior(), theta, kResampleStream,
            [&](int i, const Eigen::VectorXd& th) {
                Eigen::VectorXd hf = flatten(reduce_frames(bundle.rd_hf().solve(th), basis));
                for (int l = 0; l < n_levels; ++l) {
                    RdSolution lifted = bundle.rd_level(l + 1).solve_on_reference(th);
                    level_outputs[static_cast<std::size_t>(l)].col(i) =
                        flatten(reduce_frames(lifted, basis));
                }
                hf_outputs.col(i) = hf;
            },
            n_resampled);
    }

    write_matrix_binary(dir + "/" + manifest.theta_file, theta);
    for (int l = 0; l < n_levels; ++l)
        write_matrix_binary(dir + "/" + manifest.level_files[static_cast<std::size_t>(l)],
                            level_outputs[static_cast<std::size_t>(l)]);
    write_matrix_binary(dir + "/" + manifest.hf_file, hf_outputs);

    manifest.n_resampled = n_resampled.load();
    std::vector<std::string> files{manifest.theta_file, manifest.hf_file};
    files.insert(files.end(), manifest.level_files.begin(), manifest.level_files.end());
    if (!manifest.pod_file.empty()) files.push_back(manifest.pod_file);
    for (const auto& f : files) manifest.hashes[f] = fnv1a64_hex_of_file(dir + "/" + f);
    manifest.generation_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    save_manifest(manifest, dir);
    return manifest;
}

namespace {

/// Per-frame expansion of the kinetics dataset: every stored frame of every
/// draw becomes one training record, so the net is applied per time step
/// with weights shared across steps.
TrainingDataset expand_rd_records(const Eigen::MatrixXd& theta,
                                  const std::vector<Eigen::MatrixXd>& levels,
                                  const Eigen::MatrixXd& targets, int n_branches, int rank,
                                  int n_frames) {
    const int n_draws = static_cast<int>(theta.cols());
    const Eigen::Index n_records = static_cast<Eigen::Index>(n_draws) * n_frames;
    TrainingDataset data;
    data.branch_inputs.emplace_back(theta.rows(), n_records);
    for (int b = 0; b < n_branches; ++b) data.branch_inputs.emplace_back(rank, n_records);
    data.targets.resize(rank, n_records);
    for (int i = 0; i < n_draws; ++i) {
        const Eigen::Index base = static_cast<Eigen::Index>(i) * n_frames;
        data.branch_inputs[0].middleCols(base, n_frames) = theta.col(i).replicate(1, n_frames);
        for (int b = 0; b < n_branches; ++b)
            data.branch_inputs[static_cast<std::size_t>(b) + 1].middleCols(base, n_frames) =
                Eigen::Map<const Eigen::MatrixXd>(levels[static_cast<std::size_t>(b)].col(i).data(),
                                                  rank, n_frames);
        data.targets.middleCols(base, n_frames) =
            Eigen::Map<const Eigen::MatrixXd>(targets.col(i).data(), rank, n_frames);
    }
    return data;
}

}  // namespace

std::vector<std::string> train_surrogates(const ExperimentConfig& config,
                                          const DatasetManifest& manifest) {
    config.validate();
    const std::string ddir = dataset_dir(config);
    verify_manifest(manifest, ddir);
    if (manifest.scale != scale_json(config))
        throw std::invalid_argument(
            "dataset manifest was generated at a different problem scale than this config");

    const auto t_start = std::chrono::steady_clock::now();
    const Eigen::MatrixXd theta = read_matrix_binary(ddir + "/" + manifest.theta_file);
    const Eigen::MatrixXd hf = read_matrix_binary(ddir + "/" + manifest.hf_file);
    std::vector<Eigen::MatrixXd> levels;
    for (const auto& f : manifest.level_files)
        levels.push_back(read_matrix_binary(ddir + "/" + f));
    for (const auto& m : levels)
        if (m.cols() != theta.cols() || hf.cols() != theta.cols())
            throw std::runtime_error("dataset matrices disagree on the number of draws");

    const std::string sdir = surrogate_dir(config);
    ensure_directory(sdir);
    const int n_levels = static_cast<int>(levels.size());

    std::vector<std::string> paths;
    nlohmann::json summary_levels = nlohmann::json::array();
    for (int l = 1; l <= n_levels; ++l) {
        NetworkSpec spec;
        TrainingDataset data;
        if (config.problem == Problem::darcy) {
            spec = darcy_fusion_spec(l, static_cast<int>(theta.rows()),
                                     static_cast<int>(hf.rows()));
            data.branch_inputs.push_back(theta);
            for (int b = 0; b < l; ++b)
                data.branch_inputs.push_back(levels[static_cast<std::size_t>(b)]);
            data.targets = hf;
        } else {
            spec = rd_fusion_spec(l, static_cast<int>(theta.rows()), manifest.pod_rank);
            data = expand_rd_records(theta, levels, hf, l, manifest.pod_rank,
                                     config.rd.hf_frames);
        }
        TrainConfig tc;
        tc.epochs = config.training.epochs;
        tc.batch_size = config.training.batch_size;
        tc.learning_rate = config.training.learning_rate;
        tc.validation_fraction = config.training.validation_fraction;
        tc.seed = derive_seed(config.seed, kTrainStream + static_cast<std::uint64_t>(l));

        FusionTrainResult result = [&] {
            try {
                return train_fusion_surrogate(spec, data, tc);
            } catch (const std::exception& e) {
                throw std::runtime_error("surrogate training diverged at level " +
                                         std::to_string(l) + ": " + e.what());
            }
        }();

        nlohmann::json meta;
        meta["level"] = l;
        meta["problem"] = to_string(config.problem);
        meta["n_train"] = manifest.n_train;
        meta["epochs"] = tc.epochs;
        meta["seed"] = tc.seed;
        meta["dataset_theta_hash"] = manifest.hashes.at(manifest.theta_file);
        if (!result.history.empty()) {
            meta["final_train_loss"] = result.history.back().train_loss;
            if (std::isfinite(result.history.back().validation_loss))
                meta["final_validation_loss"] = result.history.back().validation_loss;
        }
        const std::string path = sdir + "/level_" + std::to_string(l) + ".json";
        save_fusion_surrogate(path, result.surrogate, meta);
        paths.push_back(path);
        nlohmann::json entry = meta;
        entry["file"] = "level_" + std::to_string(l) + ".json";
        summary_levels.push_back(entry);
    }

    nlohmann::json summary;
    summary["problem"] = to_string(config.problem);
    summary["n_levels"] = n_levels;
    summary["levels"] = summary_levels;
    summary["generation_seconds"] = manifest.generation_seconds;
    summary["training_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    write_file_atomic(sdir + "/training_summary.json", summary.dump(2) + "\n");
    return paths;
}

SurrogateStack load_surrogates(const ExperimentConfig& config) {
    SurrogateStack stack;
    const std::string sdir = surrogate_dir(config);
    for (int l = 1; l <= config.n_lf_levels(); ++l)
        stack.nets.push_back(std::make_shared<FusionSurrogate>(
            load_fusion_surrogate(sdir + "/level_" + std::to_string(l) + ".json")));
    if (config.problem == Problem::reaction_diffusion) {
        const DatasetManifest manifest = load_manifest(dataset_dir(config));
        auto mats = read_matrices_binary(dataset_dir(config) + "/" + manifest.pod_file);
        if (mats.size() < 2) throw std::runtime_error("reduced-basis file is incomplete");
        auto basis = std::make_shared<PodBasis>();
        basis->modes = mats[0];
        basis->singular_values = mats[1].col(0);
        stack.basis = basis;
        stack.observation_rows = sensor_rows(*basis, config.rd.hf_grid, default_rd_sensors());
        stack.n_frames = config.rd.hf_frames;
    }
    return stack;
}

ForwardFn branch_forward(const ProblemBundle& bundle, const SurrogateStack& stack, int level) {
    if (bundle.problem() == Problem::darcy) return bundle.lf_observation(level);
    RdModel model = bundle.rd_level(level);
    std::shared_ptr<PodBasis> basis = stack.basis;
    if (!basis) throw std::invalid_argument("branch_forward: stack has no reduced basis");
    return [model, basis](const Eigen::VectorXd& theta) {
        return flatten(reduce_frames(model.solve_on_reference(theta), *basis));
    };
}

FusionFn fusion_for_level(const ProblemBundle& bundle, const SurrogateStack& stack, int level) {
    if (level < 1 || level > stack.n_levels())
        throw std::out_of_range("fusion_for_level: level out of range");
    auto net = stack.nets[static_cast<std::size_t>(level) - 1];
    if (bundle.problem() == Problem::darcy) {
        return [net](const Eigen::VectorXd& theta, const std::vector<Eigen::VectorXd>& outputs) {
            return net->predict_mf(theta, outputs);
        };
    }
    const Eigen::MatrixXd srows = stack.observation_rows;
    const int rank = static_cast<int>(srows.cols());
    const int n_frames = stack.n_frames;
    return [net, srows, rank, n_frames](const Eigen::VectorXd& theta,
                                        const std::vector<Eigen::VectorXd>& outputs) {
        std::vector<Eigen::MatrixXd> branches;
        branches.reserve(outputs.size() + 1);
        branches.push_back(theta.replicate(1, n_frames));
        for (const auto& z : outputs) {
            if (z.size() != static_cast<Eigen::Index>(rank) * n_frames)
                throw std::invalid_argument("fusion input has the wrong reduced dimension");
            branches.emplace_back(Eigen::Map<const Eigen::MatrixXd>(z.data(), rank, n_frames));
        }
        Eigen::MatrixXd zhat = net->predict_batch(branches);      // rank x frames
        Eigen::MatrixXd per_frame_obs = srows * zhat;             // sensors x frames
        // Sensor-major flattening, matching the solver observation layout.
        return Eigen::VectorXd(per_frame_obs.transpose().reshaped());
    };
}

ForwardFn mf_predictor(const ProblemBundle& bundle, const SurrogateStack& stack, int level) {
    std::vector<ForwardFn> branches;
    for (int j = 1; j <= level; ++j) branches.push_back(branch_forward(bundle, stack, j));
    FusionFn fusion = fusion_for_level(bundle, stack, level);
    return [branches, fusion](const Eigen::VectorXd& theta) {
        std::vector<Eigen::VectorXd> outputs;
        outputs.reserve(branches.size());
        for (const auto& b : branches) outputs.push_back(b(theta));
        return fusion(theta, outputs);
    };
}

std::vector<LevelAccuracy> evaluate_surrogates(const ProblemBundle& bundle,
                                               const SurrogateStack& stack, int n_test,
                                               std::uint64_t seed) {
    if (n_test < 1) throw std::invalid_argument("evaluate_surrogates: n_test must be >= 1");
    const int n_levels = stack.n_levels();
    Mt19937Source rng(derive_seed(seed, kEvalStream));
    Eigen::MatrixXd theta(bundle.param_dim(), n_test);
    for (int i = 0; i < n_test; ++i) theta.col(i) = bundle.prior().sample(rng);

    std::vector<FusionFn> fusions;
    for (int l = 1; l <= n_levels; ++l) fusions.push_back(fusion_for_level(bundle, stack, l));

    std::vector<double> lf_sq(static_cast<std::size_t>(n_levels), 0.0);
    std::vector<double> mf_sq(static_cast<std::size_t>(n_levels), 0.0);
    std::mutex accumulate_mutex;
    parallel_for(n_test, [&](int i) {
        const Eigen::VectorXd th = theta.col(i);
        const Eigen::VectorXd hf = bundle.hf_observation()(th);
        std::vector<Eigen::VectorXd> branch_outputs;
        std::vector<double> lf_local(static_cast<std::size_t>(n_levels));
        std::vector<double> mf_local(static_cast<std::size_t>(n_levels));
        for (int l = 1; l <= n_levels; ++l) {
            Eigen::VectorXd lf_obs;
            if (bundle.problem() == Problem::darcy) {
                lf_obs = bundle.darcy_level(l)(th);
                branch_outputs.push_back(lf_obs);
            } else {
                RdSolution lifted = bundle.rd_level(l).solve_on_reference(th);
                lf_obs = observe_rd(lifted, bundle.rd_hf().sensors());
                branch_outputs.push_back(flatten(reduce_frames(lifted, *stack.basis)));
            }
            Eigen::VectorXd mf_obs = fusions[static_cast<std::size_t>(l) - 1](th, branch_outputs);
            lf_local[static_cast<std::size_t>(l) - 1] = (lf_obs - hf).squaredNorm();
            mf_local[static_cast<std::size_t>(l) - 1] = (mf_obs - hf).squaredNorm();
        }
        std::lock_guard<std::mutex> lock(accumulate_mutex);
        for (int l = 0; l < n_levels; ++l) {
            lf_sq[static_cast<std::size_t>(l)] += lf_local[static_cast<std::size_t>(l)];
            mf_sq[static_cast<std::size_t>(l)] += mf_local[static_cast<std::size_t>(l)];
        }
    });

    std::vector<LevelAccuracy> out(static_cast<std::size_t>(n_levels));
    const double denom = static_cast<double>(n_test) * bundle.obs_dim();
    for (int l = 0; l < n_levels; ++l) {
        out[static_cast<std::size_t>(l)].lf_rmse = std::sqrt(lf_sq[static_cast<std::size_t>(l)] / denom);
        out[static_cast<std::size_t>(l)].mf_rmse = std::sqrt(mf_sq[static_cast<std::size_t>(l)] / denom);
    }
    return out;
}

}  // namespace mfda::harness
