#include "mfda/harness/online.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "mfda/io/file_io.hpp"
#include "mfda/mcmc/chain_io.hpp"
#include "mfda/mcmc/eval_cache.hpp"
#include "mfda/mcmc/mh.hpp"
#include "mfda/mcmc/multilevel.hpp"
#include "mfda/prob/likelihood.hpp"
#include "mfda/prob/random.hpp"

namespace mfda::harness {

namespace {

constexpr std::uint64_t kObsStream = 0x606;
constexpr std::uint64_t kChainStream = 0x707;

std::string fmt_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
    nlohmann::json a = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& a) {
    Eigen::VectorXd v(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
    return v;
}

/// Uniform interface over the two sampler types so the convergence loop can
/// drive any scheme's chains. Each runner owns its random stream; the
/// sampler member is declared after it and so outlives no reference.
class ChainRunner {
public:
    virtual ~ChainRunner() = default;
    virtual void advance(int n) = 0;
    virtual const Chain& chain() const = 0;
    virtual Chain& chain() = 0;
};

class MhRunner final : public ChainRunner {
public:
    MhRunner(LogLikelihoodFn log_like, const Prior& prior, const Proposal& proposal,
             const Eigen::VectorXd& theta0, std::uint64_t seed)
        : rng_(seed), sampler_(std::move(log_like), prior, proposal, theta0, rng_) {
        sampler_.chain().seed = seed;
    }
    void advance(int n) override { sampler_.advance(n); }
    const Chain& chain() const override { return sampler_.chain(); }
    Chain& chain() override { return sampler_.chain(); }

private:
    Mt19937Source rng_;
    MhSampler sampler_;
};

class LadderRunner final : public ChainRunner {
public:
    LadderRunner(FidelityStack stack, const Eigen::VectorXd& theta0, std::uint64_t seed,
                 std::shared_ptr<EvalCache> cache)
        : cache_(std::move(cache)), rng_(seed), sampler_(std::move(stack), theta0, rng_) {
        sampler_.chain().seed = seed;
    }
    void advance(int n) override { sampler_.advance(n); }
    const Chain& chain() const override { return sampler_.chain(); }
    Chain& chain() override { return sampler_.chain(); }
    const EvalCache* cache() const { return cache_.get(); }

private:
    std::shared_ptr<EvalCache> cache_;  // owned here; shared with the level likelihoods
    Mt19937Source rng_;
    DelayedAcceptanceSampler sampler_;
};

/// Largest potential scale reduction factor across components of the post
/// burn-in samples, or +inf while any component is still degenerate (early
/// rounds can hold constant chains, which the estimator rejects).
double max_rhat_of(const std::vector<std::unique_ptr<ChainRunner>>& runners,
                   double burn_in_fraction) {
    const int n_chains = static_cast<int>(runners.size());
    const int len = runners[0]->chain().length();
    const int burn = static_cast<int>(std::floor(len * burn_in_fraction));
    const int post = len - burn;
    if (post < 2) return std::numeric_limits<double>::infinity();
    const int dim = runners[0]->chain().dim();
    double worst = 0.0;
    std::vector<std::vector<double>> series(static_cast<std::size_t>(n_chains));
    for (int d = 0; d < dim; ++d) {
        for (int c = 0; c < n_chains; ++c) {
            auto& s = series[static_cast<std::size_t>(c)];
            s.resize(static_cast<std::size_t>(post));
            const auto& samples = runners[static_cast<std::size_t>(c)]->chain().samples;
            for (int k = 0; k < post; ++k)
                s[static_cast<std::size_t>(k)] = samples[static_cast<std::size_t>(burn + k)][d];
        }
        try {
            worst = std::max(worst, gelman_rubin(series));
        } catch (const std::exception&) {
            return std::numeric_limits<double>::infinity();
        }
    }
    return worst;
}

void write_histogram_csv(const std::vector<std::vector<Eigen::VectorXd>>& post,
                         const std::string& path) {
    constexpr int kBins = 40;
    std::string out = "component,bin,lower,upper,count\n";
    if (!post.empty() && !post[0].empty()) {
        const int dim = static_cast<int>(post[0][0].size());
        for (int d = 0; d < dim; ++d) {
            double lo = std::numeric_limits<double>::infinity();
            double hi = -std::numeric_limits<double>::infinity();
            for (const auto& chain : post)
                for (const auto& x : chain) {
                    lo = std::min(lo, x[d]);
                    hi = std::max(hi, x[d]);
                }
            if (!(hi > lo)) hi = lo + 1.0;  // all mass in one point: one wide bin
            const double width = (hi - lo) / kBins;
            std::vector<long> counts(kBins, 0);
            for (const auto& chain : post)
                for (const auto& x : chain) {
                    int b = static_cast<int>((x[d] - lo) / width);
                    b = std::clamp(b, 0, kBins - 1);
                    ++counts[static_cast<std::size_t>(b)];
                }
            for (int b = 0; b < kBins; ++b)
                out += std::to_string(d) + "," + std::to_string(b) + "," +
                       fmt_double(lo + b * width) + "," + fmt_double(lo + (b + 1) * width) + "," +
                       std::to_string(counts[static_cast<std::size_t>(b)]) + "\n";
        }
    }
    write_file_atomic(path, out);
}

void write_parameter_error_csv(const DiagnosticsReport& report, const Eigen::VectorXd& truth,
                               const std::string& path) {
    std::string out = "component,posterior_mean,truth,abs_error\n";
    if (report.has_rmse && truth.size() == report.mean.size()) {
        for (Eigen::Index d = 0; d < report.mean.size(); ++d)
            out += std::to_string(d) + "," + fmt_double(report.mean[d]) + "," +
                   fmt_double(truth[d]) + "," + fmt_double(std::abs(report.mean[d] - truth[d])) +
                   "\n";
        out += "overall,,," + fmt_double(report.rmse_vs_truth) + "\n";
    }
    write_file_atomic(path, out);
}

int lf_index_of(const std::string& label) {
    // "lf<k>" and "mf<k>" rows; validation has already established the shape.
    return std::stoi(label.substr(2));
}

/// summarize() rejects degenerate sample sets (a chain that never moved has
/// zero variance, so ESS is undefined). Such a run is still written out, with
/// pooled moments computed directly and the efficiency metrics pinned to
/// their worst values.
DiagnosticsReport safe_summarize(const std::vector<std::vector<Eigen::VectorXd>>& post,
                                 const Eigen::VectorXd* truth, double wall_seconds) {
    try {
        return summarize(post, truth, wall_seconds);
    } catch (const std::exception&) {
        DiagnosticsReport rep;
        rep.n_chains = static_cast<int>(post.size());
        rep.n_samples = post.empty() ? 0 : static_cast<int>(post[0].size());
        rep.dim = (post.empty() || post[0].empty()) ? 0 : static_cast<int>(post[0][0].size());
        rep.mean = Eigen::VectorXd::Zero(rep.dim);
        rep.sd = Eigen::VectorXd::Zero(rep.dim);
        long n = 0;
        for (const auto& chain : post)
            for (const auto& x : chain) {
                rep.mean += x;
                ++n;
            }
        if (n > 0) rep.mean /= static_cast<double>(n);
        for (const auto& chain : post)
            for (const auto& x : chain) rep.sd += (x - rep.mean).cwiseAbs2();
        if (n > 1) rep.sd = (rep.sd / static_cast<double>(n - 1)).cwiseSqrt();
        rep.ess_per_component = Eigen::VectorXd::Zero(rep.dim);
        rep.min_ess = 0.0;
        rep.max_rhat = std::numeric_limits<double>::infinity();
        rep.rhat_available = false;
        rep.wall_time_seconds = wall_seconds;
        rep.time_per_ess = std::numeric_limits<double>::infinity();
        if (truth != nullptr && truth->size() == rep.mean.size() && rep.dim > 0) {
            rep.has_rmse = true;
            rep.rmse_vs_truth =
                std::sqrt((rep.mean - *truth).squaredNorm() / static_cast<double>(rep.dim));
        }
        return rep;
    }
}

}  // namespace

std::string observations_dir(const ExperimentConfig& config) {
    return config.output_dir + "/observations";
}

Observations synthesize_observations(const ExperimentConfig& config) {
    config.validate();
    ProblemBundle bundle(config);
    Observations obs;
    obs.noise_sigma = config.noise_sigma;
    obs.seed = config.seed;
    if (config.theta_true.size() > 0) {
        obs.theta_true = config.theta_true;
    } else {
        Mt19937Source rng(derive_seed(config.seed, kObsStream));
        obs.theta_true = bundle.prior().sample(rng);
    }
    obs.y = bundle.hf_observation()(obs.theta_true);
    if (config.noise_sigma > 0.0) {
        Mt19937Source rng(derive_seed(config.seed, kObsStream + 1));
        obs.y += config.noise_sigma *
                 sample_standard_normal_vector(static_cast<int>(obs.y.size()), rng);
    }

    const std::string dir = observations_dir(config);
    ensure_directory(dir);
    write_matrix_binary(dir + "/y_obs.bin", obs.y);
    nlohmann::json j;
    j["noise_sigma"] = obs.noise_sigma;
    j["seed"] = obs.seed;
    j["theta_true"] = vector_to_json(obs.theta_true);
    j["n_observations"] = obs.y.size();
    write_file_atomic(dir + "/truth.json", j.dump(2) + "\n");
    return obs;
}

Observations load_observations(const std::string& dir) {
    Observations obs;
    Eigen::MatrixXd y = read_matrix_binary(dir + "/y_obs.bin");
    obs.y = y.col(0);
    nlohmann::json j = nlohmann::json::parse(read_file(dir + "/truth.json"));
    obs.noise_sigma = j.at("noise_sigma").get<double>();
    obs.seed = j.at("seed").get<std::uint64_t>();
    obs.theta_true = vector_from_json(j.at("theta_true"));
    return obs;
}

InferenceRun run_inference(const ExperimentConfig& config, const Observations& obs) {
    config.validate();
    if (!(obs.noise_sigma > 0.0))
        throw std::invalid_argument(
            "run_inference: the likelihood needs a positive noise level; exact observations "
            "define a point mass");
    ProblemBundle bundle(config);
    if (obs.y.size() != bundle.obs_dim())
        throw std::invalid_argument("run_inference: observation vector does not match the model");

    const int n_levels = bundle.n_levels();
    const NoiseModel noise{obs.noise_sigma, bundle.obs_dim()};
    const auto& rows = config.active_levels();
    const int n_rows = static_cast<int>(rows.size());

    InferenceRun run;
    run.scheme = config.scheme;

    SurrogateStack stack;
    if (config.scheme == Scheme::mfda) stack = load_surrogates(config);

    // Counted handles: every solver call anywhere below goes through these,
    // so the call accounting is exact rather than inferred.
    CountingForward hf(bundle.hf_observation());
    std::vector<CountingForward> lf;
    for (int l = 1; l <= n_levels; ++l) {
        if (config.scheme == Scheme::mfda)
            lf.emplace_back(branch_forward(bundle, stack, l));
        else
            lf.emplace_back(bundle.lf_observation(l));
    }

    // One least-squares initialization from the scheme's own top-level model,
    // shared by all chains. The surrogate scheme initializes through a direct
    // surrogate handle (no memo table, no reference solver).
    const auto t_init0 = std::chrono::steady_clock::now();
    ForwardFn init_model;
    if (config.scheme == Scheme::mfda)
        init_model = mf_predictor(bundle, stack, n_levels);
    else
        init_model = hf;
    run.init = init_from_least_squares(init_model, obs.y, noise, bundle.gn_start(),
                                       bundle.gn_options());
    run.init_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_init0).count();

    const Proposal proposal = run.init.make_proposal();
    const Eigen::VectorXd theta0 = run.init.theta0;

    auto make_solver_like = [&](const ForwardFn& fwd) {
        Eigen::VectorXd y = obs.y;
        NoiseModel nm = noise;
        return LogLikelihoodFn(
            [fwd, y, nm](const Eigen::VectorXd& theta) { return log_likelihood(fwd(theta), y, nm); });
    };
    std::vector<ForwardFn> mf_forwards;
    for (const auto& f : lf) mf_forwards.emplace_back(f);

    std::vector<std::unique_ptr<ChainRunner>> runners;
    for (int c = 0; c < config.n_chains; ++c) {
        const std::uint64_t chain_seed =
            derive_seed(config.seed, kChainStream + static_cast<std::uint64_t>(c));
        if (config.scheme == Scheme::mh) {
            runners.push_back(std::make_unique<MhRunner>(make_solver_like(hf), bundle.prior(),
                                                         proposal, theta0, chain_seed));
            continue;
        }
        std::vector<LevelSpec> specs;
        std::shared_ptr<EvalCache> cache;
        if (config.scheme == Scheme::mfda) cache = std::make_shared<EvalCache>(n_levels);
        for (int i = 0; i < n_rows; ++i) {
            LevelSpec spec;
            spec.label = rows[static_cast<std::size_t>(i)].forward;
            spec.subchain_length =
                std::max(rows[static_cast<std::size_t>(i)].subchain_length, 1);
            if (config.scheme == Scheme::mlda) {
                if (spec.label == "hf")
                    spec.log_likelihood = make_solver_like(hf);
                else
                    spec.log_likelihood = make_solver_like(
                        lf[static_cast<std::size_t>(lf_index_of(spec.label)) - 1]);
            } else {
                const int level = lf_index_of(spec.label);  // surrogate row "mf<k>"
                spec.log_likelihood =
                    MultiFidelityLikelihood(mf_forwards, level - 1,
                                            fusion_for_level(bundle, stack, level), obs.y, noise,
                                            cache);
            }
            specs.push_back(std::move(spec));
        }
        FidelityStack fstack{std::move(specs), bundle.prior(), proposal};
        runners.push_back(
            std::make_unique<LadderRunner>(std::move(fstack), theta0, chain_seed, cache));
    }

    // Convergence-gated sampling: all chains advance one slice concurrently,
    // then the scale-reduction check decides whether another slice is needed.
    const auto t_sample0 = std::chrono::steady_clock::now();
    long per_chain = 0;
    run.max_rhat = 0.0;
    while (true) {
        const int slice = static_cast<int>(
            std::min<long>(config.check_interval, config.sample_cap - per_chain));
        std::vector<std::thread> workers;
        workers.reserve(runners.size());
        for (auto& r : runners) workers.emplace_back([&r, slice] { r->advance(slice); });
        for (auto& w : workers) w.join();
        per_chain += slice;
        if (config.n_chains >= 2) {
            const double rhat = max_rhat_of(runners, config.burn_in_fraction);
            if (std::isfinite(rhat)) run.max_rhat = rhat;
            if (rhat < config.rhat_threshold) {
                run.converged = true;
                break;
            }
        }
        if (per_chain >= config.sample_cap) break;
    }
    run.sampling_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_sample0).count();
    run.samples_per_chain = per_chain;

    // Solver-call accounting, and the hard guarantee behind the surrogate
    // scheme's cost claims: the reference solver was never invoked.
    run.hf_calls = hf.count();
    for (const auto& f : lf) run.lf_calls.push_back(f.count());
    if (config.scheme == Scheme::mfda) {
        if (run.hf_calls != 0)
            throw std::logic_error("surrogate-scheme run touched the reference solver " +
                                   std::to_string(run.hf_calls) + " times");
        run.cache_hits.assign(static_cast<std::size_t>(n_levels), 0);
        run.cache_misses.assign(static_cast<std::size_t>(n_levels), 0);
        for (const auto& r : runners) {
            const auto* ladder = dynamic_cast<const LadderRunner*>(r.get());
            for (int l = 0; l < n_levels; ++l) {
                run.cache_hits[static_cast<std::size_t>(l)] += ladder->cache()->hits(l);
                run.cache_misses[static_cast<std::size_t>(l)] += ladder->cache()->misses(l);
            }
        }
        for (int l = 0; l < n_levels; ++l)
            if (run.cache_misses[static_cast<std::size_t>(l)] !=
                run.lf_calls[static_cast<std::size_t>(l)])
                throw std::logic_error("memo-table misses disagree with counted solver calls at "
                                       "level " +
                                       std::to_string(l + 1));
    }
    if (config.scheme == Scheme::mh) run.lf_calls.clear();

    // Offline cost attribution: the surrogate scheme pays for its dataset and
    // training once; the solver-backed schemes have no offline stage.
    if (config.scheme == Scheme::mfda) {
        nlohmann::json summary = nlohmann::json::parse(
            read_file(surrogate_dir(config) + "/training_summary.json"));
        run.offline_seconds = summary.value("generation_seconds", 0.0) +
                              summary.value("training_seconds", 0.0);
    }

    // Diagnostics on the post burn-in samples; acceptance rates are pooled
    // over chains per level.
    std::vector<std::vector<Eigen::VectorXd>> all;
    for (auto& r : runners) {
        run.chains.push_back(r->chain());
        all.push_back(r->chain().samples);
    }
    auto post = discard_burn_in(all, config.burn_in_fraction);
    const Eigen::VectorXd* truth = obs.theta_true.size() > 0 ? &obs.theta_true : nullptr;
    run.diagnostics = safe_summarize(post, truth, run.sampling_seconds);
    {
        const std::size_t levels_in_chain = run.chains[0].proposals_per_level.size();
        std::vector<long> prop(levels_in_chain, 0), acc(levels_in_chain, 0);
        for (const auto& ch : run.chains)
            for (std::size_t l = 0; l < levels_in_chain; ++l) {
                prop[l] += ch.proposals_per_level[l];
                acc[l] += ch.accepts_per_level[l];
            }
        run.diagnostics.acceptance_rates_per_level.clear();
        for (std::size_t l = 0; l < levels_in_chain; ++l)
            run.diagnostics.acceptance_rates_per_level.push_back(
                prop[l] == 0 ? 0.0 : static_cast<double>(acc[l]) / static_cast<double>(prop[l]));
    }

    // Artifacts.
    run.run_dir = config.output_dir + "/runs/" + to_string(config.scheme);
    ensure_directory(run.run_dir);
    save_config(config, run.run_dir + "/config.json");
    for (std::size_t c = 0; c < run.chains.size(); ++c) {
        write_chain_csv(run.chains[c], run.run_dir + "/chain_" + std::to_string(c) + ".csv");
        write_chain_sidecar(run.chains[c],
                            run.run_dir + "/chain_" + std::to_string(c) + ".meta.json");
    }
    write_histogram_csv(post, run.run_dir + "/histogram.csv");
    write_parameter_error_csv(run.diagnostics, obs.theta_true,
                              run.run_dir + "/parameter_error.csv");

    nlohmann::json rep;
    rep["scheme"] = to_string(config.scheme);
    rep["problem"] = to_string(config.problem);
    rep["preset"] = config.preset_name;
    rep["seed"] = config.seed;
    rep["n_chains"] = config.n_chains;
    rep["samples_per_chain"] = run.samples_per_chain;
    rep["converged"] = run.converged;
    rep["max_rhat"] = run.max_rhat;
    rep["min_ess"] = run.diagnostics.min_ess;
    rep["time_per_ess"] = run.diagnostics.time_per_ess;
    rep["posterior_mean"] = vector_to_json(run.diagnostics.mean);
    rep["posterior_sd"] = vector_to_json(run.diagnostics.sd);
    rep["acceptance_rates_per_level"] = run.diagnostics.acceptance_rates_per_level;
    rep["has_rmse"] = run.diagnostics.has_rmse;
    rep["rmse_vs_truth"] = run.diagnostics.rmse_vs_truth;
    rep["hf_calls"] = run.hf_calls;
    rep["lf_calls"] = run.lf_calls;
    rep["cache_hits"] = run.cache_hits;
    rep["cache_misses"] = run.cache_misses;
    rep["init_converged"] = run.init.converged;
    rep["init_iterations"] = run.init.iterations;
    rep["init_objective"] = run.init.objective;
    rep["init_theta0"] = vector_to_json(run.init.theta0);
    rep["init_seconds"] = run.init_seconds;
    rep["sampling_seconds"] = run.sampling_seconds;
    rep["offline_seconds"] = run.offline_seconds;
    rep["total_seconds"] = run.offline_seconds + run.init_seconds + run.sampling_seconds;
    write_file_atomic(run.run_dir + "/report.json", rep.dump(2) + "\n");
    return run;
}

void emit_report(const std::vector<std::string>& run_dirs, const std::string& out_dir) {
    if (run_dirs.empty()) throw std::invalid_argument("emit_report: no run directories given");
    ensure_directory(out_dir);
    nlohmann::json rows = nlohmann::json::array();
    std::string csv =
        "scheme,problem,converged,n_chains,samples_per_chain,max_rhat,min_ess,"
        "offline_seconds,init_seconds,sampling_seconds,total_seconds,time_per_ess,"
        "hf_calls,lf_calls_total,cache_hits_total,cache_misses_total,rmse_vs_truth\n";
    // Non-finite metrics (a degenerate run) serialize as JSON null; read them
    // back as infinity so the comparison stays well defined.
    auto dnum = [](const nlohmann::json& j, const char* key) {
        const auto& v = j.at(key);
        return v.is_number() ? v.get<double>() : std::numeric_limits<double>::infinity();
    };
    for (const auto& dir : run_dirs) {
        nlohmann::json rep = nlohmann::json::parse(read_file(dir + "/report.json"));
        long lf_total = 0;
        for (const auto& v : rep.value("lf_calls", nlohmann::json::array()))
            lf_total += v.get<long>();
        long hits = 0, misses = 0;
        for (const auto& v : rep.value("cache_hits", nlohmann::json::array()))
            hits += v.get<long>();
        for (const auto& v : rep.value("cache_misses", nlohmann::json::array()))
            misses += v.get<long>();

        nlohmann::json row;
        row["scheme"] = rep.at("scheme");
        row["problem"] = rep.at("problem");
        row["converged"] = rep.at("converged");
        row["n_chains"] = rep.at("n_chains");
        row["samples_per_chain"] = rep.at("samples_per_chain");
        row["max_rhat"] = dnum(rep, "max_rhat");
        row["min_ess"] = dnum(rep, "min_ess");
        row["offline_seconds"] = dnum(rep, "offline_seconds");
        row["init_seconds"] = dnum(rep, "init_seconds");
        row["sampling_seconds"] = dnum(rep, "sampling_seconds");
        row["total_seconds"] = dnum(rep, "total_seconds");
        row["time_per_ess"] = dnum(rep, "time_per_ess");
        row["hf_calls"] = rep.at("hf_calls");
        row["lf_calls_total"] = lf_total;
        row["cache_hits_total"] = hits;
        row["cache_misses_total"] = misses;
        row["rmse_vs_truth"] = dnum(rep, "rmse_vs_truth");
        rows.push_back(row);

        csv += rep.at("scheme").get<std::string>() + "," +
               rep.at("problem").get<std::string>() + "," +
               (rep.at("converged").get<bool>() ? "true" : "false") + "," +
               std::to_string(rep.at("n_chains").get<long>()) + "," +
               std::to_string(rep.at("samples_per_chain").get<long>()) + "," +
               fmt_double(dnum(rep, "max_rhat")) + "," + fmt_double(dnum(rep, "min_ess")) + "," +
               fmt_double(dnum(rep, "offline_seconds")) + "," +
               fmt_double(dnum(rep, "init_seconds")) + "," +
               fmt_double(dnum(rep, "sampling_seconds")) + "," +
               fmt_double(dnum(rep, "total_seconds")) + "," +
               fmt_double(dnum(rep, "time_per_ess")) + "," +
               std::to_string(rep.at("hf_calls").get<long>()) + "," + std::to_string(lf_total) +
               "," + std::to_string(hits) + "," + std::to_string(misses) + "," +
               fmt_double(dnum(rep, "rmse_vs_truth")) + "\n";
    }
    write_file_atomic(out_dir + "/comparison.json", rows.dump(2) + "\n");
    write_file_atomic(out_dir + "/comparison.csv", csv);
}

}  // namespace mfda::harness
