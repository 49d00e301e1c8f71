#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mfda/harness/config.hpp"
#include "mfda/harness/offline.hpp"
#include "mfda/harness/online.hpp"

namespace {

using mfda::harness::ExperimentConfig;

struct CommonOpts {
    std::string config_path;
    std::string preset_name;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_given = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    auto* config = cmd->add_option("--config", opts.config_path, "Experiment config JSON file");
    auto* preset = cmd->add_option("--preset", opts.preset_name,
                                   "Named setup: " + [] {
                                       std::string s;
                                       for (const auto& n : mfda::harness::preset_names())
                                           s += (s.empty() ? "" : ", ") + n;
                                       return s;
                                   }());
    config->excludes(preset);
    cmd->add_option("--seed", opts.seed, "Override the config seed")
        ->each([&opts](const std::string&) { opts.seed_given = true; });
    cmd->add_option("--out", opts.out_dir, "Override the config output directory");
}

ExperimentConfig resolve_config(const CommonOpts& opts) {
    ExperimentConfig config;
    if (!opts.config_path.empty())
        config = mfda::harness::load_config(opts.config_path);
    else if (!opts.preset_name.empty())
        config = mfda::harness::preset(opts.preset_name);
    else
        throw CLI::ValidationError("either --config or --preset is required");
    if (opts.seed_given) config.seed = opts.seed;
    if (!opts.out_dir.empty()) config.output_dir = opts.out_dir;
    config.validate();
    return config;
}

int cmd_generate_data(const CommonOpts& opts) {
    ExperimentConfig config = resolve_config(opts);
    auto manifest = mfda::harness::generate_dataset(config);
    std::cout << "dataset: " << mfda::harness::dataset_dir(config) << "\n"
              << "  draws: " << manifest.n_train << " (" << manifest.n_resampled
              << " resampled)\n"
              << "  levels: " << manifest.level_files.size() << "\n";
    if (manifest.pod_rank > 0) std::cout << "  reduced rank: " << manifest.pod_rank << "\n";
    std::cout << "  seconds: " << manifest.generation_seconds << "\n";
    return 0;
}

int cmd_train(const CommonOpts& opts) {
    ExperimentConfig config = resolve_config(opts);
    auto manifest = mfda::harness::load_manifest(mfda::harness::dataset_dir(config));
    auto paths = mfda::harness::train_surrogates(config, manifest);
    std::cout << "trained " << paths.size() << " level surrogates:\n";
    for (const auto& p : paths) std::cout << "  " << p << "\n";
    return 0;
}

int cmd_synthesize_obs(const CommonOpts& opts) {
    ExperimentConfig config = resolve_config(opts);
    auto obs = mfda::harness::synthesize_observations(config);
    std::cout << "observations: " << mfda::harness::observations_dir(config) << "\n"
              << "  components: " << obs.y.size() << "\n"
              << "  noise sigma: " << obs.noise_sigma << "\n"
              << "  truth dim: " << obs.theta_true.size() << "\n";
    return 0;
}

int cmd_sample(const CommonOpts& opts, const std::string& scheme_override) {
    ExperimentConfig config = resolve_config(opts);
    if (!scheme_override.empty()) {
        config.scheme = mfda::harness::scheme_from_string(scheme_override);
        config.validate();
    }
    auto obs = mfda::harness::load_observations(mfda::harness::observations_dir(config));
    auto run = mfda::harness::run_inference(config, obs);
    std::cout << "scheme: " << mfda::harness::to_string(run.scheme) << "\n"
              << "  chains: " << run.chains.size() << " x " << run.samples_per_chain
              << " samples\n"
              << "  converged: " << (run.converged ? "yes" : "no")
              << " (max rhat " << run.max_rhat << ")\n"
              << "  min ess: " << run.diagnostics.min_ess << "\n"
              << "  time per ess: " << run.diagnostics.time_per_ess << " s\n"
              << "  reference-solver calls: " << run.hf_calls << "\n";
    if (run.diagnostics.has_rmse)
        std::cout << "  parameter rmse: " << run.diagnostics.rmse_vs_truth << "\n";
    std::cout << "  artifacts: " << run.run_dir << "\n";
    return 0;
}

int cmd_report(const CommonOpts& opts, std::vector<std::string> run_dirs,
               const std::string& report_out) {
    if (run_dirs.empty()) {
        // Default: every scheme directory present under the config's runs/.
        ExperimentConfig config = resolve_config(opts);
        for (const char* scheme : {"mh", "mlda", "mfda"}) {
            std::string dir = config.output_dir + "/runs/" + scheme;
            if (std::filesystem::exists(dir + "/report.json")) run_dirs.push_back(dir);
        }
        if (run_dirs.empty())
            throw std::runtime_error("no completed runs under " + config.output_dir + "/runs");
    }
    std::string out = report_out;
    if (out.empty()) {
        out = !opts.out_dir.empty() ? opts.out_dir + "/report"
                                    : std::filesystem::path(run_dirs.front())
                                          .parent_path()
                                          .parent_path()
                                          .string() +
                                          "/report";
    }
    mfda::harness::emit_report(run_dirs, out);
    std::cout << "comparison written to " << out << "/comparison.{csv,json}\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multilevel sampling toolkit for PDE-constrained Bayesian inversion"};
    app.require_subcommand(1);

    CommonOpts gen_opts, train_opts, obs_opts, sample_opts, report_opts;
    std::string scheme_override;
    std::vector<std::string> report_runs;
    std::string report_out;

    auto* gen = app.add_subcommand("generate-data",
                                   "Draw training parameters and run every solver level");
    add_common(gen, gen_opts);
    auto* train = app.add_subcommand("train", "Fit one fused surrogate per coarse level");
    add_common(train, train_opts);
    auto* synth = app.add_subcommand("synthesize-obs",
                                     "Generate noisy observations from a known parameter");
    add_common(synth, obs_opts);
    auto* sample = app.add_subcommand("sample", "Run posterior sampling for the chosen scheme");
    add_common(sample, sample_opts);
    sample->add_option("--scheme", scheme_override, "Override the config scheme (mh, mlda, mfda)");
    auto* report = app.add_subcommand("report", "Aggregate finished runs into a comparison table");
    add_common(report, report_opts);
    report->add_option("--runs", report_runs, "Run directories to aggregate");
    report->add_option("--report-out", report_out, "Directory for the comparison files");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_generate_data(gen_opts);
        if (train->parsed()) return cmd_train(train_opts);
        if (synth->parsed()) return cmd_synthesize_obs(obs_opts);
        if (sample->parsed()) return cmd_sample(sample_opts, scheme_override);
        if (report->parsed()) return cmd_report(report_opts, report_runs, report_out);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
