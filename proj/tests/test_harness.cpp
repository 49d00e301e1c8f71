#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "mfda/harness/config.hpp"
#include "mfda/harness/offline.hpp"
#include "mfda/harness/online.hpp"
#include "mfda/io/file_io.hpp"

using namespace mfda;
using namespace mfda::harness;

namespace {

std::string fresh_dir(const std::string& tag) {
    auto dir = std::filesystem::temp_directory_path() / ("mfda_harness_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

void fill_tables(ExperimentConfig& c) {
    for (Scheme s : {Scheme::mh, Scheme::mlda, Scheme::mfda})
        c.level_tables[s] = default_level_table(s, c.problem, c.n_lf_levels());
}

ExperimentConfig tiny_darcy(const std::string& out_dir) {
    ExperimentConfig c = preset("darcy-desk");
    c.darcy.lf_cells = {4, 6};
    c.darcy.hf_cells = 8;
    c.darcy.n_modes = 4;
    c.n_train = 8;
    c.n_chains = 2;
    c.sample_cap = 120;
    c.check_interval = 40;
    c.seed = 11;
    c.training.epochs = 8;
    c.training.batch_size = 4;
    c.output_dir = out_dir;
    fill_tables(c);
    return c;
}

ExperimentConfig tiny_rd(const std::string& out_dir) {
    ExperimentConfig c = preset("rd-desk");
    c.rd.lf_levels = {{8, 6}, {12, 12}};
    c.rd.hf_grid = 16;
    c.rd.hf_frames = 12;
    c.rd.t_end = 3.0;
    c.rd.pod_draws = 3;
    c.rd.pod_frame_stride = 2;
    c.rd.max_pod_rank = 6;
    c.n_train = 6;
    c.noise_sigma = 0.2;
    c.n_chains = 2;
    c.sample_cap = 60;
    c.check_interval = 30;
    c.seed = 5;
    c.training.epochs = 6;
    c.training.batch_size = 8;
    c.output_dir = out_dir;
    fill_tables(c);
    return c;
}

}  // namespace

TEST_CASE("config json round trip preserves every field") {
    ExperimentConfig c = preset("darcy-desk");
    c.seed = 99;
    c.n_train = 123;
    c.noise_sigma = 0.05;
    c.n_chains = 4;
    c.sample_cap = 5000;
    c.rhat_threshold = 1.02;
    c.check_interval = 250;
    c.burn_in_fraction = 0.25;
    c.output_dir = "somewhere/else";
    c.scheme = Scheme::mlda;
    c.theta_true = Eigen::VectorXd::LinSpaced(c.darcy.n_modes, -1.0, 1.0);
    c.level_tables[Scheme::mlda][0].subchain_length = 7;

    ExperimentConfig back = config_from_json(to_json(c));
    CHECK(back.problem == c.problem);
    CHECK(back.scheme == c.scheme);
    CHECK(back.seed == c.seed);
    CHECK(back.n_train == c.n_train);
    CHECK(back.noise_sigma == doctest::Approx(c.noise_sigma));
    CHECK(back.n_chains == c.n_chains);
    CHECK(back.sample_cap == c.sample_cap);
    CHECK(back.rhat_threshold == doctest::Approx(c.rhat_threshold));
    CHECK(back.check_interval == c.check_interval);
    CHECK(back.burn_in_fraction == doctest::Approx(c.burn_in_fraction));
    CHECK(back.output_dir == c.output_dir);
    CHECK(back.darcy == c.darcy);
    CHECK(back.rd == c.rd);
    CHECK(back.training == c.training);
    CHECK(back.level_tables == c.level_tables);
    REQUIRE(back.theta_true.size() == c.theta_true.size());
    CHECK((back.theta_true - c.theta_true).norm() == 0.0);

    const std::string dir = fresh_dir("config_rt");
    save_config(c, dir + "/config.json");
    ExperimentConfig loaded = load_config(dir + "/config.json");
    CHECK(loaded.level_tables == c.level_tables);
    CHECK(loaded.seed == c.seed);
}

TEST_CASE("every preset validates and matches its published ladder") {
    for (const auto& name : preset_names()) {
        ExperimentConfig c = preset(name);
        CHECK_NOTHROW(c.validate());
        CHECK(c.preset_name == name);
    }
    ExperimentConfig paper = preset("darcy-paper");
    CHECK(paper.n_train == 16000);
    CHECK(paper.darcy.lf_cells == std::vector<int>{5, 10, 25, 50});
    CHECK(paper.darcy.hf_cells == 100);
    std::vector<LevelEntry> mfda_expect{{"mf1", 10}, {"mf2", 2}, {"mf3", 1}, {"mf4", 0}};
    CHECK(paper.level_tables.at(Scheme::mfda) == mfda_expect);
    std::vector<LevelEntry> mlda_expect{{"lf1", 5}, {"lf2", 2}, {"lf3", 2}, {"lf4", 1}, {"hf", 0}};
    CHECK(paper.level_tables.at(Scheme::mlda) == mlda_expect);

    ExperimentConfig rd_paper = preset("rd-paper");
    CHECK(rd_paper.n_train == 500);
    REQUIRE(rd_paper.rd.lf_levels.size() == 3);
    CHECK(rd_paper.rd.lf_levels[2].grid == 64);
    CHECK(rd_paper.rd.hf_grid == 128);
    std::vector<LevelEntry> rd_mfda{{"mf1", 5}, {"mf2", 5}, {"mf3", 0}};
    CHECK(rd_paper.level_tables.at(Scheme::mfda) == rd_mfda);
}

TEST_CASE("malformed level tables are rejected") {
    ExperimentConfig c = preset("darcy-desk");

    SUBCASE("mh must be a single reference row") {
        c.level_tables[Scheme::mh] = {{"lf1", 5}, {"hf", 0}};
        CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    }
    SUBCASE("mlda must end at the reference solver") {
        c.level_tables[Scheme::mlda] = {{"lf1", 5}, {"lf2", 2}, {"lf3", 1}};
        CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    }
    SUBCASE("mlda rows must be consecutive coarse levels") {
        c.level_tables[Scheme::mlda] = {{"lf2", 5}, {"lf1", 2}, {"lf3", 1}, {"hf", 0}};
        CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    }
    SUBCASE("mfda rows may not name solvers") {
        c.level_tables[Scheme::mfda] = {{"lf1", 10}, {"mf2", 2}, {"mf3", 0}};
        CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    }
    SUBCASE("sub-chain lengths below the top must be positive") {
        c.level_tables[Scheme::mfda] = {{"mf1", 0}, {"mf2", 2}, {"mf3", 0}};
        CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    }
    SUBCASE("ladder depth must match the configured solvers") {
        c.level_tables[Scheme::mfda] = {{"mf1", 10}, {"mf2", 0}};
        CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    }
}

TEST_CASE("dataset generation is deterministic in the seed") {
    ExperimentConfig a = tiny_darcy(fresh_dir("gen_a"));
    ExperimentConfig b = tiny_darcy(fresh_dir("gen_b"));
    DatasetManifest ma = generate_dataset(a);
    DatasetManifest mb = generate_dataset(b);
    CHECK(ma.hashes == mb.hashes);
    CHECK(ma.n_train == a.n_train);
    CHECK(ma.level_files.size() == 2);

    ExperimentConfig c = tiny_darcy(fresh_dir("gen_c"));
    c.seed = 12;
    DatasetManifest mc = generate_dataset(c);
    CHECK(mc.hashes.at(mc.theta_file) != ma.hashes.at(ma.theta_file));

    Eigen::MatrixXd theta = read_matrix_binary(dataset_dir(a) + "/" + ma.theta_file);
    CHECK(theta.rows() == a.darcy.n_modes);
    CHECK(theta.cols() == a.n_train);
    Eigen::MatrixXd hf = read_matrix_binary(dataset_dir(a) + "/" + ma.hf_file);
    CHECK(hf.rows() == 25);  // 5x5 sensor grid
    CHECK(hf.cols() == a.n_train);

    DatasetManifest reloaded = load_manifest(dataset_dir(a));
    CHECK(reloaded.hashes == ma.hashes);
    CHECK_NOTHROW(verify_manifest(reloaded, dataset_dir(a)));
}

TEST_CASE("manifest verification detects a tampered file") {
    ExperimentConfig c = tiny_darcy(fresh_dir("tamper"));
    DatasetManifest m = generate_dataset(c);
    const std::string victim = dataset_dir(c) + "/" + m.level_files[0];
    std::string bytes = read_file(victim);
    bytes[bytes.size() / 2] = static_cast<char>(~bytes[bytes.size() / 2]);
    write_file_atomic(victim, bytes);
    CHECK_THROWS_AS(verify_manifest(m, dataset_dir(c)), std::runtime_error);
}

TEST_CASE("training writes one loadable surrogate per level") {
    ExperimentConfig c = tiny_darcy(fresh_dir("train"));
    DatasetManifest m = generate_dataset(c);
    std::vector<std::string> paths = train_surrogates(c, m);
    REQUIRE(paths.size() == 2);
    for (const auto& p : paths) CHECK(std::filesystem::exists(p));
    CHECK(std::filesystem::exists(surrogate_dir(c) + "/training_summary.json"));

    SurrogateStack stack = load_surrogates(c);
    REQUIRE(stack.n_levels() == 2);
    ProblemBundle bundle(c);
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(bundle.param_dim());
    for (int l = 1; l <= 2; ++l) {
        Eigen::VectorXd pred = mf_predictor(bundle, stack, l)(theta);
        REQUIRE(pred.size() == bundle.obs_dim());
        CHECK(pred.allFinite());
    }
    auto acc = evaluate_surrogates(bundle, stack, 4, 77);
    REQUIRE(acc.size() == 2);
    for (const auto& a : acc) {
        CHECK(std::isfinite(a.lf_rmse));
        CHECK(std::isfinite(a.mf_rmse));
        CHECK(a.lf_rmse > 0.0);
    }

    SUBCASE("a scale mismatch aborts training") {
        ExperimentConfig other = c;
        other.n_train = c.n_train + 1;
        CHECK_THROWS_AS(train_surrogates(other, m), std::invalid_argument);
    }
}

TEST_CASE("synthesized observations honor the noise model and persist") {
    ExperimentConfig c = tiny_darcy(fresh_dir("obs"));
    c.theta_true = Eigen::VectorXd::Constant(c.darcy.n_modes, 0.3);

    SUBCASE("zero noise reproduces the reference output exactly") {
        c.noise_sigma = 0.0;
        Observations obs = synthesize_observations(c);
        ProblemBundle bundle(c);
        Eigen::VectorXd exact = bundle.hf_observation()(c.theta_true);
        CHECK((obs.y - exact).norm() == 0.0);
    }
    SUBCASE("noise has the configured scale and the record round trips") {
        c.noise_sigma = 0.05;
        Observations obs = synthesize_observations(c);
        ProblemBundle bundle(c);
        Eigen::VectorXd exact = bundle.hf_observation()(c.theta_true);
        Eigen::VectorXd eps = obs.y - exact;
        CHECK(eps.norm() > 0.0);
        double sd = std::sqrt(eps.squaredNorm() / eps.size());
        CHECK(sd > 0.01);
        CHECK(sd < 0.15);

        Observations back = load_observations(observations_dir(c));
        CHECK((back.y - obs.y).norm() == 0.0);
        CHECK((back.theta_true - obs.theta_true).norm() == 0.0);
        CHECK(back.noise_sigma == doctest::Approx(obs.noise_sigma));
        CHECK(back.seed == obs.seed);
    }
}

TEST_CASE("inference emits complete artifacts for every scheme") {
    ExperimentConfig c = tiny_darcy(fresh_dir("infer"));
    DatasetManifest m = generate_dataset(c);
    train_surrogates(c, m);
    c.theta_true = Eigen::VectorXd::Constant(c.darcy.n_modes, 0.2);
    Observations obs = synthesize_observations(c);

    std::vector<std::string> run_dirs;
    for (Scheme s : {Scheme::mh, Scheme::mlda, Scheme::mfda}) {
        c.scheme = s;
        InferenceRun run = run_inference(c, obs);
        run_dirs.push_back(run.run_dir);
        CHECK(run.samples_per_chain > 0);
        CHECK(static_cast<int>(run.chains.size()) == c.n_chains);
        for (int ch = 0; ch < c.n_chains; ++ch) {
            CHECK(std::filesystem::exists(run.run_dir + "/chain_" + std::to_string(ch) + ".csv"));
            CHECK(std::filesystem::exists(run.run_dir + "/chain_" + std::to_string(ch) +
                                          ".meta.json"));
        }
        for (const char* f : {"report.json", "histogram.csv", "parameter_error.csv",
                              "config.json"})
            CHECK(std::filesystem::exists(run.run_dir + "/" + f));
        nlohmann::json rep = nlohmann::json::parse(read_file(run.run_dir + "/report.json"));
        CHECK(rep.at("scheme").get<std::string>() == to_string(s));
        if (s == Scheme::mfda) {
            CHECK(run.hf_calls == 0);
            REQUIRE(run.cache_misses.size() == run.lf_calls.size());
            for (std::size_t l = 0; l < run.lf_calls.size(); ++l)
                CHECK(run.cache_misses[l] == run.lf_calls[l]);
            CHECK(run.offline_seconds > 0.0);
        } else {
            CHECK(run.hf_calls > 0);
        }
    }

    SUBCASE("comparison replay is byte identical") {
        const std::string out_a = c.output_dir + "/report_a";
        const std::string out_b = c.output_dir + "/report_b";
        emit_report(run_dirs, out_a);
        emit_report(run_dirs, out_b);
        CHECK(read_file(out_a + "/comparison.csv") == read_file(out_b + "/comparison.csv"));
        CHECK(read_file(out_a + "/comparison.json") == read_file(out_b + "/comparison.json"));
        std::string csv = read_file(out_a + "/comparison.csv");
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);  // header + one row per scheme
    }
}

TEST_CASE("exact observations are rejected by inference") {
    ExperimentConfig c = tiny_darcy(fresh_dir("exact_obs"));
    c.noise_sigma = 0.0;
    c.theta_true = Eigen::VectorXd::Zero(c.darcy.n_modes);
    Observations obs = synthesize_observations(c);
    c.scheme = Scheme::mh;
    CHECK_THROWS_AS(run_inference(c, obs), std::invalid_argument);
}

TEST_CASE("kinetics pipeline runs end to end at miniature scale") {
    ExperimentConfig c = tiny_rd(fresh_dir("rd_mini"));
    DatasetManifest m = generate_dataset(c);
    CHECK(m.pod_rank > 0);
    CHECK(m.pod_rank <= c.rd.max_pod_rank);
    CHECK(std::filesystem::exists(dataset_dir(c) + "/" + m.pod_file));
    Eigen::MatrixXd z = read_matrix_binary(dataset_dir(c) + "/" + m.level_files[0]);
    CHECK(z.rows() == m.pod_rank * c.rd.hf_frames);
    CHECK(z.cols() == c.n_train);

    train_surrogates(c, m);
    SurrogateStack stack = load_surrogates(c);
    REQUIRE(stack.n_levels() == 2);
    REQUIRE(stack.basis != nullptr);
    CHECK(stack.observation_rows.rows() == 2 * 169);  // 13x13 sensors, two species
    CHECK(stack.observation_rows.cols() == m.pod_rank);

    ProblemBundle bundle(c);
    Eigen::VectorXd theta(2);
    theta << 1.0, 0.05;
    Eigen::VectorXd pred = mf_predictor(bundle, stack, 2)(theta);
    REQUIRE(pred.size() == bundle.obs_dim());
    CHECK(pred.allFinite());

    c.theta_true = theta;
    Observations obs = synthesize_observations(c);
    c.scheme = Scheme::mfda;
    InferenceRun run = run_inference(c, obs);
    CHECK(run.hf_calls == 0);
    CHECK(run.samples_per_chain > 0);
    CHECK(std::filesystem::exists(run.run_dir + "/report.json"));
}
