#include "mfda/harness/config.hpp"

#include <algorithm>
#include <stdexcept>

#include "mfda/io/file_io.hpp"

namespace mfda::harness {

std::string to_string(Problem p) {
    return p == Problem::darcy ? "darcy" : "reaction-diffusion";
}

std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::mh: return "mh";
        case Scheme::mlda: return "mlda";
        default: return "mfda";
    }
}

Problem problem_from_string(const std::string& s) {
    if (s == "darcy") return Problem::darcy;
    if (s == "reaction-diffusion" || s == "rd") return Problem::reaction_diffusion;
    throw std::invalid_argument("unknown problem: " + s);
}

Scheme scheme_from_string(const std::string& s) {
    if (s == "mh") return Scheme::mh;
    if (s == "mlda") return Scheme::mlda;
    if (s == "mfda") return Scheme::mfda;
    throw std::invalid_argument("unknown scheme: " + s);
}

namespace {

/// Splits a forward label into its family ("lf", "hf", "mf") and 1-based
/// level index (0 for "hf"). Throws on anything else.
std::pair<std::string, int> parse_forward_label(const std::string& label) {
    if (label == "hf") return {"hf", 0};
    if (label.size() >= 3 && (label.substr(0, 2) == "lf" || label.substr(0, 2) == "mf")) {
        const std::string digits = label.substr(2);
        if (std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
            int idx = std::stoi(digits);
            if (idx >= 1) return {label.substr(0, 2), idx};
        }
    }
    throw std::invalid_argument("unknown forward label: " + label);
}

void validate_level_table(Scheme scheme, const std::vector<LevelEntry>& table, int n_lf) {
    const std::string where = "level table (" + to_string(scheme) + "): ";
    if (table.empty()) throw std::invalid_argument(where + "empty");
    for (std::size_t i = 0; i + 1 < table.size(); ++i)
        if (table[i].subchain_length < 1)
            throw std::invalid_argument(where + "sub-chain lengths below the top must be >= 1");

    switch (scheme) {
        case Scheme::mh: {
            if (table.size() != 1 || table[0].forward != "hf")
                throw std::invalid_argument(where + "expected the single row {hf}");
            break;
        }
        case Scheme::mlda: {
            if (static_cast<int>(table.size()) != n_lf + 1)
                throw std::invalid_argument(where + "expected " + std::to_string(n_lf) +
                                            " lf rows followed by hf");
            for (int i = 0; i < n_lf; ++i) {
                auto [kind, idx] = parse_forward_label(table[i].forward);
                if (kind != "lf" || idx != i + 1)
                    throw std::invalid_argument(where + "row " + std::to_string(i + 1) +
                                                " must be lf" + std::to_string(i + 1));
            }
            if (table.back().forward != "hf")
                throw std::invalid_argument(where + "top row must be hf");
            break;
        }
        case Scheme::mfda: {
            if (static_cast<int>(table.size()) != n_lf)
                throw std::invalid_argument(where + "expected one mf row per coarse solver (" +
                                            std::to_string(n_lf) + ")");
            for (int i = 0; i < n_lf; ++i) {
                auto [kind, idx] = parse_forward_label(table[i].forward);
                if (kind != "mf" || idx != i + 1)
                    throw std::invalid_argument(where + "row " + std::to_string(i + 1) +
                                                " must be mf" + std::to_string(i + 1));
            }
            break;
        }
    }
}

}  // namespace

int ExperimentConfig::n_lf_levels() const {
    return problem == Problem::darcy ? static_cast<int>(darcy.lf_cells.size())
                                     : static_cast<int>(rd.lf_levels.size());
}

int ExperimentConfig::parameter_dim() const {
    return problem == Problem::darcy ? darcy.n_modes : 2;
}

const std::vector<LevelEntry>& ExperimentConfig::active_levels() const {
    auto it = level_tables.find(scheme);
    if (it == level_tables.end())
        throw std::invalid_argument("config has no level table for scheme " + to_string(scheme));
    return it->second;
}

void ExperimentConfig::validate() const {
    if (n_train < 1) throw std::invalid_argument("n_train must be >= 1");
    if (noise_sigma < 0.0) throw std::invalid_argument("noise_sigma must be >= 0");
    if (n_chains < 1) throw std::invalid_argument("n_chains must be >= 1");
    if (sample_cap < 1) throw std::invalid_argument("sample_cap must be >= 1");
    if (rhat_threshold <= 1.0) throw std::invalid_argument("rhat_threshold must exceed 1");
    if (check_interval < 1) throw std::invalid_argument("check_interval must be >= 1");
    if (burn_in_fraction < 0.0 || burn_in_fraction >= 1.0)
        throw std::invalid_argument("burn_in_fraction must lie in [0, 1)");
    if (output_dir.empty()) throw std::invalid_argument("output_dir must be set");

    if (problem == Problem::darcy) {
        if (darcy.lf_cells.empty()) throw std::invalid_argument("darcy.lf_cells must be nonempty");
        for (std::size_t i = 0; i < darcy.lf_cells.size(); ++i) {
            if (darcy.lf_cells[i] < 2) throw std::invalid_argument("darcy meshes need >= 2 cells");
            if (i > 0 && darcy.lf_cells[i] <= darcy.lf_cells[i - 1])
                throw std::invalid_argument("darcy.lf_cells must be strictly ascending");
        }
        if (darcy.hf_cells < darcy.lf_cells.back())
            throw std::invalid_argument("darcy.hf_cells must not be coarser than the finest lf");
        if (darcy.n_modes < 1) throw std::invalid_argument("darcy.n_modes must be >= 1");
        if (darcy.sigma <= 0.0 || darcy.corr_length <= 0.0)
            throw std::invalid_argument("darcy field parameters must be positive");
    } else {
        if (rd.lf_levels.empty()) throw std::invalid_argument("rd.lf_levels must be nonempty");
        for (std::size_t i = 0; i < rd.lf_levels.size(); ++i) {
            const auto& lvl = rd.lf_levels[i];
            if (lvl.grid < 4 || lvl.grid % 2 != 0)
                throw std::invalid_argument("rd grids must be even and >= 4");
            if (lvl.frames < 1) throw std::invalid_argument("rd frame counts must be >= 1");
            if (lvl.grid > rd.hf_grid || lvl.frames > rd.hf_frames)
                throw std::invalid_argument("rd coarse levels must not exceed the reference");
            if (i > 0 && lvl.grid <= rd.lf_levels[i - 1].grid)
                throw std::invalid_argument("rd.lf_levels must have strictly ascending grids");
        }
        if (rd.hf_grid < 4 || rd.hf_grid % 2 != 0)
            throw std::invalid_argument("rd.hf_grid must be even and >= 4");
        if (rd.t_end <= 0.0 || rd.max_internal_dt <= 0.0)
            throw std::invalid_argument("rd time parameters must be positive");
        if (!(rd.prior_lower.array() < rd.prior_upper.array()).all())
            throw std::invalid_argument("rd prior box must have lower < upper");
        if (rd.pod_energy <= 0.0 || rd.pod_energy > 1.0)
            throw std::invalid_argument("rd.pod_energy must lie in (0, 1]");
        if (rd.pod_draws < 1 || rd.pod_frame_stride < 1 || rd.max_pod_rank < 1)
            throw std::invalid_argument("rd reduced-basis settings must be positive");
    }

    if (training.epochs < 0 || training.batch_size < 1 || training.learning_rate <= 0.0 ||
        training.validation_fraction < 0.0 || training.validation_fraction >= 1.0)
        throw std::invalid_argument("bad training parameters");

    if (theta_true.size() != 0 && theta_true.size() != parameter_dim())
        throw std::invalid_argument("theta_true has the wrong dimension");

    if (level_tables.find(scheme) == level_tables.end())
        throw std::invalid_argument("missing level table for the active scheme");
    for (const auto& [s, table] : level_tables) validate_level_table(s, table, n_lf_levels());
}

std::vector<LevelEntry> default_level_table(Scheme scheme, Problem problem, int n_lf_levels) {
    if (n_lf_levels < 1) throw std::invalid_argument("need at least one coarse level");
    std::vector<LevelEntry> table;
    auto prefix = [&](const std::vector<int>& base, int count) {
        std::vector<int> out;
        for (int i = 0; i < count; ++i)
            out.push_back(i < static_cast<int>(base.size()) ? base[i] : base.back());
        return out;
    };
    switch (scheme) {
        case Scheme::mh:
            table.push_back({"hf", 0});
            break;
        case Scheme::mlda: {
            const std::vector<int> base = problem == Problem::darcy ? std::vector<int>{5, 2, 2, 1}
                                                                    : std::vector<int>{5, 5, 1};
            auto sub = prefix(base, n_lf_levels);
            for (int i = 0; i < n_lf_levels; ++i)
                table.push_back({"lf" + std::to_string(i + 1), sub[i]});
            table.push_back({"hf", 0});
            break;
        }
        case Scheme::mfda: {
            const std::vector<int> base =
                problem == Problem::darcy ? std::vector<int>{10, 2, 1} : std::vector<int>{5, 5};
            auto sub = prefix(base, n_lf_levels - 1);
            for (int i = 0; i + 1 < n_lf_levels; ++i)
                table.push_back({"mf" + std::to_string(i + 1), sub[i]});
            table.push_back({"mf" + std::to_string(n_lf_levels), 0});
            break;
        }
    }
    return table;
}

namespace {

void fill_all_level_tables(ExperimentConfig& c) {
    for (Scheme s : {Scheme::mh, Scheme::mlda, Scheme::mfda})
        c.level_tables[s] = default_level_table(s, c.problem, c.n_lf_levels());
}

}  // namespace

std::vector<std::string> preset_names() {
    return {"darcy-desk", "darcy-paper", "rd-desk", "rd-paper"};
}

ExperimentConfig preset(const std::string& name) {
    ExperimentConfig c;
    c.preset_name = name;
    if (name == "darcy-desk") {
        c.problem = Problem::darcy;
        c.darcy = DarcyScale{};  // lf {5, 10, 25}, hf 50
        c.n_train = 2000;
        c.noise_sigma = 0.01;
        c.training.epochs = 400;
    } else if (name == "darcy-paper") {
        c.problem = Problem::darcy;
        c.darcy.lf_cells = {5, 10, 25, 50};
        c.darcy.hf_cells = 100;
        c.n_train = 16000;
        c.noise_sigma = 0.01;
        c.training.epochs = 400;
    } else if (name == "rd-desk") {
        c.problem = Problem::reaction_diffusion;
        c.rd = RdScale{};  // lf {16/50, 32/100}, hf 64/250
        c.rd.pod_frame_stride = 5;
        c.n_train = 160;
        c.noise_sigma = 0.2;
        c.training.epochs = 40;
    } else if (name == "rd-paper") {
        c.problem = Problem::reaction_diffusion;
        c.rd.lf_levels = {{16, 50}, {32, 100}, {64, 250}};
        c.rd.hf_grid = 128;
        c.rd.hf_frames = 250;
        c.n_train = 500;
        c.noise_sigma = 0.2;
        c.training.epochs = 200;
    } else {
        throw std::invalid_argument("unknown preset: " + name);
    }
    fill_all_level_tables(c);
    if (name == "rd-desk") {
        // The two-solver ladder keeps the coarse sub-chain at 5 and promotes
        // proposals through the finer solver one at a time, so the coarse
        // evaluations per fine proposal match the mfda table.
        c.level_tables[Scheme::mlda] = {{"lf1", 5}, {"lf2", 1}, {"hf", 0}};
    }
    c.validate();
    return c;
}

namespace {

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& arr) {
    Eigen::VectorXd v(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) v[static_cast<Eigen::Index>(i)] = arr[i];
    return v;
}

nlohmann::json table_to_json(const std::vector<LevelEntry>& table) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& e : table)
        rows.push_back({{"forward", e.forward}, {"subchain", e.subchain_length}});
    return rows;
}

std::vector<LevelEntry> table_from_json(const nlohmann::json& rows) {
    std::vector<LevelEntry> table;
    for (const auto& r : rows)
        table.push_back({r.at("forward").get<std::string>(), r.value("subchain", 0)});
    return table;
}

}  // namespace

nlohmann::json to_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["problem"] = to_string(c.problem);
    j["scheme"] = to_string(c.scheme);
    nlohmann::json tables;
    for (const auto& [s, table] : c.level_tables) tables[to_string(s)] = table_to_json(table);
    j["levels"] = tables;
    j["n_train"] = c.n_train;
    j["noise_sigma"] = c.noise_sigma;
    j["seed"] = c.seed;
    j["n_chains"] = c.n_chains;
    j["sample_cap"] = c.sample_cap;
    j["rhat_threshold"] = c.rhat_threshold;
    j["check_interval"] = c.check_interval;
    j["burn_in_fraction"] = c.burn_in_fraction;
    j["output_dir"] = c.output_dir;
    if (!c.preset_name.empty()) j["preset"] = c.preset_name;
    j["darcy"] = {{"lf_cells", c.darcy.lf_cells},
                  {"hf_cells", c.darcy.hf_cells},
                  {"n_modes", c.darcy.n_modes},
                  {"mean_log_t", c.darcy.mean_log_t},
                  {"sigma", c.darcy.sigma},
                  {"corr_length", c.darcy.corr_length}};
    nlohmann::json rd_levels = nlohmann::json::array();
    for (const auto& lvl : c.rd.lf_levels)
        rd_levels.push_back({{"grid", lvl.grid}, {"frames", lvl.frames}});
    j["rd"] = {{"lf_levels", rd_levels},
               {"hf_grid", c.rd.hf_grid},
               {"hf_frames", c.rd.hf_frames},
               {"t_end", c.rd.t_end},
               {"max_internal_dt", c.rd.max_internal_dt},
               {"prior_lower", {c.rd.prior_lower[0], c.rd.prior_lower[1]}},
               {"prior_upper", {c.rd.prior_upper[0], c.rd.prior_upper[1]}},
               {"pod_energy", c.rd.pod_energy},
               {"pod_draws", c.rd.pod_draws},
               {"pod_frame_stride", c.rd.pod_frame_stride},
               {"max_pod_rank", c.rd.max_pod_rank}};
    j["training"] = {{"epochs", c.training.epochs},
                     {"batch_size", c.training.batch_size},
                     {"learning_rate", c.training.learning_rate},
                     {"validation_fraction", c.training.validation_fraction}};
    if (c.theta_true.size() > 0) j["theta_true"] = vector_to_json(c.theta_true);
    return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    c.problem = problem_from_string(j.at("problem").get<std::string>());
    c.scheme = scheme_from_string(j.value("scheme", "mfda"));
    c.n_train = j.value("n_train", c.n_train);
    c.noise_sigma = j.value("noise_sigma", c.noise_sigma);
    c.seed = j.value("seed", c.seed);
    c.n_chains = j.value("n_chains", c.n_chains);
    c.sample_cap = j.value("sample_cap", c.sample_cap);
    c.rhat_threshold = j.value("rhat_threshold", c.rhat_threshold);
    c.check_interval = j.value("check_interval", c.check_interval);
    c.burn_in_fraction = j.value("burn_in_fraction", c.burn_in_fraction);
    c.output_dir = j.value("output_dir", c.output_dir);
    c.preset_name = j.value("preset", std::string());
    if (j.contains("darcy")) {
        const auto& d = j.at("darcy");
        c.darcy.lf_cells = d.value("lf_cells", c.darcy.lf_cells);
        c.darcy.hf_cells = d.value("hf_cells", c.darcy.hf_cells);
        c.darcy.n_modes = d.value("n_modes", c.darcy.n_modes);
        c.darcy.mean_log_t = d.value("mean_log_t", c.darcy.mean_log_t);
        c.darcy.sigma = d.value("sigma", c.darcy.sigma);
        c.darcy.corr_length = d.value("corr_length", c.darcy.corr_length);
    }
    if (j.contains("rd")) {
        const auto& r = j.at("rd");
        if (r.contains("lf_levels")) {
            c.rd.lf_levels.clear();
            for (const auto& lvl : r.at("lf_levels"))
                c.rd.lf_levels.push_back({lvl.at("grid").get<int>(), lvl.at("frames").get<int>()});
        }
        c.rd.hf_grid = r.value("hf_grid", c.rd.hf_grid);
        c.rd.hf_frames = r.value("hf_frames", c.rd.hf_frames);
        c.rd.t_end = r.value("t_end", c.rd.t_end);
        c.rd.max_internal_dt = r.value("max_internal_dt", c.rd.max_internal_dt);
        if (r.contains("prior_lower"))
            c.rd.prior_lower = {r.at("prior_lower")[0].get<double>(),
                                r.at("prior_lower")[1].get<double>()};
        if (r.contains("prior_upper"))
            c.rd.prior_upper = {r.at("prior_upper")[0].get<double>(),
                                r.at("prior_upper")[1].get<double>()};
        c.rd.pod_energy = r.value("pod_energy", c.rd.pod_energy);
        c.rd.pod_draws = r.value("pod_draws", c.rd.pod_draws);
        c.rd.pod_frame_stride = r.value("pod_frame_stride", c.rd.pod_frame_stride);
        c.rd.max_pod_rank = r.value("max_pod_rank", c.rd.max_pod_rank);
    }
    if (j.contains("training")) {
        const auto& t = j.at("training");
        c.training.epochs = t.value("epochs", c.training.epochs);
        c.training.batch_size = t.value("batch_size", c.training.batch_size);
        c.training.learning_rate = t.value("learning_rate", c.training.learning_rate);
        c.training.validation_fraction =
            t.value("validation_fraction", c.training.validation_fraction);
    }
    // Schemes the document does not list keep their default tables, so a
    // config may pin only the ladder it cares about.
    fill_all_level_tables(c);
    if (j.contains("levels")) {
        for (const auto& [key, rows] : j.at("levels").items())
            c.level_tables[scheme_from_string(key)] = table_from_json(rows);
    }
    if (j.contains("theta_true")) c.theta_true = vector_from_json(j.at("theta_true"));
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    return config_from_json(nlohmann::json::parse(read_file(path)));
}

void save_config(const ExperimentConfig& config, const std::string& path) {
    write_file_atomic(path, to_json(config).dump(2) + "\n");
}

}  // namespace mfda::harness
