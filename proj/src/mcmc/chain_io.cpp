#include "mfda/mcmc/chain_io.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "mfda/io/file_io.hpp"

namespace mfda {

namespace {

void append_double(std::string& out, double v) {
    char buf[32];
    int n = std::snprintf(buf, sizeof(buf), "%.17g", v);
    out.append(buf, static_cast<std::size_t>(n));
}

}  // namespace

void write_chain_csv(const Chain& chain, const std::string& path) {
    const int dim = chain.dim();
    std::string out;
    out.reserve(static_cast<std::size_t>(chain.length()) * (dim + 2) * 24 + 64);
    out += "iter";
    for (int d = 0; d < dim; ++d) {
        out += ",theta_";
        out += std::to_string(d);
    }
    out += ",log_like,accepted\n";
    for (int i = 0; i < chain.length(); ++i) {
        out += std::to_string(i);
        for (int d = 0; d < dim; ++d) {
            out += ',';
            append_double(out, chain.samples[i][d]);
        }
        out += ',';
        append_double(out, chain.log_likelihoods[i]);
        out += ',';
        out += chain.accepted[i] ? '1' : '0';
        out += '\n';
    }
    write_file_atomic(path, out);
}

Chain read_chain_csv(const std::string& path) {
    std::istringstream in(read_file(path));
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("read_chain_csv: empty file " + path);
    int columns = 1;
    for (char c : line) columns += (c == ',');
    const int dim = columns - 3;
    if (dim < 1) throw std::runtime_error("read_chain_csv: malformed header in " + path);

    Chain chain;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        std::getline(row, cell, ',');  // iter, unused
        Eigen::VectorXd theta(dim);
        for (int d = 0; d < dim; ++d) {
            std::getline(row, cell, ',');
            theta[d] = std::stod(cell);
        }
        std::getline(row, cell, ',');
        chain.log_likelihoods.push_back(std::stod(cell));
        std::getline(row, cell, ',');
        chain.accepted.push_back(cell == "1" ? 1 : 0);
        chain.samples.push_back(std::move(theta));
    }
    return chain;
}

void write_chain_sidecar(const Chain& chain, const std::string& path) {
    nlohmann::json j;
    j["n_samples"] = chain.length();
    j["dim"] = chain.dim();
    j["seed"] = chain.seed;
    j["wall_time_seconds"] = chain.wall_time_seconds;
    j["proposals_per_level"] = chain.proposals_per_level;
    j["accepts_per_level"] = chain.accepts_per_level;
    j["acceptance_rates_per_level"] = chain.acceptance_rates();
    write_file_atomic(path, j.dump(2) + "\n");
}

}  // namespace mfda
