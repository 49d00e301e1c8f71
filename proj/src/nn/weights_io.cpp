#include "mfda/nn/weights_io.hpp"

#include <stdexcept>
#include <vector>

#include "mfda/io/file_io.hpp"

namespace mfda {

namespace {

using nlohmann::json;

constexpr const char* kFormatTag = "fusion-net-v1";

json layer_spec_to_json(const LayerSpec& layer) {
    return json{{"width", layer.width}, {"activation", activation_name(layer.activation)}};
}

LayerSpec layer_spec_from_json(const json& j) {
    LayerSpec layer;
    layer.width = j.at("width").get<int>();
    layer.activation = activation_from_name(j.at("activation").get<std::string>());
    return layer;
}

json spec_to_json(const NetworkSpec& spec) {
    json branches = json::array();
    for (const auto& branch : spec.branches) {
        json layers = json::array();
        for (const auto& layer : branch.layers) layers.push_back(layer_spec_to_json(layer));
        branches.push_back(json{{"input_dim", branch.input_dim}, {"layers", layers}});
    }
    json output_block = json::array();
    for (const auto& layer : spec.output_block)
        output_block.push_back(layer_spec_to_json(layer));
    return json{{"branches", branches}, {"output_block", output_block}};
}

NetworkSpec spec_from_json(const json& j) {
    NetworkSpec spec;
    for (const auto& jb : j.at("branches")) {
        BranchSpec branch;
        branch.input_dim = jb.at("input_dim").get<int>();
        for (const auto& jl : jb.at("layers")) branch.layers.push_back(layer_spec_from_json(jl));
        spec.branches.push_back(std::move(branch));
    }
    for (const auto& jl : j.at("output_block"))
        spec.output_block.push_back(layer_spec_from_json(jl));
    return spec;
}

std::vector<double> row_major(const Eigen::MatrixXd& m) {
    std::vector<double> flat;
    flat.reserve(static_cast<size_t>(m.size()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) flat.push_back(m(r, c));
    return flat;
}

json normalizer_to_json(const Standardizer& norm) {
    return json{{"mean", std::vector<double>(norm.mean().begin(), norm.mean().end())},
                {"scale", std::vector<double>(norm.scale().begin(), norm.scale().end())}};
}

Standardizer normalizer_from_json(const json& j) {
    auto mean = j.at("mean").get<std::vector<double>>();
    auto scale = j.at("scale").get<std::vector<double>>();
    return Standardizer(Eigen::Map<const Eigen::VectorXd>(mean.data(), mean.size()),
                        Eigen::Map<const Eigen::VectorXd>(scale.data(), scale.size()));
}

}  // namespace

void save_fusion_surrogate(const std::string& path, const FusionSurrogate& surrogate,
                           const nlohmann::json& metadata) {
    json doc;
    doc["format"] = kFormatTag;
    doc["spec"] = spec_to_json(surrogate.spec());
    json layers = json::array();
    for (const auto& layer : surrogate.weights().layers) {
        layers.push_back(json{{"rows", layer.W.rows()},
                              {"cols", layer.W.cols()},
                              {"weights", row_major(layer.W)},
                              {"bias", std::vector<double>(layer.b.begin(), layer.b.end())}});
    }
    doc["layers"] = layers;
    json input_norms = json::array();
    for (const auto& norm : surrogate.input_normalizers())
        input_norms.push_back(normalizer_to_json(norm));
    doc["input_normalization"] = input_norms;
    doc["target_normalization"] = normalizer_to_json(surrogate.target_normalizer());
    doc["metadata"] = metadata;
    write_file_atomic(path, doc.dump(2));
}

FusionSurrogate load_fusion_surrogate(const std::string& path) {
    json doc = json::parse(read_file(path));
    if (doc.value("format", "") != kFormatTag)
        throw std::runtime_error("load_fusion_surrogate: unrecognized format in " + path);
    NetworkSpec spec = spec_from_json(doc.at("spec"));

    NetworkWeights weights;
    for (const auto& jl : doc.at("layers")) {
        LayerParams p;
        const auto rows = jl.at("rows").get<Eigen::Index>();
        const auto cols = jl.at("cols").get<Eigen::Index>();
        auto flat = jl.at("weights").get<std::vector<double>>();
        auto bias = jl.at("bias").get<std::vector<double>>();
        if (static_cast<Eigen::Index>(flat.size()) != rows * cols ||
            static_cast<Eigen::Index>(bias.size()) != rows)
            throw std::runtime_error("load_fusion_surrogate: corrupt layer in " + path);
        p.W.resize(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index c = 0; c < cols; ++c)
                p.W(r, c) = flat[static_cast<size_t>(r * cols + c)];
        p.b = Eigen::Map<const Eigen::VectorXd>(bias.data(), rows);
        weights.layers.push_back(std::move(p));
    }

    std::vector<Standardizer> input_normalizers;
    for (const auto& jn : doc.at("input_normalization"))
        input_normalizers.push_back(normalizer_from_json(jn));
    Standardizer target_normalizer = normalizer_from_json(doc.at("target_normalization"));
    return FusionSurrogate(std::move(spec), std::move(weights), std::move(input_normalizers),
                           std::move(target_normalizer));
}

nlohmann::json read_surrogate_metadata(const std::string& path) {
    json doc = json::parse(read_file(path));
    return doc.value("metadata", json::object());
}

}  // namespace mfda
