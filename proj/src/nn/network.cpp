#include "mfda/nn/network.hpp"

#include <cmath>
#include <stdexcept>

namespace mfda {

namespace {

struct LayerShape {
    int fan_in = 0;
    LayerSpec layer;
};

/// Shapes of all dense layers in canonical order (branches, then output block).
std::vector<LayerShape> layer_shapes(const NetworkSpec& spec) {
    std::vector<LayerShape> shapes;
    for (const auto& branch : spec.branches) {
        int prev = branch.input_dim;
        for (const auto& layer : branch.layers) {
            shapes.push_back({prev, layer});
            prev = layer.width;
        }
    }
    int prev = spec.fusion_width();
    for (const auto& layer : spec.output_block) {
        shapes.push_back({prev, layer});
        prev = layer.width;
    }
    return shapes;
}

int branch_layer_count(const NetworkSpec& spec) {
    int n = 0;
    for (const auto& branch : spec.branches) n += static_cast<int>(branch.layers.size());
    return n;
}

struct ForwardCache {
    std::vector<Eigen::MatrixXd> pre;   // per canonical layer
    std::vector<Eigen::MatrixXd> post;  // per canonical layer
    Eigen::MatrixXd fused;
};

Eigen::MatrixXd dense(const LayerParams& p, const Eigen::MatrixXd& x) {
    Eigen::MatrixXd pre = p.W * x;
    pre.colwise() += p.b;
    return pre;
}

Eigen::MatrixXd run_forward(const NetworkSpec& spec, const NetworkWeights& w,
                            const std::vector<Eigen::MatrixXd>& branch_inputs,
                            ForwardCache* cache) {
    spec.validate();
    check_shapes(spec, w);
    if (static_cast<int>(branch_inputs.size()) != spec.n_branches())
        throw std::invalid_argument("forward: expected " + std::to_string(spec.n_branches()) +
                                    " branch inputs, got " +
                                    std::to_string(branch_inputs.size()));
    const Eigen::Index n = branch_inputs.front().cols();
    if (n < 1) throw std::invalid_argument("forward: batch must contain at least one sample");
    for (int j = 0; j < spec.n_branches(); ++j) {
        if (branch_inputs[j].rows() != spec.branches[j].input_dim)
            throw std::invalid_argument("forward: branch " + std::to_string(j) +
                                        " input has wrong dimension");
        if (branch_inputs[j].cols() != n)
            throw std::invalid_argument("forward: branch inputs disagree on batch size");
    }

    const int n_layers = static_cast<int>(w.layers.size());
    if (cache) {
        cache->pre.resize(n_layers);
        cache->post.resize(n_layers);
    }

    Eigen::MatrixXd fused(spec.fusion_width(), n);
    int li = 0;
    int row = 0;
    for (int j = 0; j < spec.n_branches(); ++j) {
        Eigen::MatrixXd x = branch_inputs[j];
        for (const auto& layer : spec.branches[j].layers) {
            Eigen::MatrixXd pre = dense(w.layers[li], x);
            x = activate(layer.activation, pre);
            if (cache) {
                cache->pre[li] = std::move(pre);
                cache->post[li] = x;
            }
            ++li;
        }
        fused.middleRows(row, x.rows()) = x;
        row += static_cast<int>(x.rows());
    }
    if (cache) cache->fused = fused;

    Eigen::MatrixXd x = std::move(fused);
    for (const auto& layer : spec.output_block) {
        Eigen::MatrixXd pre = dense(w.layers[li], x);
        x = activate(layer.activation, pre);
        if (cache) {
            cache->pre[li] = std::move(pre);
            cache->post[li] = x;
        }
        ++li;
    }
    return x;
}

}  // namespace

int NetworkSpec::fusion_width() const {
    int width = 0;
    for (const auto& branch : branches) width += branch.final_width();
    return width;
}

int NetworkSpec::output_dim() const {
    if (output_block.empty()) throw std::invalid_argument("NetworkSpec: empty output block");
    return output_block.back().width;
}

void NetworkSpec::validate() const {
    if (branches.empty())
        throw std::invalid_argument("NetworkSpec: at least one branch is required");
    for (const auto& branch : branches) {
        if (branch.input_dim < 1)
            throw std::invalid_argument("NetworkSpec: branch input dimension must be >= 1");
        for (const auto& layer : branch.layers)
            if (layer.width < 1)
                throw std::invalid_argument("NetworkSpec: layer width must be >= 1");
    }
    if (output_block.empty())
        throw std::invalid_argument("NetworkSpec: output block must be non-empty");
    for (const auto& layer : output_block)
        if (layer.width < 1)
            throw std::invalid_argument("NetworkSpec: layer width must be >= 1");
    if (output_block.back().activation != Activation::linear)
        throw std::invalid_argument("NetworkSpec: final output layer must be linear");
}

long NetworkWeights::parameter_count() const {
    long n = 0;
    for (const auto& layer : layers) n += static_cast<long>(layer.W.size() + layer.b.size());
    return n;
}

NetworkWeights glorot_init(const NetworkSpec& spec, RandomSource& rng) {
    spec.validate();
    NetworkWeights w;
    for (const auto& shape : layer_shapes(spec)) {
        LayerParams p;
        p.W.resize(shape.layer.width, shape.fan_in);
        const double a = std::sqrt(6.0 / (shape.fan_in + shape.layer.width));
        // Fill row by row so the draw order is fixed by the spec alone.
        for (Eigen::Index r = 0; r < p.W.rows(); ++r)
            for (Eigen::Index c = 0; c < p.W.cols(); ++c)
                p.W(r, c) = a * (2.0 * rng.uniform01() - 1.0);
        p.b = Eigen::VectorXd::Zero(shape.layer.width);
        w.layers.push_back(std::move(p));
    }
    return w;
}

NetworkWeights zeros_like(const NetworkSpec& spec) {
    spec.validate();
    NetworkWeights w;
    for (const auto& shape : layer_shapes(spec)) {
        LayerParams p;
        p.W = Eigen::MatrixXd::Zero(shape.layer.width, shape.fan_in);
        p.b = Eigen::VectorXd::Zero(shape.layer.width);
        w.layers.push_back(std::move(p));
    }
    return w;
}

void check_shapes(const NetworkSpec& spec, const NetworkWeights& w) {
    auto shapes = layer_shapes(spec);
    if (w.layers.size() != shapes.size())
        throw std::invalid_argument("check_shapes: layer count mismatch");
    for (size_t i = 0; i < shapes.size(); ++i) {
        const auto& p = w.layers[i];
        if (p.W.rows() != shapes[i].layer.width || p.W.cols() != shapes[i].fan_in ||
            p.b.size() != shapes[i].layer.width)
            throw std::invalid_argument("check_shapes: layer " + std::to_string(i) +
                                        " has inconsistent shape");
    }
}

Eigen::MatrixXd forward_batch(const NetworkSpec& spec, const NetworkWeights& w,
                              const std::vector<Eigen::MatrixXd>& branch_inputs) {
    return run_forward(spec, w, branch_inputs, nullptr);
}

Eigen::VectorXd forward(const NetworkSpec& spec, const NetworkWeights& w,
                        const std::vector<Eigen::VectorXd>& branch_inputs) {
    std::vector<Eigen::MatrixXd> cols;
    cols.reserve(branch_inputs.size());
    for (const auto& v : branch_inputs) cols.push_back(v);
    return run_forward(spec, w, cols, nullptr).col(0);
}

double mse_and_grad(const NetworkSpec& spec, const NetworkWeights& w,
                    const std::vector<Eigen::MatrixXd>& branch_inputs,
                    const Eigen::MatrixXd& targets, NetworkWeights& grads) {
    ForwardCache cache;
    Eigen::MatrixXd pred = run_forward(spec, w, branch_inputs, &cache);
    if (targets.rows() != pred.rows() || targets.cols() != pred.cols())
        throw std::invalid_argument("mse_and_grad: target shape mismatch");
    const double n = static_cast<double>(pred.cols());
    Eigen::MatrixXd diff = pred - targets;
    const double loss = diff.squaredNorm() / n;

    grads = zeros_like(spec);
    const int n_branch_layers = branch_layer_count(spec);

    // Output block, last layer first.
    Eigen::MatrixXd delta = (2.0 / n) * diff;  // dL / d(post-activation)
    for (int k = static_cast<int>(spec.output_block.size()) - 1; k >= 0; --k) {
        const int li = n_branch_layers + k;
        Eigen::MatrixXd delta_pre =
            delta.cwiseProduct(activate_derivative(spec.output_block[k].activation,
                                                   cache.pre[li]));
        const Eigen::MatrixXd& layer_in = (k == 0) ? cache.fused : cache.post[li - 1];
        grads.layers[li].W = delta_pre * layer_in.transpose();
        grads.layers[li].b = delta_pre.rowwise().sum();
        delta = w.layers[li].W.transpose() * delta_pre;
    }

    // Split the fusion-layer gradient across branches.
    int row = 0;
    int branch_offset = 0;
    for (int j = 0; j < spec.n_branches(); ++j) {
        const auto& branch = spec.branches[j];
        Eigen::MatrixXd d = delta.middleRows(row, branch.final_width());
        row += branch.final_width();
        for (int k = static_cast<int>(branch.layers.size()) - 1; k >= 0; --k) {
            const int li = branch_offset + k;
            Eigen::MatrixXd delta_pre = d.cwiseProduct(
                activate_derivative(branch.layers[k].activation, cache.pre[li]));
            const Eigen::MatrixXd& layer_in =
                (k == 0) ? branch_inputs[j] : cache.post[li - 1];
            grads.layers[li].W = delta_pre * layer_in.transpose();
            grads.layers[li].b = delta_pre.rowwise().sum();
            if (k > 0) d = w.layers[li].W.transpose() * delta_pre;
        }
        branch_offset += static_cast<int>(branch.layers.size());
    }
    return loss;
}

double mse_loss(const NetworkSpec& spec, const NetworkWeights& w,
                const std::vector<Eigen::MatrixXd>& branch_inputs,
                const Eigen::MatrixXd& targets) {
    Eigen::MatrixXd pred = run_forward(spec, w, branch_inputs, nullptr);
    if (targets.rows() != pred.rows() || targets.cols() != pred.cols())
        throw std::invalid_argument("mse_loss: target shape mismatch");
    return (pred - targets).squaredNorm() / static_cast<double>(pred.cols());
}

}  // namespace mfda
