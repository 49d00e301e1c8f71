#include "mfda/nn/activation.hpp"

#include <cmath>
#include <stdexcept>

namespace mfda {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244;
constexpr double kInvSqrt2Pi = 0.3989422804014326779;

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double std_normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

}  // namespace

std::string activation_name(Activation a) {
    switch (a) {
        case Activation::linear: return "linear";
        case Activation::relu: return "relu";
        case Activation::tanh: return "tanh";
        case Activation::sigmoid: return "sigmoid";
        case Activation::gelu: return "gelu";
    }
    throw std::logic_error("activation_name: unhandled enum value");
}

Activation activation_from_name(const std::string& name) {
    if (name == "linear") return Activation::linear;
    if (name == "relu") return Activation::relu;
    if (name == "tanh") return Activation::tanh;
    if (name == "sigmoid") return Activation::sigmoid;
    if (name == "gelu") return Activation::gelu;
    throw std::invalid_argument("activation_from_name: unknown activation '" + name + "'");
}

Eigen::MatrixXd activate(Activation a, const Eigen::MatrixXd& pre) {
    switch (a) {
        case Activation::linear:
            return pre;
        case Activation::relu:
            return pre.cwiseMax(0.0);
        case Activation::tanh:
            return pre.array().tanh().matrix();
        case Activation::sigmoid:
            return (1.0 / (1.0 + (-pre.array()).exp())).matrix();
        case Activation::gelu:
            return pre.unaryExpr([](double x) { return x * std_normal_cdf(x); });
    }
    throw std::logic_error("activate: unhandled enum value");
}

Eigen::MatrixXd activate_derivative(Activation a, const Eigen::MatrixXd& pre) {
    switch (a) {
        case Activation::linear:
            return Eigen::MatrixXd::Ones(pre.rows(), pre.cols());
        case Activation::relu:
            return pre.unaryExpr([](double x) { return x > 0.0 ? 1.0 : 0.0; });
        case Activation::tanh: {
            Eigen::ArrayXXd t = pre.array().tanh();
            return (1.0 - t * t).matrix();
        }
        case Activation::sigmoid: {
            Eigen::ArrayXXd s = 1.0 / (1.0 + (-pre.array()).exp());
            return (s * (1.0 - s)).matrix();
        }
        case Activation::gelu:
            return pre.unaryExpr(
                [](double x) { return std_normal_cdf(x) + x * std_normal_pdf(x); });
    }
    throw std::logic_error("activate_derivative: unhandled enum value");
}

}  // namespace mfda
