#pragma once

#include <Eigen/Core>
#include <string>

namespace mfda {

enum class Activation { linear, relu, tanh, sigmoid, gelu };

/// Name used in serialized network files ("linear", "relu", ...).
std::string activation_name(Activation a);

/// Inverse of activation_name. Throws std::invalid_argument on unknown names.
Activation activation_from_name(const std::string& name);

/// Applies the activation elementwise. GeLU uses the exact Gaussian-CDF form
/// x * Phi(x), not the tanh approximation.
Eigen::MatrixXd activate(Activation a, const Eigen::MatrixXd& pre);

/// Elementwise derivative of the activation, evaluated at the pre-activation
/// values. For GeLU this is Phi(x) + x * phi(x).
Eigen::MatrixXd activate_derivative(Activation a, const Eigen::MatrixXd& pre);

}  // namespace mfda
