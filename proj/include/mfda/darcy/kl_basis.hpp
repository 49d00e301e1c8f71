#pragma once

#include <Eigen/Core>
#include <string>

#include "mfda/darcy/mesh.hpp"

namespace mfda {

/// Squared-exponential covariance sigma^2 * exp(-||x-y||^2 / (2 len^2))
/// evaluated between two point sets (rows are points).
Eigen::MatrixXd squared_exponential_kernel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                           double sigma, double corr_length);

/// Discrete eigenpairs of the covariance integral operator.
struct NystromEigs {
    Eigen::VectorXd values;     // m, non-increasing, >= 0
    Eigen::MatrixXd functions;  // n_points x m, unit norm under the weights
};

/// Quadrature discretization of the covariance eigenproblem: forms
/// B = W^(1/2) C W^(1/2), takes the m largest eigenpairs, and returns
/// functions psi = W^(-1/2) phi so that sum_k w_k psi_i(x_k) psi_j(x_k) =
/// delta_ij. Signs are pinned by the weighted projection onto a fixed
/// reference function, which keeps each mode oriented consistently across
/// different discretizations of the same field. Requires m <= number of
/// points and positive weights.
NystromEigs nystrom_eigenpairs(const Eigen::MatrixXd& points, const Eigen::VectorXd& weights,
                               double sigma, double corr_length, int m);

/// Evaluates the discrete eigenfunctions at new points through the
/// out-of-sample formula psi_i(x) = (1/lambda_i) sum_k w_k C(x, x_k) psi_i(x_k).
/// Reproduces the quadrature-node values exactly.
Eigen::MatrixXd nystrom_extend(const Eigen::MatrixXd& eval_points, const NystromEigs& eigs,
                               const Eigen::MatrixXd& quad_points,
                               const Eigen::VectorXd& quad_weights, double sigma,
                               double corr_length);

/// Karhunen-Loeve basis of the log-transmissivity field on one mesh:
/// log T(x) = mean + sum_i sqrt(lambda_i) psi_i(x) theta_i.
struct KlBasis {
    double mean = 0.0;
    double sigma = 0.0;
    double corr_length = 0.0;
    Eigen::VectorXd eigenvalues;  // m, non-increasing
    Eigen::MatrixXd node_values;  // mesh nodes x m
    // Quadrature behind the eigenproblem; equals the mesh nodes whenever the
    // mesh has at least m of them.
    Eigen::MatrixXd quad_points;
    Eigen::VectorXd quad_weights;
    Eigen::MatrixXd quad_values;  // orthonormal under quad_weights

    int n_modes() const { return static_cast<int>(eigenvalues.size()); }
};

/// Builds the KL basis on the mesh. The eigenproblem uses the mesh nodes with
/// lumped weights when the mesh has at least m nodes; for coarser meshes it is
/// solved on a finer uniform quadrature grid of the same domain and the
/// eigenfunctions are evaluated at the mesh nodes by Nystrom extension, so
/// every level carries the full m modes. Throws on non-positive sigma,
/// corr_length, or m.
KlBasis build_kl_basis(const StructuredTriMesh& mesh, double mean, double sigma,
                       double corr_length, int m);

/// Same as build_kl_basis but memoized on disk: looks for a file keyed by
/// (n_cells, mean, sigma, corr_length, m) under cache_dir, building and
/// writing it on a miss. An empty cache_dir disables caching.
KlBasis build_kl_basis_cached(const StructuredTriMesh& mesh, double mean, double sigma,
                              double corr_length, int m, const std::string& cache_dir);

/// Nodal log-transmissivity mean + node_values * (sqrt(eigenvalues) .* theta).
Eigen::VectorXd nodal_log_transmissivity(const KlBasis& basis, const Eigen::VectorXd& theta);

/// Per-triangle transmissivity: exponential of the linear interpolant of the
/// nodal log-field at each element centroid (the vertex average).
Eigen::VectorXd element_transmissivity(const StructuredTriMesh& mesh,
                                       const Eigen::VectorXd& nodal_log);

}  // namespace mfda
