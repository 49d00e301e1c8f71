#pragma once

#include <Eigen/Core>

#include "mfda/rd/rd_model.hpp"
#include "mfda/rd/solver.hpp"

namespace mfda {

/// Orthonormal basis of the dominant snapshot directions.
struct PodBasis {
    Eigen::MatrixXd modes;            ///< n_state x r, orthonormal columns
    Eigen::VectorXd singular_values;  ///< full spectrum, non-increasing

    int rank() const { return static_cast<int>(modes.cols()); }

    /// Fraction of the total snapshot energy carried by the retained modes.
    double captured_energy() const;

    Eigen::MatrixXd project(const Eigen::MatrixXd& states) const {
        return modes.transpose() * states;
    }
    Eigen::MatrixXd reconstruct(const Eigen::MatrixXd& coefficients) const {
        return modes * coefficients;
    }
};

enum class PodMethod {
    automatic,  ///< gram when columns <= rows / 2, otherwise svd
    gram,       ///< eigendecomposition of the snapshot Gram matrix
    svd,        ///< thin singular value decomposition
};

/// Computes the basis from snapshot columns, retaining the smallest rank
/// whose squared singular values reach the energy fraction (and never more
/// than the numerical rank). Throws on an all-zero snapshot matrix or an
/// energy outside (0, 1].
PodBasis compute_pod(const Eigen::MatrixXd& snapshots, double energy = 0.95,
                     PodMethod method = PodMethod::automatic);

/// Stacked state vector [vec(u); vec(v)], column-major within each species.
Eigen::VectorXd stack_state(const Eigen::MatrixXd& u, const Eigen::MatrixXd& v);

/// Snapshot columns of a trajectory, taking frames stride-1, 2*stride-1, ...
/// (every stride-th stored frame). The initial state is not included.
Eigen::MatrixXd solution_snapshots(const RdSolution& solution, int stride = 1);

/// Rows of the basis that evaluate the stacked state at the grid nodes
/// nearest the sensors, u sensors first, so sensor_rows * z equals observing
/// the rank-r reconstruction at one instant.
Eigen::MatrixXd sensor_rows(const PodBasis& basis, int n_grid, const RdSensorGrid& sensors);

}  // namespace mfda
