#pragma once

#include <Eigen/Core>

#include "mfda/darcy/mesh.hpp"

namespace mfda {

/// Linear-element solution of -div(T grad h) = 0 on the unit square with
/// h = 1 on the left edge, h = 0 on the right edge, and zero flux on the top
/// and bottom. element_T holds one positive transmissivity per triangle.
/// Returns nodal heads; throws std::runtime_error if the direct solve fails
/// or the relative residual exceeds 1e-10.
Eigen::VectorXd solve_darcy(const StructuredTriMesh& mesh, const Eigen::VectorXd& element_T);

/// Sensor locations, one row per sensor, strictly inside the unit square.
struct SensorSet {
    Eigen::MatrixXd locations;

    int count() const { return static_cast<int>(locations.rows()); }
};

/// The 25-point interior lattice {1/6, ..., 5/6}^2, ordered x-fastest.
SensorSet default_sensor_grid();

/// Linear interpolation of a nodal field at each sensor.
Eigen::VectorXd observe(const StructuredTriMesh& mesh, const Eigen::VectorXd& nodal_field,
                        const SensorSet& sensors);

}  // namespace mfda
