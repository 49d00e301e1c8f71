#pragma once

#include <Eigen/Core>

namespace mfda {

/// Uniform triangulation of the unit square: n x n cells, each split along
/// the (i,j) -> (i+1,j+1) diagonal into two positively oriented triangles.
class StructuredTriMesh {
public:
    explicit StructuredTriMesh(int n_cells);

    int n_cells() const { return n_; }
    int n_nodes() const { return (n_ + 1) * (n_ + 1); }
    int n_triangles() const { return 2 * n_ * n_; }
    double spacing() const { return 1.0 / n_; }

    /// Node coordinates, one row per node, ordered x-fastest.
    const Eigen::MatrixXd& nodes() const { return nodes_; }

    /// Vertex indices, one row per triangle, counterclockwise.
    const Eigen::MatrixXi& triangles() const { return triangles_; }

    int node_id(int i, int j) const { return j * (n_ + 1) + i; }

    /// Signed area of a triangle (positive by construction).
    double triangle_area(int t) const;

    /// Quadrature weights for nodal integration: one third of the adjacent
    /// triangle areas per node. Sums to the domain area 1.
    Eigen::VectorXd lumped_node_weights() const;

    /// Containing triangle and barycentric coordinates of a point in [0,1]^2.
    /// Throws std::out_of_range for points outside the closed unit square.
    void locate(double x, double y, int& triangle, Eigen::Vector3d& barycentric) const;

private:
    int n_;
    Eigen::MatrixXd nodes_;
    Eigen::MatrixXi triangles_;
};

}  // namespace mfda
