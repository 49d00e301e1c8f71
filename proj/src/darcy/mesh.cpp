#include "mfda/darcy/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mfda {

StructuredTriMesh::StructuredTriMesh(int n_cells) : n_(n_cells) {
    if (n_cells < 1)
        throw std::invalid_argument("StructuredTriMesh: need at least one cell per axis");
    const int nn = n_ + 1;
    nodes_.resize(nn * nn, 2);
    const double h = spacing();
    for (int j = 0; j < nn; ++j)
        for (int i = 0; i < nn; ++i) {
            nodes_(node_id(i, j), 0) = i * h;
            nodes_(node_id(i, j), 1) = j * h;
        }
    triangles_.resize(2 * n_ * n_, 3);
    int t = 0;
    for (int j = 0; j < n_; ++j)
        for (int i = 0; i < n_; ++i) {
            const int a = node_id(i, j);
            const int b = node_id(i + 1, j);
            const int c = node_id(i + 1, j + 1);
            const int d = node_id(i, j + 1);
            triangles_.row(t++) << a, b, c;  // below the diagonal a-c
            triangles_.row(t++) << a, c, d;  // above the diagonal a-c
        }
}

double StructuredTriMesh::triangle_area(int t) const {
    const auto tri = triangles_.row(t);
    const Eigen::Vector2d p0 = nodes_.row(tri(0));
    const Eigen::Vector2d p1 = nodes_.row(tri(1));
    const Eigen::Vector2d p2 = nodes_.row(tri(2));
    return 0.5 * ((p1.x() - p0.x()) * (p2.y() - p0.y()) -
                  (p2.x() - p0.x()) * (p1.y() - p0.y()));
}

Eigen::VectorXd StructuredTriMesh::lumped_node_weights() const {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(n_nodes());
    for (int t = 0; t < n_triangles(); ++t) {
        const double third = triangle_area(t) / 3.0;
        for (int v = 0; v < 3; ++v) w(triangles_(t, v)) += third;
    }
    return w;
}

void StructuredTriMesh::locate(double x, double y, int& triangle,
                               Eigen::Vector3d& barycentric) const {
    if (x < 0.0 || x > 1.0 || y < 0.0 || y > 1.0)
        throw std::out_of_range("StructuredTriMesh::locate: point (" + std::to_string(x) +
                                ", " + std::to_string(y) + ") outside the unit square");
    const double h = spacing();
    const int i = std::min(static_cast<int>(std::floor(x / h)), n_ - 1);
    const int j = std::min(static_cast<int>(std::floor(y / h)), n_ - 1);
    const double u = x / h - i;  // local coordinates in [0,1]^2
    const double v = y / h - j;
    // The square (i,j) is split along the diagonal u = v.
    const int base = 2 * (j * n_ + i);
    if (u >= v) {
        triangle = base;  // vertices (i,j), (i+1,j), (i+1,j+1)
        barycentric = Eigen::Vector3d(1.0 - u, u - v, v);
    } else {
        triangle = base + 1;  // vertices (i,j), (i+1,j+1), (i,j+1)
        barycentric = Eigen::Vector3d(1.0 - v, u, v - u);
    }
}

}  // namespace mfda
