#include "mfda/darcy/fem.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <stdexcept>
#include <vector>

namespace mfda {

Eigen::VectorXd solve_darcy(const StructuredTriMesh& mesh, const Eigen::VectorXd& element_T) {
    if (element_T.size() != mesh.n_triangles())
        throw std::invalid_argument("solve_darcy: one transmissivity per triangle required");
    if ((element_T.array() <= 0.0).any())
        throw std::invalid_argument("solve_darcy: transmissivities must be positive");

    const int n = mesh.n_cells();
    const int n_nodes = mesh.n_nodes();

    // Dirichlet data: h = 1 on x = 0, h = 0 on x = 1; other nodes are free.
    std::vector<int> free_index(n_nodes, -1);
    Eigen::VectorXd dirichlet = Eigen::VectorXd::Zero(n_nodes);
    std::vector<char> fixed(n_nodes, 0);
    for (int j = 0; j <= n; ++j) {
        fixed[mesh.node_id(0, j)] = 1;
        dirichlet(mesh.node_id(0, j)) = 1.0;
        fixed[mesh.node_id(n, j)] = 1;
    }
    int n_free = 0;
    for (int v = 0; v < n_nodes; ++v)
        if (!fixed[v]) free_index[v] = n_free++;

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<size_t>(mesh.n_triangles()) * 9);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_free);

    for (int e = 0; e < mesh.n_triangles(); ++e) {
        const auto tri = mesh.triangles().row(e);
        const Eigen::Vector2d p0 = mesh.nodes().row(tri(0));
        const Eigen::Vector2d p1 = mesh.nodes().row(tri(1));
        const Eigen::Vector2d p2 = mesh.nodes().row(tri(2));
        const double area = mesh.triangle_area(e);
        // Gradient coefficients of the linear shape functions.
        const double b[3] = {p1.y() - p2.y(), p2.y() - p0.y(), p0.y() - p1.y()};
        const double c[3] = {p2.x() - p1.x(), p0.x() - p2.x(), p1.x() - p0.x()};
        const double scale = element_T(e) / (4.0 * area);
        for (int r = 0; r < 3; ++r) {
            const int vr = tri(r);
            if (fixed[vr]) continue;
            for (int s = 0; s < 3; ++s) {
                const int vs = tri(s);
                const double k = scale * (b[r] * b[s] + c[r] * c[s]);
                if (fixed[vs])
                    rhs(free_index[vr]) -= k * dirichlet(vs);
                else
                    triplets.emplace_back(free_index[vr], free_index[vs], k);
            }
        }
    }

    Eigen::SparseMatrix<double> stiffness(n_free, n_free);
    stiffness.setFromTriplets(triplets.begin(), triplets.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(stiffness);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("solve_darcy: factorization failed");
    Eigen::VectorXd h_free = solver.solve(rhs);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("solve_darcy: back substitution failed");

    const double rhs_norm = rhs.norm();
    const double residual = (stiffness * h_free - rhs).norm();
    if (residual > 1e-10 * (rhs_norm > 0.0 ? rhs_norm : 1.0))
        throw std::runtime_error("solve_darcy: relative residual above 1e-10");

    Eigen::VectorXd heads = dirichlet;
    for (int v = 0; v < n_nodes; ++v)
        if (!fixed[v]) heads(v) = h_free(free_index[v]);
    return heads;
}

SensorSet default_sensor_grid() {
    SensorSet sensors;
    sensors.locations.resize(25, 2);
    int s = 0;
    for (int j = 1; j <= 5; ++j)
        for (int i = 1; i <= 5; ++i) {
            sensors.locations(s, 0) = i / 6.0;
            sensors.locations(s, 1) = j / 6.0;
            ++s;
        }
    return sensors;
}

Eigen::VectorXd observe(const StructuredTriMesh& mesh, const Eigen::VectorXd& nodal_field,
                        const SensorSet& sensors) {
    if (nodal_field.size() != mesh.n_nodes())
        throw std::invalid_argument("observe: nodal field size mismatch");
    Eigen::VectorXd values(sensors.count());
    for (int s = 0; s < sensors.count(); ++s) {
        int tri;
        Eigen::Vector3d bary;
        mesh.locate(sensors.locations(s, 0), sensors.locations(s, 1), tri, bary);
        const auto verts = mesh.triangles().row(tri);
        values(s) = bary(0) * nodal_field(verts(0)) + bary(1) * nodal_field(verts(1)) +
                    bary(2) * nodal_field(verts(2));
    }
    return values;
}

}  // namespace mfda
