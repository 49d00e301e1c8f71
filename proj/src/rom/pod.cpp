#include "mfda/rom/pod.hpp"

#include <Eigen/Dense>
#include <stdexcept>

namespace mfda {

double PodBasis::captured_energy() const {
    const double total = singular_values.squaredNorm();
    if (total <= 0.0) return 0.0;
    return singular_values.head(rank()).squaredNorm() / total;
}

PodBasis compute_pod(const Eigen::MatrixXd& snapshots, double energy, PodMethod method) {
    const Eigen::Index rows = snapshots.rows(), cols = snapshots.cols();
    if (rows < 1 || cols < 1) throw std::invalid_argument("compute_pod: empty snapshot matrix");
    if (!(energy > 0.0 && energy <= 1.0))
        throw std::invalid_argument("compute_pod: energy fraction must be in (0, 1]");
    if (method == PodMethod::automatic)
        method = cols <= rows / 2 ? PodMethod::gram : PodMethod::svd;

    Eigen::VectorXd sv;
    Eigen::MatrixXd left;
    if (method == PodMethod::gram) {
        // The Gram matrix is cols x cols, much smaller than the states when
        // snapshots are tall; left vectors follow as S v / sigma.
        Eigen::MatrixXd gram = snapshots.transpose() * snapshots;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
        if (solver.info() != Eigen::Success)
            throw std::runtime_error("compute_pod: Gram eigendecomposition failed");
        sv.resize(cols);
        Eigen::MatrixXd right(cols, cols);
        for (Eigen::Index k = 0; k < cols; ++k) {
            sv(k) = std::sqrt(std::max(solver.eigenvalues()(cols - 1 - k), 0.0));
            right.col(k) = solver.eigenvectors().col(cols - 1 - k);
        }
        const double tol = sv(0) * 1e-12;
        Eigen::Index numerical_rank = 0;
        while (numerical_rank < cols && sv(numerical_rank) > tol) ++numerical_rank;
        left.resize(rows, numerical_rank);
        for (Eigen::Index k = 0; k < numerical_rank; ++k)
            left.col(k) = snapshots * right.col(k) / sv(k);
    } else {
        Eigen::BDCSVD<Eigen::MatrixXd> svd(snapshots, Eigen::ComputeThinU);
        sv = svd.singularValues();
        const double tol = sv(0) * 1e-12;
        Eigen::Index numerical_rank = 0;
        while (numerical_rank < sv.size() && sv(numerical_rank) > tol) ++numerical_rank;
        left = svd.matrixU().leftCols(numerical_rank);
    }

    const double total = sv.squaredNorm();
    if (total <= 0.0) throw std::invalid_argument("compute_pod: all snapshots are zero");

    Eigen::Index r = 1;
    double cumulative = sv(0) * sv(0);
    while (r < left.cols() && cumulative < energy * total) {
        cumulative += sv(r) * sv(r);
        ++r;
    }

    PodBasis basis;
    basis.modes = left.leftCols(r);
    basis.singular_values = std::move(sv);
    return basis;
}

Eigen::VectorXd stack_state(const Eigen::MatrixXd& u, const Eigen::MatrixXd& v) {
    if (u.rows() != v.rows() || u.cols() != v.cols())
        throw std::invalid_argument("stack_state: species shapes differ");
    Eigen::VectorXd state(2 * u.size());
    state.head(u.size()) = u.reshaped();
    state.tail(v.size()) = v.reshaped();
    return state;
}

Eigen::MatrixXd solution_snapshots(const RdSolution& solution, int stride) {
    if (stride < 1) throw std::invalid_argument("solution_snapshots: stride must be >= 1");
    const int n_frames = solution.n_frames();
    const int n_kept = n_frames / stride;
    if (n_kept < 1)
        throw std::invalid_argument("solution_snapshots: stride leaves no frames");
    const Eigen::Index state_size = 2 * solution.u0.size();
    Eigen::MatrixXd snapshots(state_size, n_kept);
    for (int k = 0; k < n_kept; ++k) {
        const int frame = stride - 1 + k * stride;
        snapshots.col(k) = stack_state(solution.u[frame], solution.v[frame]);
    }
    return snapshots;
}

Eigen::MatrixXd sensor_rows(const PodBasis& basis, int n_grid, const RdSensorGrid& sensors) {
    const Eigen::Index state_size = 2 * static_cast<Eigen::Index>(n_grid) * n_grid;
    if (basis.modes.rows() != state_size)
        throw std::invalid_argument("sensor_rows: basis does not match the grid size");
    Eigen::MatrixXd rows(2 * sensors.count(), basis.rank());
    for (int s = 0; s < sensors.count(); ++s) {
        const int i = rd_nearest_node(sensors.locations(s, 0), n_grid);
        const int j = rd_nearest_node(sensors.locations(s, 1), n_grid);
        const Eigen::Index u_index = i + static_cast<Eigen::Index>(j) * n_grid;
        rows.row(s) = basis.modes.row(u_index);
        rows.row(sensors.count() + s) = basis.modes.row(state_size / 2 + u_index);
    }
    return rows;
}

}  // namespace mfda
