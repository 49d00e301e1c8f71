#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "mfda/prob/random.hpp"
#include "mfda/rd/rd_model.hpp"
#include "mfda/rom/pod.hpp"

using namespace mfda;

namespace {

Eigen::MatrixXd random_matrix(int rows, int cols, unsigned seed) {
    Mt19937Source rng(seed);
    Eigen::MatrixXd m(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) m(i, j) = rng.normal();
    return m;
}

Eigen::MatrixXd orthonormal_columns(int rows, int cols, unsigned seed) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(random_matrix(rows, cols, seed));
    return Eigen::MatrixXd(qr.householderQ()).leftCols(cols);
}

}  // namespace

TEST_CASE("known low-rank factorization is recovered") {
    // S = U diag(10, 5, 2) V^T with orthonormal factors built by QR.
    Eigen::MatrixXd u = orthonormal_columns(40, 3, 1);
    Eigen::MatrixXd v = orthonormal_columns(12, 3, 2);
    Eigen::Vector3d scales(10.0, 5.0, 2.0);
    Eigen::MatrixXd s = u * scales.asDiagonal() * v.transpose();

    for (PodMethod method : {PodMethod::gram, PodMethod::svd}) {
        PodBasis basis = compute_pod(s, 0.999, method);
        REQUIRE(basis.rank() == 3);
        for (int k = 0; k < 3; ++k) {
            CHECK(basis.singular_values(k) == doctest::Approx(scales(k)).epsilon(1e-10));
            // Modes match the construction up to sign.
            const double overlap = std::abs(basis.modes.col(k).dot(u.col(k)));
            CHECK(overlap == doctest::Approx(1.0).epsilon(1e-9));
        }
        // The trailing singular values vanish up to the sqrt of the Gram
        // matrix rounding floor.
        CHECK(basis.singular_values.tail(9).maxCoeff() < 1e-6);
    }
}

TEST_CASE("squared singular values match a gram-matrix eigendecomposition oracle") {
    Eigen::MatrixXd s = random_matrix(40, 10, 7);
    PodBasis basis = compute_pod(s, 1.0, PodMethod::svd);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> oracle(s.transpose() * s);
    for (int k = 0; k < 10; ++k) {
        const double expected = std::sqrt(std::max(oracle.eigenvalues()(9 - k), 0.0));
        CHECK(basis.singular_values(k) == doctest::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("gram and svd routes agree") {
    Eigen::MatrixXd s = random_matrix(60, 14, 9);
    PodBasis a = compute_pod(s, 0.99, PodMethod::gram);
    PodBasis b = compute_pod(s, 0.99, PodMethod::svd);
    REQUIRE(a.rank() == b.rank());
    CHECK((a.singular_values - b.singular_values).cwiseAbs().maxCoeff() < 1e-9);
    for (int k = 0; k < a.rank(); ++k)
        CHECK(std::abs(a.modes.col(k).dot(b.modes.col(k))) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("retained modes are orthonormal") {
    Eigen::MatrixXd s = random_matrix(128, 30, 17);
    PodBasis basis = compute_pod(s, 0.95);
    Eigen::MatrixXd gram = basis.modes.transpose() * basis.modes;
    CHECK((gram - Eigen::MatrixXd::Identity(basis.rank(), basis.rank())).cwiseAbs().maxCoeff() <
          1e-10);
    CHECK(basis.captured_energy() >= 0.95);
}

TEST_CASE("reconstruction error equals the discarded singular values") {
    Eigen::MatrixXd s = random_matrix(80, 20, 23);
    PodBasis basis = compute_pod(s, 0.9);
    const int r = basis.rank();
    Eigen::MatrixXd residual = s - basis.reconstruct(basis.project(s));
    const double discarded = basis.singular_values.tail(20 - r).squaredNorm();
    CHECK(residual.squaredNorm() == doctest::Approx(discarded).epsilon(1e-10));
    const double rmse = residual.norm() / std::sqrt(static_cast<double>(s.size()));
    CHECK(rmse <= std::sqrt(discarded / s.size()) + 1e-12);
}

TEST_CASE("rank selection takes the smallest sufficient count") {
    // Diagonal snapshots make the spectrum explicit: sigma = (3, 2, 1).
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(6, 3);
    s(0, 0) = 3.0;
    s(1, 1) = 2.0;
    s(2, 2) = 1.0;
    // energies: 9/14 = 0.643, 13/14 = 0.928, 14/14 = 1.
    CHECK(compute_pod(s, 0.60).rank() == 1);
    CHECK(compute_pod(s, 0.90).rank() == 2);
    CHECK(compute_pod(s, 0.95).rank() == 3);
    CHECK(compute_pod(s, 1.0).rank() == 3);
    CHECK_THROWS_AS(compute_pod(s, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(compute_pod(Eigen::MatrixXd::Zero(4, 4), 0.9), std::invalid_argument);
}

TEST_CASE("stacked state layout places u first, column-major") {
    Eigen::MatrixXd u(2, 2), v(2, 2);
    u << 1.0, 3.0, 2.0, 4.0;  // column-major flattening: 1, 2, 3, 4
    v << 5.0, 7.0, 6.0, 8.0;
    Eigen::VectorXd state = stack_state(u, v);
    REQUIRE(state.size() == 8);
    for (int k = 0; k < 4; ++k) {
        CHECK(state(k) == k + 1.0);
        CHECK(state(4 + k) == k + 5.0);
    }
}

TEST_CASE("snapshot extraction applies the stride to stored frames") {
    RdSolution sol;
    sol.u0 = Eigen::MatrixXd::Zero(2, 2);
    sol.v0 = sol.u0;
    sol.times.resize(6);
    for (int t = 0; t < 6; ++t) {
        sol.times(t) = t + 1.0;
        sol.u.push_back(Eigen::MatrixXd::Constant(2, 2, t + 1.0));
        sol.v.push_back(Eigen::MatrixXd::Constant(2, 2, -(t + 1.0)));
    }
    Eigen::MatrixXd all = solution_snapshots(sol);
    REQUIRE(all.cols() == 6);
    CHECK(all(0, 2) == 3.0);
    Eigen::MatrixXd strided = solution_snapshots(sol, 2);
    REQUIRE(strided.cols() == 3);
    // stride 2 keeps frames 1, 3, 5 (values 2, 4, 6).
    CHECK(strided(0, 0) == 2.0);
    CHECK(strided(3, 1) == 4.0);
    CHECK(strided(4, 2) == -6.0);
    CHECK_THROWS_AS(solution_snapshots(sol, 7), std::invalid_argument);
}

TEST_CASE("sensor rows observe the reconstruction") {
    const int n = 16;
    Eigen::MatrixXd s = random_matrix(2 * n * n, 12, 29);
    PodBasis basis = compute_pod(s, 0.999);
    RdSensorGrid sensors = default_rd_sensors();
    Eigen::MatrixXd rows = sensor_rows(basis, n, sensors);
    REQUIRE(rows.rows() == 2 * 169);
    REQUIRE(rows.cols() == basis.rank());

    Mt19937Source rng(31);
    Eigen::VectorXd z = sample_standard_normal_vector(basis.rank(), rng);
    Eigen::VectorXd state = basis.reconstruct(z);
    // Wrap the state into a one-frame trajectory and observe it directly.
    RdSolution sol;
    sol.u0 = Eigen::MatrixXd::Zero(n, n);
    sol.v0 = sol.u0;
    sol.times = Eigen::VectorXd::Ones(1);
    sol.u.push_back(state.head(n * n).reshaped(n, n));
    sol.v.push_back(state.tail(n * n).reshaped(n, n));
    Eigen::VectorXd direct = observe_rd(sol, sensors);
    Eigen::VectorXd via_rows = rows * z;
    CHECK((via_rows - direct).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("trajectory snapshots compress well and project back") {
    RdConfig config;
    config.n_grid = 16;
    config.n_outputs = 20;
    config.n_grid_hf = 16;
    config.n_outputs_hf = 20;
    config.t_end = 10.0;
    RdModel model(config);
    Eigen::VectorXd theta(2);
    theta << 1.0, 0.05;
    Eigen::MatrixXd snapshots = solution_snapshots(model.solve(theta));
    PodBasis basis = compute_pod(snapshots, 0.95);
    CHECK(basis.rank() < snapshots.cols());
    CHECK(basis.captured_energy() >= 0.95);
    Eigen::MatrixXd recon = basis.reconstruct(basis.project(snapshots));
    const double rel = (recon - snapshots).norm() / snapshots.norm();
    CHECK(rel < 0.25);
}
