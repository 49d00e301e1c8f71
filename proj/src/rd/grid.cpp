#include "mfda/rd/grid.hpp"

#include <stdexcept>

namespace mfda {

Eigen::VectorXd rd_grid_coordinates(int n) {
    if (n < 2) throw std::invalid_argument("rd_grid_coordinates: need at least 2 nodes");
    Eigen::VectorXd x(n);
    const double dx = 2.0 * kRdHalfWidth / n;
    for (int i = 0; i < n; ++i) x(i) = -kRdHalfWidth + dx * i;
    return x;
}

Eigen::VectorXd rd_wavenumbers(int n) {
    if (n < 2 || n % 2 != 0)
        throw std::invalid_argument("rd_wavenumbers: grid size must be even");
    Eigen::VectorXd k(n);
    const double base = M_PI / kRdHalfWidth;
    for (int i = 0; i < n; ++i) {
        const int j = i <= n / 2 ? i : i - n;
        k(i) = base * j;
    }
    return k;
}

Eigen::MatrixXd rd_wavenumber_squares(int n) {
    Eigen::VectorXd k = rd_wavenumbers(n);
    Eigen::MatrixXd k2(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) k2(i, j) = k(i) * k(i) + k(j) * k(j);
    return k2;
}

}  // namespace mfda
