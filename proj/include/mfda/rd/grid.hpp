#pragma once

#include <Eigen/Core>

namespace mfda {

/// Half-width of the square periodic domain (-20, 20)^2.
constexpr double kRdHalfWidth = 20.0;

/// Node coordinates -20 + 40 i / n for i = 0..n-1 (the right edge wraps).
Eigen::VectorXd rd_grid_coordinates(int n);

/// FFT-ordered angular wavenumbers pi j / 20 with j = 0..n/2, -(n/2-1)..-1.
Eigen::VectorXd rd_wavenumbers(int n);

/// Squared wavenumber magnitude |k|^2 laid out like the spectral field:
/// entry (i, j) pairs the i-th x wavenumber with the j-th y wavenumber.
Eigen::MatrixXd rd_wavenumber_squares(int n);

}  // namespace mfda
