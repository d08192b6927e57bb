#pragma once

#include <Eigen/Dense>
#include <vector>

#include "gibbslab/patch_family.hpp"

namespace gibbslab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Eigenvalue floor applied when taking square roots of symmetric matrices.
inline constexpr double kEigenFloor = 1e-14;

bool is_symmetric(const Matrix& m, double relative_tolerance = 1e-12);
double min_eigenvalue(const Matrix& symmetric);
// Symmetric square root and inverse square root via eigendecomposition, with
// eigenvalues clamped below at kEigenFloor.
Matrix sqrt_psd(const Matrix& symmetric);
Matrix inv_sqrt_psd(const Matrix& symmetric);

Matrix submatrix(const Matrix& m, const std::vector<Site>& rows, const std::vector<Site>& cols);
Vector subvector(const Vector& v, const std::vector<Site>& idx);

}  // namespace gibbslab
