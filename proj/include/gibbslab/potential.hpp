#pragma once

#include <optional>
#include <vector>

#include "gibbslab/linalg.hpp"

namespace gibbslab {

// Bounded single-site perturbation K_i, tabulated on a sorted grid and
// evaluated by linear interpolation (constant beyond the end points).
class SitePerturbation {
 public:
  SitePerturbation(std::vector<double> grid, std::vector<double> values, double sup_norm);

  double operator()(double x) const;
  // Central second difference over ten table cells (at least 1e-4); the
  // interpolant itself is piecewise linear.
  double second_derivative(double x) const;
  double sup_norm() const { return sup_norm_; }
  const std::vector<double>& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> grid_;
  std::vector<double> values_;
  double sup_norm_;
};

struct BoundaryCoupling {
  Site interior;
  std::size_t exterior;  // index into the boundary configuration
  double strength;       // b_{i,j}
};

// Phi(x) = 1/2 x^T J x - h^T x + sum_i K_i(x_i).
// J_ik = d^2 Phi / dx_i dx_k for the quadratic part, so a pair term
// c * x_i * x_k appears as J_ik = J_ki = c. The boundary configuration enters
// only through h.
class QuadraticPotential {
 public:
  // h_i = external_i - sum_j b_{i,j} omega_j. Throws AsymmetricJ or
  // DimensionMismatch.
  static QuadraticPotential build(Matrix J, Vector external_field,
                                  const std::vector<BoundaryCoupling>& boundary = {},
                                  const std::vector<double>& omega = {},
                                  std::optional<std::vector<SitePerturbation>> perturbation = {});

  std::size_t dimension() const { return static_cast<std::size_t>(h_.size()); }
  const Matrix& J() const { return J_; }
  const Vector& h() const { return h_; }
  bool has_perturbation() const { return perturbation_.has_value(); }
  const std::vector<SitePerturbation>& perturbation() const { return *perturbation_; }
  double perturbation_sup_norm() const;  // 0 when absent

  double value(const Vector& x) const;
  // Mixed second derivative. K is separable, so only the diagonal picks up
  // the (finite-difference) curvature of the tabulated perturbation.
  double second_derivative(const Vector& x, Site i, Site k) const;

  // Quadratic with J replaced by its off-diagonal part.
  Matrix interaction() const;

 private:
  QuadraticPotential(Matrix J, Vector h, std::optional<std::vector<SitePerturbation>> k)
      : J_(std::move(J)), h_(std::move(h)), perturbation_(std::move(k)) {}

  Matrix J_;
  Vector h_;
  std::optional<std::vector<SitePerturbation>> perturbation_;
};

inline constexpr double kFiniteDifferenceStep = 1e-4;

}  // namespace gibbslab
