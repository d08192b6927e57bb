#include "gibbslab/potential.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gibbslab/error.hpp"

namespace gibbslab {

bool is_symmetric(const Matrix& m, double relative_tolerance) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= relative_tolerance * scale;
}

double min_eigenvalue(const Matrix& symmetric) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetric, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Matrix sqrt_psd(const Matrix& symmetric) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetric);
  const Vector d = es.eigenvalues().cwiseMax(kEigenFloor).cwiseSqrt();
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

Matrix inv_sqrt_psd(const Matrix& symmetric) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetric);
  const Vector d = es.eigenvalues().cwiseMax(kEigenFloor).cwiseSqrt().cwiseInverse();
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

Matrix submatrix(const Matrix& m, const std::vector<Site>& rows, const std::vector<Site>& cols) {
  Matrix out(rows.size(), cols.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c) out(r, c) = m(rows[r], cols[c]);
  return out;
}

Vector subvector(const Vector& v, const std::vector<Site>& idx) {
  Vector out(idx.size());
  for (std::size_t r = 0; r < idx.size(); ++r) out(r) = v(idx[r]);
  return out;
}

SitePerturbation::SitePerturbation(std::vector<double> grid, std::vector<double> values,
                                   double sup_norm)
    : grid_(std::move(grid)), values_(std::move(values)), sup_norm_(sup_norm) {
  require(!grid_.empty() && grid_.size() == values_.size(), ErrorCode::DimensionMismatch,
          "perturbation table needs matching, nonempty grid and values");
  for (std::size_t i = 1; i < grid_.size(); ++i)
    require(grid_[i] > grid_[i - 1], ErrorCode::InvalidGrid,
            "perturbation grid must be strictly increasing");
  require(sup_norm_ >= 0.0, ErrorCode::InvalidArgument, "sup-norm must be nonnegative");
  for (double v : values_)
    require(std::abs(v) <= sup_norm_, ErrorCode::InvalidArgument,
            "tabulated perturbation value exceeds the declared sup-norm");
}

double SitePerturbation::operator()(double x) const {
  if (x <= grid_.front()) return values_.front();
  if (x >= grid_.back()) return values_.back();
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
  const std::size_t hi = static_cast<std::size_t>(it - grid_.begin());
  const std::size_t lo = hi - 1;
  const double w = (x - grid_[lo]) / (grid_[hi] - grid_[lo]);
  return (1.0 - w) * values_[lo] + w * values_[hi];
}

double SitePerturbation::second_derivative(double x) const {
  if (grid_.size() < 2) return 0.0;
  const double cell = (grid_.back() - grid_.front()) / static_cast<double>(grid_.size() - 1);
  const double s = std::max(kFiniteDifferenceStep, 10.0 * cell);
  const double f = (*this)(x);
  return ((*this)(x + s) - 2.0 * f + (*this)(x - s)) / (s * s);
}

QuadraticPotential QuadraticPotential::build(Matrix J, Vector external_field,
                                             const std::vector<BoundaryCoupling>& boundary,
                                             const std::vector<double>& omega,
                                             std::optional<std::vector<SitePerturbation>> k) {
  require(J.rows() == J.cols(), ErrorCode::DimensionMismatch, "J must be square");
  require(J.rows() >= 1, ErrorCode::DimensionMismatch, "J must be nonempty");
  require(external_field.size() == J.rows(), ErrorCode::DimensionMismatch,
          "external field length differs from J");
  require(is_symmetric(J), ErrorCode::AsymmetricJ, "J is not symmetric");
  J = 0.5 * (J + J.transpose()).eval();

  Vector h = std::move(external_field);
  for (const auto& c : boundary) {
    require(c.interior < static_cast<Site>(h.size()), ErrorCode::DimensionMismatch,
            "boundary coupling refers to interior site " + std::to_string(c.interior));
    require(c.exterior < omega.size(), ErrorCode::DimensionMismatch,
            "boundary coupling refers to exterior site " + std::to_string(c.exterior) +
                " but the configuration has " + std::to_string(omega.size()) + " entries");
    h(c.interior) -= c.strength * omega[c.exterior];
  }
  if (k)
    require(k->size() == static_cast<std::size_t>(h.size()), ErrorCode::DimensionMismatch,
            "need one perturbation table per site");
  return QuadraticPotential(std::move(J), std::move(h), std::move(k));
}

double QuadraticPotential::perturbation_sup_norm() const {
  if (!perturbation_) return 0.0;
  double s = 0.0;
  for (const auto& k : *perturbation_) s = std::max(s, k.sup_norm());
  return s;
}

double QuadraticPotential::value(const Vector& x) const {
  double v = 0.5 * x.dot(J_ * x) - h_.dot(x);
  if (perturbation_)
    for (std::size_t i = 0; i < perturbation_->size(); ++i) v += (*perturbation_)[i](x(i));
  return v;
}

double QuadraticPotential::second_derivative(const Vector& x, Site i, Site k) const {
  if (!perturbation_ || i != k) return J_(i, k);
  return J_(i, i) + (*perturbation_)[i].second_derivative(x(i));
}

Matrix QuadraticPotential::interaction() const {
  Matrix b = J_;
  b.diagonal().setZero();
  return b;
}

}  // namespace gibbslab
