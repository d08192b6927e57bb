#include "gibbslab/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gibbslab/error.hpp"
#include "gibbslab/gibbs.hpp"

namespace gibbslab {

double Divergence::value() const {
  require(!infinite_, ErrorCode::Indeterminate, "divergence is infinite");
  return value_;
}

std::string Divergence::to_string() const {
  if (infinite_) return "inf";
  std::ostringstream s;
  s.precision(17);
  s << value_;
  return s.str();
}

Divergence kl_weights(std::span<const double> p, std::span<const double> q) {
  require(p.size() == q.size(), ErrorCode::GridMismatch, "weight vectors differ in length");
  if (std::equal(p.begin(), p.end(), q.begin())) return Divergence::finite(0.0);
  double d = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] <= 0.0) continue;
    if (q[k] <= 0.0) return Divergence::infinite();
    d += p[k] * std::log(p[k] / q[k]);
  }
  return Divergence::finite(d);
}

Divergence kl_grid(const GridMeasure& p, const GridMeasure& q) {
  require(p.same_grid(q), ErrorCode::GridMismatch, "divergence between measures on different grids");
  return kl_weights(p.weights(), q.weights());
}

Divergence kl_gaussian(const GaussianMeasure& p, const GaussianMeasure& q) {
  require(p.dimension() == q.dimension(), ErrorCode::DimensionMismatch,
          "Gaussian dimensions differ");
  if (p.mean() == q.mean() && p.covariance() == q.covariance()) return Divergence::finite(0.0);

  // Work in the eigenbasis of q's covariance, restricted to its range.
  Eigen::SelfAdjointEigenSolver<Matrix> es(q.covariance());
  const Vector& lam = es.eigenvalues();
  const double cutoff = 1e-12 * std::max(1.0, lam.cwiseAbs().maxCoeff());
  std::vector<Eigen::Index> range, null;
  for (Eigen::Index k = 0; k < lam.size(); ++k) (lam(k) > cutoff ? range : null).push_back(k);

  const Matrix& U = es.eigenvectors();
  const Vector dm = U.transpose() * (p.mean() - q.mean());
  const Matrix sp = U.transpose() * p.covariance() * U;
  const double scale = std::max(1.0, p.covariance().cwiseAbs().maxCoeff());
  for (Eigen::Index k : null) {
    if (std::abs(dm(k)) > 1e-9 * std::max(1.0, dm.cwiseAbs().maxCoeff())) return Divergence::infinite();
    if (sp(k, k) > 1e-12 * scale) return Divergence::infinite();
  }
  const auto r = static_cast<Eigen::Index>(range.size());
  Matrix spr(r, r);
  Vector dmr(r), lr(r);
  for (Eigen::Index a = 0; a < r; ++a) {
    dmr(a) = dm(range[a]);
    lr(a) = lam(range[a]);
    for (Eigen::Index b = 0; b < r; ++b) spr(a, b) = sp(range[a], range[b]);
  }
  // p must be nondegenerate on q's range, otherwise it is singular w.r.t. q.
  Eigen::LLT<Matrix> llt(0.5 * (spr + spr.transpose()));
  if (llt.info() != Eigen::Success) return Divergence::infinite();
  const Matrix L = llt.matrixL();
  double logdet_p = 0.0;
  for (Eigen::Index a = 0; a < r; ++a) {
    if (!(L(a, a) > 0.0)) return Divergence::infinite();
    logdet_p += 2.0 * std::log(L(a, a));
  }
  double trace = 0.0, quad = 0.0, logdet_q = 0.0;
  for (Eigen::Index a = 0; a < r; ++a) {
    trace += spr(a, a) / lr(a);
    quad += dmr(a) * dmr(a) / lr(a);
    logdet_q += std::log(lr(a));
  }
  return Divergence::finite(0.5 * (trace + quad - static_cast<double>(r) + logdet_q - logdet_p));
}

double chain_decomposition_residual(const GridMeasure& p, const GridKernel& kernel,
                                    const std::vector<std::size_t>& sequence) {
  const GridMeasure& q = kernel.q();
  const double total = kl_grid(p, q).value();
  double parts = 0.0;
  GridMeasure r = p;
  for (std::size_t patch : sequence) {
    GridMeasure next = kernel.apply_patch(r, patch);
    parts += kl_grid(r, next).value();
    r = std::move(next);
  }
  parts += kl_grid(r, q).value();
  return total - parts;
}

}  // namespace gibbslab
