#include <algorithm>
#include <cmath>
#include <limits>

#include "gibbslab/error.hpp"
#include "gibbslab/kernels.hpp"
#include "gibbslab/model.hpp"

namespace gibbslab {

GaussianMeasure gaussian_from_potential(const QuadraticPotential& potential) {
  require(!potential.has_perturbation(), ErrorCode::InvalidArgument,
          "a potential with a bounded perturbation does not define a Gaussian");
  const Matrix& J = potential.J();
  Eigen::LLT<Matrix> llt(J);
  require(llt.info() == Eigen::Success && min_eigenvalue(J) > 0.0, ErrorCode::NotPositiveDefinite,
          "J is not positive definite");
  const Matrix cov = llt.solve(Matrix::Identity(J.rows(), J.cols()));
  const Vector mean = llt.solve(potential.h());
  return GaussianMeasure(mean, 0.5 * (cov + cov.transpose()));
}

GaussianModel::GaussianModel(QuadraticPotential potential)
    : potential_(std::move(potential)), measure_(gaussian_from_potential(potential_)) {}

GaussianConditional GaussianModel::conditional(const std::vector<Site>& sites) const {
  // Directly from the canonical form: precision J_II, mean J_II^{-1}(h_I - J_I~I x).
  GaussianConditional c;
  c.sites = sites;
  c.outside = complement_of(sites, dimension());
  const Matrix& J = potential_.J();
  const Matrix j_ii = submatrix(J, c.sites, c.sites);
  Eigen::LLT<Matrix> llt(j_ii);
  require(llt.info() == Eigen::Success, ErrorCode::NotPositiveDefinite,
          "patch block of J is not positive definite");
  c.covariance = llt.solve(Matrix::Identity(j_ii.rows(), j_ii.cols()));
  c.covariance = 0.5 * (c.covariance + c.covariance.transpose()).eval();
  c.base_mean = llt.solve(subvector(potential_.h(), c.sites));
  c.gain = -llt.solve(submatrix(J, c.sites, c.outside));
  return c;
}

GaussianConditional conditional_law(const GaussianMeasure& q, const std::vector<Site>& sites) {
  require(!sites.empty(), ErrorCode::InvalidPatch, "empty patch");
  for (Site s : sites)
    require(s < q.dimension(), ErrorCode::InvalidPatch, "patch site outside the model");
  GaussianConditional c;
  c.sites = sites;
  std::sort(c.sites.begin(), c.sites.end());
  c.outside = complement_of(c.sites, q.dimension());

  Eigen::LLT<Matrix> full(q.covariance());
  require(full.info() == Eigen::Success, ErrorCode::NotPositiveDefinite,
          "covariance is not positive definite");
  const Matrix precision = full.solve(Matrix::Identity(q.covariance().rows(), q.covariance().cols()));
  const Matrix p_ii = submatrix(precision, c.sites, c.sites);
  Eigen::LLT<Matrix> llt(p_ii);
  require(llt.info() == Eigen::Success, ErrorCode::NotPositiveDefinite,
          "conditional precision is not positive definite");
  c.covariance = llt.solve(Matrix::Identity(p_ii.rows(), p_ii.cols()));
  c.covariance = 0.5 * (c.covariance + c.covariance.transpose()).eval();
  c.gain = -llt.solve(submatrix(precision, c.sites, c.outside));
  c.base_mean = subvector(q.mean(), c.sites) - c.gain * subvector(q.mean(), c.outside);
  return c;
}

DiscreteConditional conditional_law(const GridMeasure& q, const std::vector<Site>& sites) {
  require(!sites.empty(), ErrorCode::InvalidPatch, "empty patch");
  std::vector<Site> sorted = sites;
  std::sort(sorted.begin(), sorted.end());
  for (Site s : sorted)
    require(s < q.dimension(), ErrorCode::InvalidPatch, "patch site outside the grid");

  DiscreteConditional c{sorted, complement_of(sorted, q.dimension()),
                        PatchIndexer(q.shape(), sorted), Matrix(), {}, {}, {}};
  const std::size_t pc = c.indexer.patch_count();
  const std::size_t bc = c.indexer.boundary_count();

  c.patch_points.resize(static_cast<Eigen::Index>(pc), static_cast<Eigen::Index>(sorted.size()));
  for (std::size_t k = 0; k < pc; ++k) {
    const std::size_t f = c.indexer.flat(0, k);
    for (std::size_t a = 0; a < sorted.size(); ++a) c.patch_points(k, a) = q.coordinate(f, sorted[a]);
  }

  c.table.assign(bc * pc, 0.0);
  c.boundary_mass.assign(bc, 0.0);
  c.defined.assign(bc, false);
  const auto w = q.weights();
  for (std::size_t b = 0; b < bc; ++b) {
    double* row = c.table.data() + b * pc;
    for (std::size_t k = 0; k < pc; ++k) row[k] = w[c.indexer.flat(b, k)];
    const double mass = kernels::sum({row, pc});
    c.boundary_mass[b] = mass;
    if (mass > 0.0) {
      kernels::scale({row, pc}, 1.0 / mass, {row, pc});
      c.defined[b] = true;
    }
  }
  return c;
}

GridModel::GridModel(GridMeasure q, std::optional<QuadraticPotential> potential)
    : q_(std::move(q)), potential_(std::move(potential)) {
  if (potential_)
    require(potential_->dimension() == q_.dimension(), ErrorCode::DimensionMismatch,
            "potential and grid dimensions differ");
}

DiscreteConditional GridModel::conditional(const std::vector<Site>& sites) const {
  return conditional_law(q_, sites);
}

GridMeasure discretize(const QuadraticPotential& potential, const Axes& axes) {
  require(axes.size() == potential.dimension(), ErrorCode::DimensionMismatch,
          "need one axis per site");
  std::size_t total = 1;
  for (const auto& a : axes) {
    require(!a.empty(), ErrorCode::InvalidGrid, "empty axis");
    for (std::size_t i = 1; i < a.size(); ++i)
      require(a[i] > a[i - 1], ErrorCode::InvalidGrid, "axes must be strictly increasing");
    total *= a.size();
  }

  std::vector<std::size_t> shape(axes.size());
  for (std::size_t s = 0; s < axes.size(); ++s) shape[s] = axes[s].size();

  std::vector<double> neg_phi(total);
  Vector x(static_cast<Eigen::Index>(axes.size()));
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < total; ++f) {
    std::size_t rest = f;
    for (std::size_t s = axes.size(); s-- > 0;) {
      x(s) = axes[s][rest % shape[s]];
      rest /= shape[s];
    }
    neg_phi[f] = -potential.value(x);
    top = std::max(top, neg_phi[f]);
  }
  for (double& v : neg_phi) v = std::exp(v - top);
  return GridMeasure::from_unnormalized(axes, std::move(neg_phi));
}

}  // namespace gibbslab
