#include <algorithm>
#include <cmath>

#include "gibbslab/error.hpp"
#include "gibbslab/gibbs.hpp"
#include "gibbslab/kernels.hpp"

namespace gibbslab {

namespace {

GridMeasure with_weights(const GridMeasure& like, std::vector<double> w) {
  double s = 0.0;
  for (double x : w) s += x;
  if (std::abs(s - 1.0) <= GridMeasure::kNormalizationTolerance) return GridMeasure(like.axes(), std::move(w));
  return GridMeasure::from_unnormalized(like.axes(), std::move(w));
}

}  // namespace

GridKernel::GridKernel(GridModel model, PatchFamily family)
    : model_(std::move(model)), family_(std::move(family)) {
  require(family_.site_count() == model_.dimension(), ErrorCode::DimensionMismatch,
          "patch family and grid have different site counts");
  conditionals_.reserve(family_.patch_count());
  for (const auto& p : family_.patches()) conditionals_.push_back(model_.conditional(p.sites));
}

GridMeasure GridKernel::apply_patch(const GridMeasure& mu, std::size_t patch) const {
  require(mu.same_grid(q()), ErrorCode::GridMismatch, "measure lives on a different grid");
  const DiscreteConditional& c = conditionals_.at(patch);
  const auto w = mu.weights();
  const std::size_t pc = c.patch_count();
  std::vector<double> out(w.size(), 0.0);
  for (std::size_t b = 0; b < c.boundary_count(); ++b) {
    double mass = 0.0;
    for (std::size_t k = 0; k < pc; ++k) mass += w[c.indexer.flat(b, k)];
    if (mass <= 0.0) continue;
    if (!c.defined[b]) {
      for (std::size_t k = 0; k < pc; ++k) out[c.indexer.flat(b, k)] = w[c.indexer.flat(b, k)];
      continue;
    }
    const auto slice = c.slice(b);
    for (std::size_t k = 0; k < pc; ++k) out[c.indexer.flat(b, k)] = mass * slice[k];
  }
  return with_weights(mu, std::move(out));
}

GridMeasure GridKernel::apply(const GridMeasure& mu) const {
  std::vector<double> acc(mu.size(), 0.0);
  for (std::size_t k = 0; k < family_.patch_count(); ++k) {
    const GridMeasure part = apply_patch(mu, k);
    const double wk = family_.selection_weight(k);
    const auto pw = part.weights();
    for (std::size_t f = 0; f < acc.size(); ++f) acc[f] += wk * pw[f];
  }
  return with_weights(mu, std::move(acc));
}

GridMeasure GridKernel::apply_power(const GridMeasure& mu, std::size_t m) const {
  GridMeasure r = mu;
  for (std::size_t s = 0; s < m; ++s) r = apply(r);
  return r;
}

Coupling GridKernel::couple(std::size_t patch, std::span<const double> a,
                            std::span<const double> b) const {
  return optimal_coupling_on_support(conditionals_.at(patch).patch_points, a, b);
}

GaussianKernel::GaussianKernel(GaussianModel model, PatchFamily family)
    : model_(std::move(model)), family_(std::move(family)) {
  require(family_.site_count() == model_.dimension(), ErrorCode::DimensionMismatch,
          "patch family and model have different site counts");
  for (const auto& p : family_.patches()) {
    conditionals_.push_back(model_.conditional(p.sites));
    Eigen::LLT<Matrix> llt(conditionals_.back().covariance);
    require(llt.info() == Eigen::Success, ErrorCode::NotPositiveDefinite,
            "conditional covariance is not positive definite");
    factors_.push_back(llt.matrixL());
  }
}

GaussianMeasure GaussianKernel::apply_patch(const GaussianMeasure& mu, std::size_t patch) const {
  require(mu.dimension() == model_.dimension(), ErrorCode::DimensionMismatch,
          "measure and model dimensions differ");
  const GaussianConditional& c = conditionals_.at(patch);
  const Matrix& s = mu.covariance();
  const Matrix s_oo = submatrix(s, c.outside, c.outside);
  const Vector m_o = subvector(mu.mean(), c.outside);

  Vector mean = mu.mean();
  Matrix cov = s;
  const Vector new_mi = c.base_mean + c.gain * m_o;
  const Matrix cross = c.gain * s_oo;  // cov(X_I', X_O)
  const Matrix block = cross * c.gain.transpose() + c.covariance;
  for (std::size_t a = 0; a < c.sites.size(); ++a) {
    const auto ia = static_cast<Eigen::Index>(c.sites[a]);
    mean(ia) = new_mi(static_cast<Eigen::Index>(a));
    for (std::size_t b = 0; b < c.sites.size(); ++b)
      cov(ia, static_cast<Eigen::Index>(c.sites[b])) =
          block(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    for (std::size_t o = 0; o < c.outside.size(); ++o) {
      const auto io = static_cast<Eigen::Index>(c.outside[o]);
      cov(ia, io) = cov(io, ia) = cross(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(o));
    }
  }
  cov = 0.5 * (cov + cov.transpose()).eval();
  if (mu.degenerate()) return GaussianMeasure::semidefinite(mean, cov);
  return GaussianMeasure(mean, cov);
}

void GaussianKernel::apply(const GaussianMeasure&) const {
  fail(ErrorCode::GaussianUnsupported,
       "the patch mixture of Gaussian kernels is not Gaussian; use grid mode or simulation");
}

namespace {

// One-patch family {I, complement} so kernels can be built for a bare site set.
PatchFamily single_patch_family(const std::vector<Site>& sites, std::size_t n) {
  std::vector<Site> sorted = sites;
  std::sort(sorted.begin(), sorted.end());
  std::vector<Patch> patches{{sorted, 1}};
  if (sorted.size() < n) patches.push_back({complement_of(sorted, n), 1});
  return PatchFamily::build(std::move(patches), n);
}

}  // namespace

GridMeasure apply_gamma_patch(const GridMeasure& mu, const std::vector<Site>& sites,
                              const GridModel& q) {
  GridKernel k(q, single_patch_family(sites, q.dimension()));
  return k.apply_patch(mu, 0);
}

GaussianMeasure apply_gamma_patch(const GaussianMeasure& mu, const std::vector<Site>& sites,
                                  const GaussianModel& q) {
  GaussianKernel k(q, single_patch_family(sites, q.dimension()));
  return k.apply_patch(mu, 0);
}

AnyMeasure apply_gamma_patch(const AnyMeasure& mu, const std::vector<Site>& sites, const AnyModel& q) {
  if (const auto* g = std::get_if<GaussianMeasure>(&mu)) {
    const auto* m = std::get_if<GaussianModel>(&q);
    require(m != nullptr, ErrorCode::ModeMismatch, "Gaussian measure with a grid model");
    return apply_gamma_patch(*g, sites, *m);
  }
  const auto* m = std::get_if<GridModel>(&q);
  require(m != nullptr, ErrorCode::ModeMismatch, "grid measure with a Gaussian model");
  return apply_gamma_patch(std::get<GridMeasure>(mu), sites, *m);
}

std::size_t draw_patch(const PatchFamily& family, Rng& rng) {
  const auto total = family.total_count();
  std::uniform_int_distribution<std::size_t> pick(0, total - 1);
  std::size_t u = pick(rng);
  for (std::size_t k = 0; k < family.patch_count(); ++k) {
    const std::size_t m = family.patch(k).multiplicity;
    if (u < m) return k;
    u -= m;
  }
  return family.patch_count() - 1;
}

std::vector<std::size_t> draw_sequence(const PatchFamily& family, std::size_t m, Rng& rng) {
  std::vector<std::size_t> seq(m);
  for (auto& s : seq) s = draw_patch(family, rng);
  return seq;
}

}  // namespace gibbslab
