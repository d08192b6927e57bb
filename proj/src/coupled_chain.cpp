#include <cmath>
#include <map>
#include <ostream>
#include <tuple>

#include "gibbslab/error.hpp"
#include "gibbslab/gibbs.hpp"

namespace gibbslab {

namespace {

// Running mean / variance per step (Welford), merged in trial order.
class StepMoments {
 public:
  explicit StepMoments(std::size_t steps) : mean_(steps + 1, 0.0), m2_(steps + 1, 0.0) {}
  void add(std::size_t step, double x, std::size_t count) {
    const double d = x - mean_[step];
    mean_[step] += d / static_cast<double>(count);
    m2_[step] += d * (x - mean_[step]);
  }
  CoupledChainStats finish(std::size_t trials, std::uint64_t seed) const {
    CoupledChainStats out;
    out.trials = trials;
    out.seed = seed;
    out.mean = mean_;
    out.standard_error.resize(mean_.size());
    for (std::size_t k = 0; k < mean_.size(); ++k) {
      const double var = trials > 1 ? m2_[k] / static_cast<double>(trials - 1) : 0.0;
      out.standard_error[k] = std::sqrt(var / static_cast<double>(trials));
    }
    return out;
  }

 private:
  std::vector<double> mean_, m2_;
};

enum Stream : std::uint64_t { kInit = 1, kSteps = 2 };

}  // namespace

CoupledChainStats simulate_coupled_chain(const GaussianKernel& kernel, const GaussianMeasure& p,
                                         const GaussianMeasure& r, std::size_t steps,
                                         std::size_t trials, std::uint64_t seed) {
  require(trials >= 1, ErrorCode::InvalidArgument, "need at least one trial");
  const std::size_t n = kernel.q().dimension();
  require(p.dimension() == n && r.dimension() == n, ErrorCode::DimensionMismatch,
          "initial laws and model dimensions differ");
  const bool same = p.mean() == r.mean() && p.covariance() == r.covariance();
  Eigen::LLT<Matrix> llt(p.covariance());
  require(llt.info() == Eigen::Success, ErrorCode::NotPositiveDefinite,
          "initial law p must be nondegenerate");
  const Matrix lp = llt.matrixL();
  const AffineMap to_r = same ? AffineMap{Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)),
                                          Vector::Zero(static_cast<Eigen::Index>(n))}
                              : optimal_gaussian_map(p, r);

  StepMoments acc(steps);
  const auto& fam = kernel.family();
  Vector y(static_cast<Eigen::Index>(n)), u(static_cast<Eigen::Index>(n));
  for (std::size_t trial = 0; trial < trials; ++trial) {
    Rng init = make_rng(seed, trial, kInit);
    Vector xi(static_cast<Eigen::Index>(n));
    for (auto& v : xi) v = standard_normal(init);
    y = p.mean() + lp * xi;
    u = same ? Vector(y) : to_r(y);
    acc.add(0, (y - u).squaredNorm(), trial + 1);

    Rng rng = make_rng(seed, trial, kSteps);
    for (std::size_t step = 1; step <= steps; ++step) {
      const std::size_t patch = draw_patch(fam, rng);
      const GaussianConditional& c = kernel.conditional(patch);
      const Matrix& f = kernel.conditional_factor(patch);
      Vector noise(static_cast<Eigen::Index>(c.sites.size()));
      for (auto& v : noise) v = standard_normal(rng);
      noise = (f * noise).eval();
      // Equal conditional covariances: the optimal coupling is a shared shift.
      const Vector ny = c.mean_given(subvector(y, c.outside)) + noise;
      const Vector nu = c.mean_given(subvector(u, c.outside)) + noise;
      for (std::size_t a = 0; a < c.sites.size(); ++a) {
        y(static_cast<Eigen::Index>(c.sites[a])) = ny(static_cast<Eigen::Index>(a));
        u(static_cast<Eigen::Index>(c.sites[a])) = nu(static_cast<Eigen::Index>(a));
      }
      acc.add(step, (y - u).squaredNorm(), trial + 1);
    }
  }
  return acc.finish(trials, seed);
}

CoupledChainStats simulate_coupled_chain(const GridKernel& kernel, const GridMeasure& p,
                                         const GridMeasure& r, std::size_t steps,
                                         std::size_t trials, std::uint64_t seed) {
  require(trials >= 1, ErrorCode::InvalidArgument, "need at least one trial");
  require(p.same_grid(kernel.q()) && r.same_grid(kernel.q()), ErrorCode::GridMismatch,
          "initial laws live on a different grid");
  const TransportResult start = w2_exact_lp(p, r);
  std::vector<double> start_weights;
  for (const auto& e : start.plan.entries) start_weights.push_back(e.weight);
  const Matrix pts = p.points();

  // Conditional couplings are reused across trials; keyed by (patch, by, bu).
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, std::pair<Coupling, std::vector<double>>> cache;
  auto coupling = [&](std::size_t patch, std::size_t by, std::size_t bu) -> const auto& {
    auto key = std::make_tuple(patch, by, bu);
    auto it = cache.find(key);
    if (it == cache.end()) {
      const auto& c = kernel.conditional(patch);
      Coupling cp = kernel.couple(patch, c.slice(by), c.slice(bu));
      std::vector<double> w;
      for (const auto& e : cp.entries) w.push_back(e.weight);
      it = cache.emplace(key, std::make_pair(std::move(cp), std::move(w))).first;
    }
    return it->second;
  };

  StepMoments acc(steps);
  const auto& fam = kernel.family();
  for (std::size_t trial = 0; trial < trials; ++trial) {
    Rng init = make_rng(seed, trial, kInit);
    const auto& e0 = start.plan.entries[categorical(init, start_weights)];
    std::size_t y = e0.source, u = e0.target;
    auto dist2 = [&] {
      return (pts.row(static_cast<Eigen::Index>(y)) - pts.row(static_cast<Eigen::Index>(u))).squaredNorm();
    };
    acc.add(0, dist2(), trial + 1);

    Rng rng = make_rng(seed, trial, kSteps);
    for (std::size_t step = 1; step <= steps; ++step) {
      const std::size_t patch = draw_patch(fam, rng);
      const auto& c = kernel.conditional(patch);
      const std::size_t by = c.indexer.boundary_of(y), bu = c.indexer.boundary_of(u);
      if (!c.defined[by] || !c.defined[bu]) {
        acc.add(step, dist2(), trial + 1);
        continue;
      }
      if (by == bu) {
        const std::size_t k = categorical(rng, c.slice(by));
        y = u = c.indexer.flat(by, k);
      } else {
        const auto& [cp, w] = coupling(patch, by, bu);
        const auto& e = cp.entries[categorical(rng, w)];
        y = c.indexer.flat(by, e.source);
        u = c.indexer.flat(bu, e.target);
      }
      acc.add(step, dist2(), trial + 1);
    }
  }
  return acc.finish(trials, seed);
}

void CoupledChainStats::write_csv(std::ostream& out) const {
  out.precision(17);
  out << "step,statistic,value,stderr\n";
  for (std::size_t m = 0; m < mean.size(); ++m)
    out << m << ",sq_distance," << mean[m] << ',' << standard_error[m] << '\n';
}

}  // namespace gibbslab
