#include <algorithm>
#include <cmath>
#include <limits>

#include "gibbslab/certify.hpp"
#include "gibbslab/error.hpp"

namespace gibbslab {

std::string_view to_string(RhoKind k) {
  switch (k) {
    case RhoKind::GaussianExact: return "gaussian-exact";
    case RhoKind::HolleyStroock: return "holley-stroock";
    case RhoKind::Empirical: return "empirical";
  }
  return "?";
}

RhoCertificate rho_gaussian_conditionals(const QuadraticPotential& potential, const PatchFamily& family) {
  require(!potential.has_perturbation(), ErrorCode::InvalidArgument,
          "exact Gaussian rho needs a perturbation-free potential");
  require(family.site_count() == potential.dimension(), ErrorCode::DimensionMismatch,
          "patch family and potential have different site counts");
  double rho = std::numeric_limits<double>::infinity();
  for (const auto& p : family.patches())
    rho = std::min(rho, min_eigenvalue(submatrix(potential.J(), p.sites, p.sites)));
  require(rho > 0.0, ErrorCode::NotPositiveDefinite, "a patch block of J is not positive definite");
  RhoCertificate c;
  c.rho = rho;
  c.kind = RhoKind::GaussianExact;
  c.scope = "all patches, all boundary values";
  c.meaning = "log-sobolev";
  return c;
}

RhoCertificate rho_holley_stroock(double c, double k_sup) {
  require(c > 0.0, ErrorCode::NonpositiveConvexity, "convexity constant must be positive");
  require(k_sup >= 0.0, ErrorCode::InvalidArgument, "sup-norm must be nonnegative");
  RhoCertificate r;
  r.rho = c * std::exp(-4.0 * k_sup);
  r.kind = RhoKind::HolleyStroock;
  r.scope = "densities exp(-U-K) with Hess U >= c";
  r.meaning = "log-sobolev";
  return r;
}

namespace {

class RatioSearch {
 public:
  RatioSearch(const Matrix& points, std::span<const double> q) : points_(points), q_(q.begin(), q.end()) {}

  // +inf for skipped trials.
  double ratio(const std::vector<double>& p) const {
    const Divergence d = kl_weights(p, q_);
    if (d.is_infinite()) return kInf;
    const double w2 = optimal_coupling_on_support(points_, p, q_).cost;
    if (!(w2 > kRhoDistanceGuard * kRhoDistanceGuard)) return kInf;
    return 2.0 * d.value() / w2;
  }

  double descend(std::vector<double> p, double value, double floor) const {
    const std::size_t n = p.size();
    const bool all_pairs = n <= 64;
    std::size_t sweeps = 0;
    for (double step = 0.5; step >= floor && sweeps < 400; ++sweeps) {
      bool improved = false;
      auto attempt = [&](std::size_t i, std::size_t j) {
        const double d = step * p[j];
        if (d <= 0.0) return;
        std::vector<double> trial = p;
        trial[i] += d;
        trial[j] -= d;
        const double r = ratio(trial);
        if (r < value) {
          value = r;
          p = std::move(trial);
          improved = true;
        }
      };
      for (std::size_t i = 0; i < n; ++i) {
        if (all_pairs) {
          for (std::size_t j = 0; j < n; ++j)
            if (i != j) attempt(i, j);
        } else {
          if (i + 1 < n) attempt(i, i + 1);
          if (i > 0) attempt(i, i - 1);
        }
      }
      if (!improved) step *= 0.5;
    }
    return value;
  }

  static constexpr double kInf = std::numeric_limits<double>::infinity();

 private:
  const Matrix& points_;
  std::vector<double> q_;
};

}  // namespace

RhoCertificate rho_empirical(const DiscreteConditional& conditional, std::size_t boundary,
                             const RhoSearch& search) {
  require(boundary < conditional.boundary_count(), ErrorCode::InvalidArgument,
          "boundary index out of range");
  require(conditional.defined[boundary], ErrorCode::DegenerateConditional,
          "conditional law is undefined for this boundary value");
  require(search.trials >= 1, ErrorCode::InvalidArgument, "need at least one trial");
  const auto q = conditional.slice(boundary);
  RatioSearch rs(conditional.patch_points, q);

  double best = RatioSearch::kInf;
  std::size_t skipped = 0;
  for (std::size_t trial = 0; trial < search.trials; ++trial) {
    Rng g = make_rng(search.seed, trial);
    const double alpha = std::exp(std::uniform_real_distribution<double>(std::log(0.1), std::log(10.0))(g));
    std::vector<double> p = dirichlet(g, q.size(), alpha);
    const double r = rs.ratio(p);
    if (r == RatioSearch::kInf) {
      ++skipped;
      continue;
    }
    // Only record-setting trials are refined, so the refinement set of a
    // prefix of trials is a subset of that of the full run.
    if (r < best) best = std::min(r, rs.descend(std::move(p), r, search.descent_floor));
  }
  require(best < RatioSearch::kInf, ErrorCode::DegenerateConditional,
          "every trial charged a zero-weight cell of the conditional or matched it");
  RhoCertificate c;
  c.rho = best;
  c.kind = RhoKind::Empirical;
  c.scope = "one conditional law";
  c.meaning = "transport";
  c.rigorous = false;
  c.trials = search.trials;
  c.skipped = skipped;
  c.seed = search.seed;
  return c;
}

RhoCertificate rho_empirical(const GridKernel& kernel, const RhoSearch& search) {
  RhoCertificate out;
  out.rho = std::numeric_limits<double>::infinity();
  out.kind = RhoKind::Empirical;
  out.meaning = "transport";
  out.rigorous = false;
  out.seed = search.seed;
  out.scope = "all patches, all boundary values";
  for (std::size_t k = 0; k < kernel.family().patch_count(); ++k) {
    const auto& c = kernel.conditional(k);
    for (std::size_t b = 0; b < c.boundary_count(); ++b) {
      if (!c.defined[b]) continue;
      RhoSearch s = search;
      s.seed = derive_seed(search.seed, k, b);
      const RhoCertificate one = rho_empirical(c, b, s);
      out.rho = std::min(out.rho, one.rho);
      out.trials += one.trials;
      out.skipped += one.skipped;
    }
  }
  require(std::isfinite(out.rho) && out.rho > 0.0, ErrorCode::DegenerateConditional,
          "no conditional law admitted a finite ratio");
  return out;
}

}  // namespace gibbslab
