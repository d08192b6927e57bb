#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gibbslab/error.hpp"
#include "gibbslab/verify.hpp"

namespace gibbslab {

namespace {

double w2_grid(const GridMeasure& a, const GridMeasure& b) {
  const double w = w2_exact_lp(a, b).distance;
  return w * w;
}

double w2_gauss(const GaussianMeasure& a, const GaussianMeasure& b) {
  const double w = w2_gaussian(a, b);
  return w * w;
}

std::string fmt(const char* key, double v) {
  std::ostringstream s;
  s.precision(10);
  s << key << '=' << v;
  return s.str();
}

}  // namespace

GridMeasure random_grid_law(const GridMeasure& like, Rng& rng) {
  const std::size_t s = like.size();
  if (uniform01(rng) < 0.15) {
    // Restriction of the reference law to a random support set.
    std::vector<double> w(like.weights().begin(), like.weights().end());
    bool any = false;
    for (auto& x : w) {
      if (uniform01(rng) < 0.5) x = 0.0;
      any = any || x > 0.0;
    }
    if (any) return GridMeasure::from_unnormalized(like.axes(), std::move(w));
  }
  const double alpha = std::exp(std::uniform_real_distribution<double>(std::log(0.1), std::log(10.0))(rng));
  return GridMeasure(like.axes(), dirichlet(rng, s, alpha));
}

GaussianMeasure random_gaussian_law(std::size_t n, Rng& rng, double mean_scale) {
  const auto k = static_cast<Eigen::Index>(n);
  Vector m(k);
  for (auto& x : m) x = mean_scale * standard_normal(rng);
  Matrix a(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) a(i, j) = standard_normal(rng) / std::sqrt(static_cast<double>(n));
  const double scale = std::exp(std::uniform_real_distribution<double>(std::log(0.1), std::log(3.0))(rng));
  Matrix cov = scale * a * a.transpose() + 0.05 * Matrix::Identity(k, k);
  return GaussianMeasure(m, 0.5 * (cov + cov.transpose()));
}

std::vector<VerificationReport> verify_aux_theorem(const GridKernel& kernel, const RhoCertificate& rho,
                                                   const std::vector<GridMeasure>& ps,
                                                   const std::vector<std::size_t>& Ms, const VerifyContext& ctx) {
  const auto& fam = kernel.family();
  const double N = static_cast<double>(fam.total_count());
  const double v = static_cast<double>(fam.max_coverage());
  std::vector<VerificationReport> out;
  std::size_t index = 0;
  for (const auto& p : ps) {
    const Divergence d = kl_grid(p, kernel.q());
    std::size_t done = 0;
    GridMeasure pm = p;
    std::vector<std::size_t> sorted = Ms;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t M : sorted) {
      pm = kernel.apply_power(pm, M - done);
      done = M;
      const double lhs = w2_grid(p, pm);
      const std::string note = "M=" + std::to_string(M);
      if (d.is_infinite())
        out.push_back(make_vacuous_report(ids::kAux, lhs, ctx, index, note + "; infinite divergence"));
      else
        out.push_back(make_report(ids::kAux, lhs, static_cast<double>(M) / N * v * (2.0 / rho.rho) * d.value(),
                                  ctx, index, note));
      ++index;
    }
  }
  return out;
}

std::vector<VerificationReport> verify_prop2(const GridKernel& kernel, double delta,
                                             const std::vector<std::pair<GridMeasure, GridMeasure>>& pairs,
                                             const VerifyContext& ctx) {
  const auto& fam = kernel.family();
  const double factor = 1.0 - static_cast<double>(fam.min_coverage()) * delta / static_cast<double>(fam.total_count());
  std::vector<VerificationReport> out;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto& [p, r] = pairs[k];
    const double lhs = w2_grid(kernel.apply(p), kernel.apply(r));
    out.push_back(make_report(ids::kProp2, lhs, factor * w2_grid(p, r), ctx, k, fmt("factor", factor)));
  }
  return out;
}

std::vector<VerificationReport> verify_prop2(const GaussianKernel& kernel, double delta,
                                             const std::vector<std::pair<GaussianMeasure, GaussianMeasure>>& pairs,
                                             std::size_t trials, const VerifyContext& ctx) {
  const auto& fam = kernel.family();
  const double factor = 1.0 - static_cast<double>(fam.min_coverage()) * delta / static_cast<double>(fam.total_count());
  std::vector<VerificationReport> out;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto& [p, r] = pairs[k];
    const auto stats = simulate_coupled_chain(kernel, p, r, 1, trials, derive_seed(ctx.seed, fnv1a(ids::kProp2), k));
    out.push_back(make_mc_report(ids::kProp2, stats.mean[1], factor * w2_gauss(p, r), stats.standard_error[1], ctx,
                                 k, "coupled one-step estimate; " + fmt("factor", factor)));
  }
  return out;
}

std::vector<VerificationReport> verify_corollary2(const GridKernel& kernel, double delta, const GridMeasure& p,
                                                  std::size_t m_max, const VerifyContext& ctx, std::size_t index) {
  const auto& fam = kernel.family();
  const double factor = 1.0 - static_cast<double>(fam.min_coverage()) * delta / static_cast<double>(fam.total_count());
  const double w0 = w2_grid(p, kernel.q());
  std::vector<VerificationReport> out;
  GridMeasure pm = p;
  double envelope = w0;
  for (std::size_t m = 0; m <= m_max; ++m) {
    const double lhs = m == 0 ? w0 : w2_grid(pm, kernel.q());
    out.push_back(make_report(ids::kCor2, lhs, envelope, ctx, index, "m=" + std::to_string(m)));
    pm = kernel.apply(pm);
    envelope *= factor;
  }
  return out;
}

double Theorem1Constants::multiplier() const {
  return C * std::sqrt(static_cast<double>(v) / static_cast<double>(t) / delta * (2.0 / rho));
}

namespace {

VerificationReport theorem1_report(double w, const Divergence& d, const Theorem1Constants& k,
                                   const VerifyContext& ctx, std::size_t index, const std::string& note) {
  if (d.is_infinite()) return make_vacuous_report(ids::kThm1, w, ctx, index, note);
  return make_report(ids::kThm1, w, k.multiplier() * std::sqrt(std::max(0.0, d.value())), ctx, index, note);
}

}  // namespace

std::vector<VerificationReport> verify_theorem1(const GaussianMeasure& q, const Theorem1Constants& k,
                                                const std::vector<GaussianMeasure>& ps, const VerifyContext& ctx) {
  std::vector<VerificationReport> out;
  for (std::size_t i = 0; i < ps.size(); ++i)
    out.push_back(theorem1_report(w2_gaussian(ps[i], q), kl_gaussian(ps[i], q), k, ctx, i, "random"));
  return out;
}

std::vector<VerificationReport> verify_theorem1_adversarial(const GaussianMeasure& q, const Theorem1Constants& k,
                                                            std::size_t restarts, const VerifyContext& ctx) {
  const std::size_t n = q.dimension();
  const auto dim = static_cast<Eigen::Index>(n);
  // Parameters: mean (n) followed by the lower triangle of a Cholesky factor
  // with log-diagonal.
  const std::size_t np = n + n * (n + 1) / 2;
  auto law = [&](const std::vector<double>& th) {
    Vector m(dim);
    for (std::size_t i = 0; i < n; ++i) m(static_cast<Eigen::Index>(i)) = th[i];
    Matrix L = Matrix::Zero(dim, dim);
    std::size_t at = n;
    for (Eigen::Index i = 0; i < dim; ++i)
      for (Eigen::Index j = 0; j <= i; ++j) L(i, j) = i == j ? std::exp(th[at++]) : th[at++];
    Matrix cov = L * L.transpose();
    return GaussianMeasure(m, 0.5 * (cov + cov.transpose()));
  };
  auto objective = [&](const std::vector<double>& th) {
    try {
      const GaussianMeasure p = law(th);
      const Divergence d = kl_gaussian(p, q);
      if (d.is_infinite() || !(d.value() > 1e-12)) return -1.0;
      return w2_gauss(p, q) / d.value();
    } catch (const Error&) {
      return -1.0;
    }
  };

  std::vector<VerificationReport> out;
  for (std::size_t r = 0; r < restarts; ++r) {
    Rng g = make_rng(ctx.seed, fnv1a("thm1-hill"), r);
    std::vector<double> th(np);
    for (std::size_t i = 0; i < n; ++i) th[i] = standard_normal(g);
    std::size_t at = n;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j <= i; ++j) th[at++] = i == j ? 0.5 * standard_normal(g) : 0.3 * standard_normal(g);
    double best = objective(th);
    std::size_t evals = 0;
    for (double step = 0.5; step >= 1e-3 && evals < 6000; step *= 0.5) {
      bool improved = true;
      while (improved && evals < 6000) {
        improved = false;
        for (std::size_t i = 0; i < np; ++i)
          for (double dir : {-1.0, 1.0}) {
            std::vector<double> trial = th;
            trial[i] += dir * step;
            const double v = objective(trial);
            ++evals;
            if (v > best) best = v, th = std::move(trial), improved = true;
          }
      }
    }
    const GaussianMeasure p = law(th);
    out.push_back(theorem1_report(w2_gaussian(p, q), kl_gaussian(p, q), k, ctx, r,
                                  "hill-climb; " + fmt("W2/D", best)));
  }
  return out;
}

std::vector<VerificationReport> verify_theorem1(const GridMeasure& q, const Theorem1Constants& k,
                                                const std::vector<GridMeasure>& ps, const VerifyContext& ctx) {
  std::vector<VerificationReport> out;
  for (std::size_t i = 0; i < ps.size(); ++i)
    out.push_back(theorem1_report(w2_exact_lp(ps[i], q).distance, kl_grid(ps[i], q), k, ctx, i, "random"));
  return out;
}

namespace {

// sum_I mult sum_{i in I} (d_i Phi(eta_I, x) - d_i Phi(eta_I, y))^2. The
// single-site perturbation cancels in the difference, leaving the off-patch
// columns of J applied to x - y for every eta.
double gradient_increment(const QuadraticPotential& potential, const PatchFamily& family, const Vector& dx) {
  const Matrix& J = potential.J();
  double total = 0.0;
  for (std::size_t k = 0; k < family.patch_count(); ++k) {
    const auto& p = family.patch(k);
    const auto out = family.complement(k);
    const Vector g = submatrix(J, p.sites, out) * subvector(dx, out);
    total += static_cast<double>(p.multiplicity) * g.squaredNorm();
  }
  return total;
}

void bridge_reports(std::vector<VerificationReport>& out, double lhs, double increment, double dist2,
                    const RhoCertificate& rho, const ContractivityResult* theorem2, const VerifyContext& ctx,
                    std::size_t index) {
  out.push_back(make_report(ids::kThm2Bridge, lhs, increment / (rho.rho * rho.rho), ctx, index, "gradient bound"));
  if (theorem2 != nullptr)
    if (const auto* c = std::get_if<ContractivityCertificate>(theorem2))
      out.push_back(make_report(ids::kThm2Bridge, lhs, static_cast<double>(c->t) * (1.0 - c->delta) * dist2, ctx,
                                index, "certificate bound"));
}

}  // namespace

std::vector<VerificationReport> verify_theorem2_bridge(const QuadraticPotential& potential, const PatchFamily& family,
                                                       const RhoCertificate& rho, const ContractivityResult* theorem2,
                                                       const std::vector<std::pair<Vector, Vector>>& pairs,
                                                       const VerifyContext& ctx) {
  require(!potential.has_perturbation(), ErrorCode::InvalidArgument,
          "Gaussian bridge needs a perturbation-free potential");
  const Matrix G = def1_gain_matrix(potential, family);
  std::vector<VerificationReport> out;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const Vector dx = pairs[k].first - pairs[k].second;
    bridge_reports(out, (G * dx).squaredNorm(), gradient_increment(potential, family, dx), dx.squaredNorm(), rho,
                   theorem2, ctx, k);
  }
  return out;
}

std::vector<VerificationReport> verify_theorem2_bridge(const GridKernel& kernel, const QuadraticPotential& potential,
                                                       const RhoCertificate& rho, const ContractivityResult* theorem2,
                                                       const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                                                       const VerifyContext& ctx) {
  const auto& fam = kernel.family();
  const GridMeasure& q = kernel.q();
  std::vector<VerificationReport> out;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [x, y] = pairs[k];
    double lhs = 0.0;
    for (std::size_t pk = 0; pk < fam.patch_count(); ++pk) {
      const auto& c = kernel.conditional(pk);
      const std::size_t bx = c.indexer.boundary_of(x), by = c.indexer.boundary_of(y);
      if (bx == by || !c.defined[bx] || !c.defined[by]) continue;
      lhs += static_cast<double>(fam.patch(pk).multiplicity) * kernel.couple(pk, c.slice(bx), c.slice(by)).cost;
    }
    const Vector dx = q.point(x) - q.point(y);
    bridge_reports(out, lhs, gradient_increment(potential, fam, dx), dx.squaredNorm(), rho, theorem2, ctx, k);
  }
  return out;
}

std::vector<VerificationReport> verify_corollary1(const GaussianMeasure& q, double rho, double norm_B, double C,
                                                  const std::vector<GaussianMeasure>& ps, const VerifyContext& ctx) {
  const double coef = corollary1_coefficient(rho, norm_B, C);
  std::vector<VerificationReport> out;
  for (std::size_t k = 0; k < ps.size(); ++k) {
    const Divergence d = kl_gaussian(ps[k], q);
    const double lhs = w2_gauss(ps[k], q);
    if (d.is_infinite())
      out.push_back(make_vacuous_report(ids::kCor1, lhs, ctx, k));
    else
      out.push_back(make_report(ids::kCor1, lhs, coef * d.value(), ctx, k, fmt("coefficient", coef)));
  }
  return out;
}

GridMeasure restrict_to(const GridMeasure& q, const StateSet& a) {
  require(!a.empty(), ErrorCode::EmptySet, "restriction to an empty set");
  std::vector<double> w(q.size(), 0.0);
  for (std::size_t s : a) {
    require(s < q.size(), ErrorCode::InvalidArgument, "state index out of range");
    w[s] = q.weight(s);
  }
  return GridMeasure::from_unnormalized(q.axes(), std::move(w));
}

std::vector<VerificationReport> verify_concentration(const GridMeasure& q, double c,
                                                     const std::vector<std::pair<StateSet, StateSet>>& sets,
                                                     const VerifyContext& ctx) {
  const Matrix pts = q.points();
  std::vector<VerificationReport> out;
  for (std::size_t k = 0; k < sets.size(); ++k) {
    const auto& [a, b] = sets[k];
    require(!a.empty() && !b.empty(), ErrorCode::EmptySet, "concentration check needs nonempty sets");
    double d2 = std::numeric_limits<double>::infinity();
    double qa = 0.0, qb = 0.0;
    for (std::size_t x : a) qa += q.weight(x);
    for (std::size_t y : b) qb += q.weight(y);
    for (std::size_t x : a)
      for (std::size_t y : b)
        d2 = std::min(d2, (pts.row(static_cast<Eigen::Index>(x)) - pts.row(static_cast<Eigen::Index>(y))).squaredNorm());
    const double lhs = std::sqrt(d2);
    if (qa <= 0.0 || qb <= 0.0) {
      out.push_back(make_vacuous_report(ids::kConcentration, lhs, ctx, k, "set of zero reference mass"));
      continue;
    }
    const double rhs = c * (std::sqrt(std::max(0.0, -std::log(qa))) + std::sqrt(std::max(0.0, -std::log(qb))));
    out.push_back(make_report(ids::kConcentration, lhs, rhs, ctx, k, fmt("q(A)", qa) + "; " + fmt("q(B)", qb)));
  }
  return out;
}

std::vector<VerificationReport> verify_lemma1_and_step(const ChainTrace& trace, const RhoCertificate& rho,
                                                       const VerifyContext& ctx, std::size_t index) {
  std::vector<VerificationReport> out;
  const double M = static_cast<double>(trace.steps());
  double steps = 0.0;
  for (double s : trace.step_moments) steps += s;
  out.push_back(make_report(ids::kLemma1, trace.end_to_end_moment,
                            M / static_cast<double>(trace.patch_total) * static_cast<double>(trace.max_coverage) * steps,
                            ctx, index, "M=" + std::to_string(trace.steps())));

  bool any_infinite = false;
  double dsum = 0.0;
  for (std::size_t l = 0; l < trace.step_moments.size(); ++l) {
    const Divergence& d = trace.step_divergences[l];
    const std::string note = "step=" + std::to_string(l + 1);
    if (d.is_infinite()) {
      any_infinite = true;
      out.push_back(make_vacuous_report(ids::kStep, trace.step_moments[l], ctx, index, note));
    } else {
      dsum += d.value();
      out.push_back(make_report(ids::kStep, trace.step_moments[l], 2.0 / rho.rho * d.value(), ctx, index, note));
    }
  }
  const double lhs = any_infinite ? std::numeric_limits<double>::infinity() : dsum;
  if (trace.initial_divergence.is_infinite())
    out.push_back(make_vacuous_report(ids::kChain, lhs, ctx, index, "divergence sum; D(p||q) infinite"));
  else
    out.push_back(make_report(ids::kChain, lhs, trace.initial_divergence.value(), ctx, index, "divergence sum"));
  return out;
}

}  // namespace gibbslab
