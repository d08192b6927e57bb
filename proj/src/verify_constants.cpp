#include <cmath>
#include <limits>

#include "gibbslab/error.hpp"
#include "gibbslab/verify.hpp"

namespace gibbslab {

MChoice choose_M(std::size_t t, double delta, std::size_t N) {
  require(delta > 0.0, ErrorCode::NotContractive, "delta must be positive");
  require(delta <= 1.0, ErrorCode::InvalidArgument, "delta must not exceed 1");
  require(t >= 1 && N >= t, ErrorCode::InvalidArgument, "need 1 <= t <= N");
  const double step = static_cast<double>(t) * delta / (2.0 * static_cast<double>(N));
  auto x_of = [&](std::size_t m) { return step * static_cast<double>(m); };
  std::size_t m = static_cast<std::size_t>(std::max(1.0, std::floor(1.0 / step) - 1.0));
  while (m > 1 && x_of(m - 1) >= 1.0) --m;
  while (x_of(m) < 1.0) ++m;
  return {m, x_of(m)};
}

double f_constant(double x) { return std::sqrt(x) / -std::expm1(-x); }

double constant_C() {
  constexpr double lo = 1.0, hi = 1.5;
  constexpr std::size_t kScan = 10'000;
  std::size_t best = 0;
  double best_f = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k <= kScan; ++k) {
    const double x = lo + (hi - lo) * static_cast<double>(k) / kScan;
    const double v = f_constant(x);
    if (v > best_f) best_f = v, best = k;
  }
  // Golden-section refinement on the bracketing cells.
  const double h = (hi - lo) / kScan;
  double a = std::max(lo, lo + h * (static_cast<double>(best) - 1.0));
  double b = std::min(hi, lo + h * (static_cast<double>(best) + 1.0));
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  while (b - a > 1e-10) {
    const double c = b - g * (b - a), d = a + g * (b - a);
    if (f_constant(c) >= f_constant(d)) b = d; else a = c;
  }
  const double refined = std::max({f_constant(a), f_constant(b), best_f});
  return std::sqrt(2.0) * refined;
}

const std::vector<std::string>& all_inequality_ids() {
  static const std::vector<std::string> v{ids::kStep, ids::kLemma1, ids::kAux, ids::kProp2,
                                          ids::kCor2, ids::kThm1, ids::kThm2Bridge, ids::kCor1,
                                          ids::kConcentration, ids::kChain};
  return v;
}

double ToleranceTable::exact_for(const std::string& id) const {
  auto it = overrides.find(id);
  return it != overrides.end() ? it->second : exact;
}

double ToleranceTable::sigmas_for(const std::string& id) const {
  auto it = overrides.find(id);
  return it != overrides.end() ? it->second : mc_sigmas;
}

namespace {

VerificationReport base(const std::string& id, double lhs, double rhs, const VerifyContext& ctx,
                        std::size_t index, const std::string& note) {
  VerificationReport r;
  r.id = id;
  r.lhs = lhs;
  r.rhs = rhs;
  r.margin = rhs - lhs;
  r.labels = ctx.labels;
  r.rigorous = ctx.rigorous;
  r.trial = {ctx.model_hash, ctx.seed, index};
  r.note = note;
  return r;
}

}  // namespace

VerificationReport make_report(const std::string& id, double lhs, double rhs, const VerifyContext& ctx,
                               std::size_t index, const std::string& note) {
  VerificationReport r = base(id, lhs, rhs, ctx, index, note);
  r.tolerance = ctx.tolerances.exact_for(id);
  r.pass = r.recomputed_pass();
  return r;
}

VerificationReport make_mc_report(const std::string& id, double lhs, double rhs, double standard_error,
                                  const VerifyContext& ctx, std::size_t index, const std::string& note) {
  VerificationReport r = base(id, lhs, rhs, ctx, index, note);
  r.monte_carlo = true;
  r.standard_error = standard_error;
  r.tolerance = ctx.tolerances.sigmas_for(id) * standard_error;
  r.pass = r.recomputed_pass();
  return r;
}

VerificationReport make_vacuous_report(const std::string& id, double lhs, const VerifyContext& ctx,
                                       std::size_t index, const std::string& note) {
  const double inf = std::numeric_limits<double>::infinity();
  VerificationReport r = base(id, lhs, inf, ctx, index, note.empty() ? "infinite divergence" : note);
  r.vacuous = true;
  r.tolerance = ctx.tolerances.exact_for(id);
  r.pass = r.recomputed_pass();
  return r;
}

}  // namespace gibbslab
