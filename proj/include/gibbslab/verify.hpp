#pragma once
// Inequality pipelines. Each check produces VerificationReports whose pass
// flag is recomputable from (lhs, rhs, tolerance).

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gibbslab/certify.hpp"

namespace gibbslab {

struct MChoice {
  std::size_t M;
  double x;  // t * delta * M / (2N), in [1, 3/2]
};
// Smallest M with t*delta*M/(2N) >= 1; throws NotContractive for delta <= 0.
MChoice choose_M(std::size_t t, double delta, std::size_t N);

// sqrt(x) / (1 - exp(-x))
double f_constant(double x);
// sqrt(2) * max over [1, 3/2] of f, by dense scan plus golden-section refinement.
double constant_C();

namespace ids {
inline constexpr const char* kStep = "eq2.3";
inline constexpr const char* kLemma1 = "lemma1";
inline constexpr const char* kAux = "aux";
inline constexpr const char* kProp2 = "prop2";
inline constexpr const char* kCor2 = "cor2";
inline constexpr const char* kThm1 = "thm1";
inline constexpr const char* kThm2Bridge = "thm2-bridge";
inline constexpr const char* kCor1 = "cor1";
inline constexpr const char* kConcentration = "conc1.1";
inline constexpr const char* kChain = "chain3.12";
}  // namespace ids
const std::vector<std::string>& all_inequality_ids();

// Exact checks use an absolute tolerance; Monte-Carlo checks allow a number
// of standard errors. Overrides are keyed by inequality id.
struct ToleranceTable {
  double exact = 1e-9;
  double mc_sigmas = 3.0;
  std::map<std::string, double> overrides;

  double exact_for(const std::string& id) const;
  double sigmas_for(const std::string& id) const;
};

struct TrialMeta {
  std::string model_hash;
  std::uint64_t seed = 0;
  std::size_t index = 0;
};

struct VerificationReport {
  std::string id;
  double lhs = 0.0;
  double rhs = 0.0;  // may be +inf (vacuous)
  double margin = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  bool vacuous = false;
  bool monte_carlo = false;
  double standard_error = 0.0;
  bool rigorous = true;  // false when any certificate used is empirical
  std::vector<std::string> labels;
  TrialMeta trial;
  std::string note;

  bool recomputed_pass() const { return margin >= -tolerance; }
};

struct VerifyContext {
  std::string model_hash;
  std::uint64_t seed = 0;
  ToleranceTable tolerances;
  std::vector<std::string> labels;  // certificate labels attached to every report
  bool rigorous = true;
};

VerificationReport make_report(const std::string& id, double lhs, double rhs, const VerifyContext& ctx,
                               std::size_t index, const std::string& note = {});
VerificationReport make_mc_report(const std::string& id, double lhs, double rhs, double standard_error,
                                  const VerifyContext& ctx, std::size_t index, const std::string& note = {});
// Right side built from an infinite divergence: the inequality is vacuous and
// passes with an explicit flag.
VerificationReport make_vacuous_report(const std::string& id, double lhs, const VerifyContext& ctx,
                                       std::size_t index, const std::string& note = {});

// Random trial laws.
GridMeasure random_grid_law(const GridMeasure& like, Rng& rng);
GaussianMeasure random_gaussian_law(std::size_t n, Rng& rng, double mean_scale = 1.0);

std::vector<VerificationReport> verify_aux_theorem(const GridKernel& kernel, const RhoCertificate& rho,
                                                   const std::vector<GridMeasure>& ps,
                                                   const std::vector<std::size_t>& Ms, const VerifyContext& ctx);

std::vector<VerificationReport> verify_prop2(const GridKernel& kernel, double delta,
                                             const std::vector<std::pair<GridMeasure, GridMeasure>>& pairs,
                                             const VerifyContext& ctx);
// Upper bound on the left side from one coupled step, tolerance in standard errors.
std::vector<VerificationReport> verify_prop2(const GaussianKernel& kernel, double delta,
                                             const std::vector<std::pair<GaussianMeasure, GaussianMeasure>>& pairs,
                                             std::size_t trials, const VerifyContext& ctx);

std::vector<VerificationReport> verify_corollary2(const GridKernel& kernel, double delta, const GridMeasure& p,
                                                  std::size_t m_max, const VerifyContext& ctx,
                                                  std::size_t index = 0);

struct Theorem1Constants {
  double C;
  double rho;
  double delta;
  std::size_t t;
  std::size_t v;
  // C * sqrt((v/t) (1/delta) (2/rho)); Theorem 1 reads W <= multiplier * sqrt(D).
  double multiplier() const;
};

std::vector<VerificationReport> verify_theorem1(const GaussianMeasure& q, const Theorem1Constants& k,
                                                const std::vector<GaussianMeasure>& ps, const VerifyContext& ctx);
// Hill-climb over Gaussian p maximizing W^2 / D from `restarts` random starts;
// one report per restart (its final, worst-found p).
std::vector<VerificationReport> verify_theorem1_adversarial(const GaussianMeasure& q, const Theorem1Constants& k,
                                                            std::size_t restarts, const VerifyContext& ctx);
std::vector<VerificationReport> verify_theorem1(const GridMeasure& q, const Theorem1Constants& k,
                                                const std::vector<GridMeasure>& ps, const VerifyContext& ctx);

// Pairs of configurations (x, y). lhs = sum_I mult W^2(Q_I|x, Q_I|y); the
// bound is (1/rho^2) sum_I mult sum_{i in I} (d_i Phi(eta_I, x) - d_i Phi(eta_I, y))^2.
// A second report per pair checks lhs <= t (1 - delta) |x - y|^2 with delta
// from the Theorem-2 certificate, when one is supplied.
std::vector<VerificationReport> verify_theorem2_bridge(const QuadraticPotential& potential, const PatchFamily& family,
                                                       const RhoCertificate& rho, const ContractivityResult* theorem2,
                                                       const std::vector<std::pair<Vector, Vector>>& pairs,
                                                       const VerifyContext& ctx);
// Grid version: pairs are grid-state indices and W comes from the grid conditionals.
std::vector<VerificationReport> verify_theorem2_bridge(const GridKernel& kernel, const QuadraticPotential& potential,
                                                       const RhoCertificate& rho, const ContractivityResult* theorem2,
                                                       const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                                                       const VerifyContext& ctx);

std::vector<VerificationReport> verify_corollary1(const GaussianMeasure& q, double rho, double norm_B, double C,
                                                  const std::vector<GaussianMeasure>& ps, const VerifyContext& ctx);

// Grid-state index sets. lhs = d(A, B), rhs = c (sqrt log 1/q(A) + sqrt log 1/q(B)).
using StateSet = std::vector<std::size_t>;
std::vector<VerificationReport> verify_concentration(const GridMeasure& q, double c,
                                                     const std::vector<std::pair<StateSet, StateSet>>& sets,
                                                     const VerifyContext& ctx);
// q restricted to A; D(q|_A || q) = log 1/q(A).
GridMeasure restrict_to(const GridMeasure& q, const StateSet& a);

// Lemma 1 aggregate, one step bound per step, and the divergence-sum bound.
std::vector<VerificationReport> verify_lemma1_and_step(const ChainTrace& trace, const RhoCertificate& rho,
                                                       const VerifyContext& ctx, std::size_t index = 0);

}  // namespace gibbslab
