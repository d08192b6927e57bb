#pragma once
// Constants consumed by the theorems: transport constants rho for the patch
// conditionals and contractivity deficiencies delta.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gibbslab/gibbs.hpp"

namespace gibbslab {

enum class RhoKind { GaussianExact, HolleyStroock, Empirical };
std::string_view to_string(RhoKind k);

struct RhoCertificate {
  double rho = 0.0;
  RhoKind kind = RhoKind::GaussianExact;
  std::string scope;    // which conditionals are covered
  std::string meaning;  // "transport" or "log-sobolev" (implies transport)
  bool rigorous = true;  // empirical certificates are lower-confidence estimates
  std::size_t trials = 0;
  std::size_t skipped = 0;  // trials with infinite divergence or W below the guard
  std::uint64_t seed = 0;
};

// min over patches of the smallest eigenvalue of J_II; every Gaussian
// conditional has precision J_II whatever the boundary.
RhoCertificate rho_gaussian_conditionals(const QuadraticPotential& potential, const PatchFamily& family);
// c * exp(-4 k_sup); throws NonpositiveConvexity for c <= 0.
RhoCertificate rho_holley_stroock(double c, double k_sup);

struct RhoSearch {
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  double descent_floor = 1e-3;  // smallest relative mass move in the local descent
};
inline constexpr double kRhoDistanceGuard = 1e-9;

// inf of 2 D(p||Q) / W^2(p, Q) over random Dirichlet trials, each new best
// trial refined by a deterministic mass-moving descent. Adding trials never
// increases the result.
RhoCertificate rho_empirical(const DiscreteConditional& conditional, std::size_t boundary,
                             const RhoSearch& search);
// Minimum over every patch and every boundary value of the kernel's model.
RhoCertificate rho_empirical(const GridKernel& kernel, const RhoSearch& search);

enum class ContractivityMethod { Def1Exact, Def1Exhaustive, Def1Empirical, Def2Matrix, Theorem2Matrix };
std::string_view to_string(ContractivityMethod m);

struct ContractivityCertificate {
  double delta = 1.0;
  std::size_t t = 1;
  ContractivityMethod method = ContractivityMethod::Def1Exact;
  double sup = 0.0;  // the supremum the certificate was extracted from
  bool rigorous = true;
  std::optional<double> matrix_norm;  // for matrix methods (already divided by rho)
  std::vector<double> worst_y, worst_z;  // worst pair for search methods
  std::string note;
};

struct ContractivityFailure {
  double sup = 0.0;
  std::size_t t = 1;
  ContractivityMethod method = ContractivityMethod::Def1Exact;
  std::optional<double> matrix_norm;
  std::string reason;
};

using ContractivityResult = std::variant<ContractivityCertificate, ContractivityFailure>;
inline bool certified(const ContractivityResult& r) {
  return std::holds_alternative<ContractivityCertificate>(r);
}

// delta = 1 - sup / t; a Failure when sup >= t.
ContractivityResult contractivity_from_sup(double sup, std::size_t t, ContractivityMethod method);

struct InfluenceMatrices {
  // A: one row per patch (scaled by sqrt(multiplicity)), one column per site.
  Matrix A;
  // B: one row per (patch, site in patch) (scaled by sqrt(multiplicity)).
  Matrix B;
  std::vector<std::pair<std::size_t, Site>> b_rows;
  bool exact = true;
  std::string evaluation;
};

// Gaussian: alpha_{k,I} = |column k of J_II^{-1} J_{I,.}|.
InfluenceMatrices dobrushin_matrix_A(const QuadraticPotential& potential, const PatchFamily& family);
// Grid: sup of W(Q_I|y, Q_I|z) / |y_k - z_k| over boundary pairs differing at
// site k; exhaustive when at most `pair_budget` pairs, else sampled.
InfluenceMatrices dobrushin_matrix_A(const GridKernel& kernel, std::size_t pair_budget = 1'000'000,
                                     std::uint64_t seed = 0);

// beta_{(I,i),k}(eta, y) = d_ik Phi(eta_I, ybar_I) for k outside I. `eta`
// holds one vector per patch (its sites' values).
InfluenceMatrices matrix_B(const QuadraticPotential& potential, const PatchFamily& family,
                           const std::vector<Vector>& eta, const Vector& y);
// Constant B of a perturbation-free potential.
InfluenceMatrices matrix_B(const QuadraticPotential& potential, const PatchFamily& family);

// Largest singular value by power iteration on the Gram matrix.
double operator_norm(const Matrix& m);
inline constexpr double kPowerIterationTolerance = 1e-12;
inline constexpr std::size_t kPowerIterationCap = 10'000;

// Stacked mean-shift operator: sum_I mult W^2(Q_I|y, Q_I|z) = |G (y - z)|^2.
Matrix def1_gain_matrix(const QuadraticPotential& potential, const PatchFamily& family);

ContractivityResult check_contractivity_def1(const QuadraticPotential& potential, const PatchFamily& family);

struct Def1Search {
  std::size_t pair_budget = 2'000'000;  // exhaustive below this many state pairs
  std::size_t random_pairs = 20'000;
  std::size_t restarts = 200;
  std::uint64_t seed = 0;
};
ContractivityResult check_contractivity_def1(const GridKernel& kernel, const Def1Search& search = {});

// Definition 2: delta = 1 - |A|^2 / t.
ContractivityResult check_definition2(const InfluenceMatrices& m, std::size_t t);

struct Theorem2Search {
  std::size_t samples = 200;
  std::uint64_t seed = 0;
  double box = 3.0;  // (eta, y) drawn uniformly from [-box, box]
};
// sup |B/rho|^2 against t; exact for a perturbation-free potential.
ContractivityResult check_theorem2(const QuadraticPotential& potential, const PatchFamily& family,
                                   const RhoCertificate& rho, const Theorem2Search& search = {});

// C^2 / (1 - (norm_B/rho)^2) * (2/rho); NotContractive once norm_B/rho >= 1 - 1e-9.
double corollary1_coefficient(double rho, double norm_B, double C);

}  // namespace gibbslab
