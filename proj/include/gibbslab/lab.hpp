#pragma once
// Model configs and the certify -> verify -> simulate pipeline shared by the
// command-line front end and the acceptance checks.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gibbslab/verify.hpp"

namespace gibbslab {

enum class Mode { Gaussian, Grid };
std::string_view to_string(Mode m);

struct LabConfig {
  std::string name;
  Mode mode = Mode::Gaussian;
  QuadraticPotential potential;
  PatchFamily family;
  Axes axes;         // grid mode only
  std::string hash;  // fnv1a of the canonical JSON form
};

// Throws Error(ConfigError) with a line number for syntax errors and the
// offending field path for schema errors.
LabConfig parse_config(const std::string& text, const std::string& source = "<config>");
LabConfig load_config(const std::string& path);

class Lab {
 public:
  explicit Lab(LabConfig config);

  const LabConfig& config() const { return config_; }
  Mode mode() const { return config_.mode; }
  const PatchFamily& family() const { return config_.family; }
  const QuadraticPotential& potential() const { return config_.potential; }

  // Absent when J is not positive definite (no Gaussian reference law).
  const GaussianKernel* gaussian() const { return gaussian_ ? &*gaussian_ : nullptr; }
  const GridKernel* grid() const { return grid_ ? &*grid_ : nullptr; }
  std::string gaussian_status() const { return gaussian_status_; }

 private:
  LabConfig config_;
  std::optional<GaussianKernel> gaussian_;
  std::optional<GridKernel> grid_;
  std::string gaussian_status_;
};

struct CertifyOptions {
  std::uint64_t seed = 0;
  std::size_t rho_trials = 1000;
  Def1Search def1;
  Theorem2Search theorem2;
};

struct Certification {
  std::size_t N = 0, t = 0, v = 0;
  RhoCertificate rho;                          // the constant the theorems consume
  std::optional<RhoCertificate> rho_continuum;  // grid mode: constant of the undiscretized potential
  ContractivityResult contractivity;           // effective Definition-1 result
  std::optional<ContractivityResult> def1_grid, def1_continuum;
  ContractivityResult definition2;
  std::optional<ContractivityResult> theorem2;
  double norm_A = 0.0;
  std::optional<double> norm_B;  // |B| (not divided by rho)
  std::optional<MChoice> M;
  double C = 0.0;

  bool certified() const { return gibbslab::certified(contractivity); }
  double delta() const;  // throws NotContractive when not certified
  Theorem1Constants theorem1() const;
};

Certification certify(const Lab& lab, const CertifyOptions& options = {});

struct SuiteOptions {
  std::vector<std::string> ids;  // empty: every suite the mode supports
  std::size_t trials = 200;
  std::uint64_t seed = 0;
  ToleranceTable tolerances;
};

// Suites the lab's mode supports, in canonical order.
std::vector<std::string> supported_suites(const Lab& lab);
std::vector<VerificationReport> run_suites(const Lab& lab, const Certification& cert, const SuiteOptions& options);

struct SimulateOptions {
  std::size_t steps = 30;
  std::size_t trials = 500;
  std::uint64_t seed = 0;
};
// Coupled-chain decay curve; the envelope rows (1 - t delta/N)^m W^2(p, r)
// are omitted when `cert` is null or not certified.
void simulate_curves(const Lab& lab, const Certification* cert, const SimulateOptions& options, std::ostream& csv);

// Tail sets {u.x <= a} and {u.x >= b} along a random direction.
std::pair<StateSet, StateSet> random_tail_sets(const GridMeasure& q, Rng& rng);

}  // namespace gibbslab
