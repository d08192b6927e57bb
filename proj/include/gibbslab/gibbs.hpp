#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <variant>
#include <vector>

#include "gibbslab/divergence.hpp"
#include "gibbslab/model.hpp"
#include "gibbslab/rng.hpp"
#include "gibbslab/transport.hpp"

namespace gibbslab {

// Gibbs-sampler kernels for a grid reference law. Patch conditionals are
// tabulated once at construction.
class GridKernel {
 public:
  GridKernel(GridModel model, PatchFamily family);

  const GridModel& model() const { return model_; }
  const GridMeasure& q() const { return model_.measure(); }
  const PatchFamily& family() const { return family_; }
  const DiscreteConditional& conditional(std::size_t patch) const { return conditionals_.at(patch); }

  // mu Gamma_I: outside-I marginal kept, inside redrawn from Q_I. Boundary
  // values q never visits keep mu's own conditional.
  GridMeasure apply_patch(const GridMeasure& mu, std::size_t patch) const;
  // (1/N) sum_I multiplicity(I) * mu Gamma_I
  GridMeasure apply(const GridMeasure& mu) const;
  GridMeasure apply_power(const GridMeasure& mu, std::size_t m) const;

  // Optimal coupling between two laws on the patch grid of `patch`
  // (monotone for one-site patches, exact LP otherwise).
  Coupling couple(std::size_t patch, std::span<const double> a, std::span<const double> b) const;

 private:
  GridModel model_;
  PatchFamily family_;
  std::vector<DiscreteConditional> conditionals_;
};

class GaussianKernel {
 public:
  GaussianKernel(GaussianModel model, PatchFamily family);

  const GaussianModel& model() const { return model_; }
  const GaussianMeasure& q() const { return model_.measure(); }
  const PatchFamily& family() const { return family_; }
  const GaussianConditional& conditional(std::size_t patch) const { return conditionals_.at(patch); }
  // Cholesky factor of the conditional covariance of each patch.
  const Matrix& conditional_factor(std::size_t patch) const { return factors_.at(patch); }

  GaussianMeasure apply_patch(const GaussianMeasure& mu, std::size_t patch) const;
  // The mixture over patches is not Gaussian: always throws GaussianUnsupported.
  [[noreturn]] void apply(const GaussianMeasure& mu) const;

 private:
  GaussianModel model_;
  PatchFamily family_;
  std::vector<GaussianConditional> conditionals_;
  std::vector<Matrix> factors_;
};

// Single-patch entry points keyed by site set rather than patch index.
GridMeasure apply_gamma_patch(const GridMeasure& mu, const std::vector<Site>& sites,
                              const GridModel& q);
GaussianMeasure apply_gamma_patch(const GaussianMeasure& mu, const std::vector<Site>& sites,
                                  const GaussianModel& q);

using AnyMeasure = std::variant<GaussianMeasure, GridMeasure>;
using AnyModel = std::variant<GaussianModel, GridModel>;
// Throws ModeMismatch when the measure and model kinds differ.
AnyMeasure apply_gamma_patch(const AnyMeasure& mu, const std::vector<Site>& sites, const AnyModel& q);

// Interpolation chain r(0) = p, r(l) = r(l-1) Gamma_{I_l}, with consecutive
// states joined by optimal conditional couplings.
struct ChainTrace {
  std::vector<std::size_t> sequence;
  std::vector<GridMeasure> grid_laws;          // r(0..M), grid mode
  std::vector<GaussianMeasure> gaussian_laws;  // r(0..M), Gaussian mode
  std::vector<double> step_moments;            // E|Z_I(l) - Z_I(l-1)|^2
  std::vector<Divergence> step_divergences;    // D(r(l-1) || r(l))
  Divergence initial_divergence = Divergence::finite(0.0);  // D(p || q)
  Divergence final_divergence = Divergence::finite(0.0);    // D(r(M) || q)
  double end_to_end_moment = 0.0;              // E|Y - Z|^2
  std::vector<std::size_t> visits;             // patches of the sequence containing each site
  Matrix joint;                                // dist(Y, Z) over grid states (grid mode)
  std::size_t patch_total = 0;                 // N
  std::size_t max_coverage = 0;                // v

  std::size_t steps() const { return sequence.size(); }
  void write_csv(std::ostream& out) const;
};

// Grid joints are dense over states; throws SizeLimit above this many entries.
inline constexpr std::size_t kMaxJointEntries = 4'000'000;

ChainTrace interpolation_chain(const GridMeasure& p, const GridKernel& kernel,
                               const std::vector<std::size_t>& sequence);
// Exact in Gaussian mode too: every state is an affine image of Y.
ChainTrace interpolation_chain(const GaussianMeasure& p, const GaussianKernel& kernel,
                               const std::vector<std::size_t>& sequence);

// Multiplicity-weighted draw of a patch index.
std::size_t draw_patch(const PatchFamily& family, Rng& rng);
std::vector<std::size_t> draw_sequence(const PatchFamily& family, std::size_t m, Rng& rng);

struct CoupledChainStats {
  std::vector<double> mean;    // E|Y(m) - U(m)|^2, m = 0..steps
  std::vector<double> standard_error;
  std::size_t trials = 0;
  std::uint64_t seed = 0;

  std::size_t steps() const { return mean.empty() ? 0 : mean.size() - 1; }
  void write_csv(std::ostream& out) const;
};

// Two copies of the sampler driven by the same patch draws, started from the
// optimal coupling of (p, r) and stepped with optimal conditional couplings.
CoupledChainStats simulate_coupled_chain(const GaussianKernel& kernel, const GaussianMeasure& p,
                                         const GaussianMeasure& r, std::size_t steps,
                                         std::size_t trials, std::uint64_t seed);
CoupledChainStats simulate_coupled_chain(const GridKernel& kernel, const GridMeasure& p,
                                         const GridMeasure& r, std::size_t steps,
                                         std::size_t trials, std::uint64_t seed);

}  // namespace gibbslab
