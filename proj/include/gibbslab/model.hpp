#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "gibbslab/measures.hpp"
#include "gibbslab/patch_family.hpp"
#include "gibbslab/potential.hpp"

namespace gibbslab {

// Law of X_I given the outside coordinates X_{~I} = x for a Gaussian q:
// N(base_mean + gain * x, covariance).
struct GaussianConditional {
  std::vector<Site> sites;
  std::vector<Site> outside;
  Vector base_mean;
  Matrix gain;        // |I| x |~I|
  Matrix covariance;  // |I| x |I|

  Vector mean_given(const Vector& outside_values) const { return base_mean + gain * outside_values; }
};

// Law of X_I given each boundary assignment of a grid measure: row b of
// `table` (patch_count entries) is the distribution on the patch grid for the
// boundary assignment with index b of `indexer`. Rows whose boundary has no q
// mass are left all-zero and flagged in `defined`.
struct DiscreteConditional {
  std::vector<Site> sites;
  std::vector<Site> outside;
  PatchIndexer indexer;
  Matrix patch_points;  // patch_count x |I|, row-major over the patch sites
  std::vector<double> table;
  std::vector<double> boundary_mass;
  std::vector<bool> defined;

  std::size_t patch_count() const { return indexer.patch_count(); }
  std::size_t boundary_count() const { return indexer.boundary_count(); }
  std::span<const double> slice(std::size_t boundary) const {
    return {table.data() + boundary * patch_count(), patch_count()};
  }
};

using ConditionalLaw = std::variant<GaussianConditional, DiscreteConditional>;

// Reference law q in Gaussian mode: exp(-Phi) with quadratic Phi (no K).
class GaussianModel {
 public:
  explicit GaussianModel(QuadraticPotential potential);

  const QuadraticPotential& potential() const { return potential_; }
  const GaussianMeasure& measure() const { return measure_; }
  std::size_t dimension() const { return measure_.dimension(); }

  GaussianConditional conditional(const std::vector<Site>& sites) const;

 private:
  QuadraticPotential potential_;
  GaussianMeasure measure_;
};

// Reference law q in discrete mode. The potential, when present, is the one q
// was discretized from.
class GridModel {
 public:
  explicit GridModel(GridMeasure q, std::optional<QuadraticPotential> potential = {});

  const GridMeasure& measure() const { return q_; }
  const std::optional<QuadraticPotential>& potential() const { return potential_; }
  std::size_t dimension() const { return q_.dimension(); }

  DiscreteConditional conditional(const std::vector<Site>& sites) const;

 private:
  GridMeasure q_;
  std::optional<QuadraticPotential> potential_;
};

// mean = J^{-1} h, covariance = J^{-1}. Throws NotPositiveDefinite, or
// InvalidArgument when K is present.
GaussianMeasure gaussian_from_potential(const QuadraticPotential& potential);

// Conditional law of X_I given the rest. Gaussian measures are conditioned via
// their precision matrix; grid measures by renormalizing each boundary slice.
GaussianConditional conditional_law(const GaussianMeasure& q, const std::vector<Site>& sites);
DiscreteConditional conditional_law(const GridMeasure& q, const std::vector<Site>& sites);

// Weights exp(-Phi(x)) at every grid point, normalized. The maximum of -Phi is
// subtracted before exponentiating.
GridMeasure discretize(const QuadraticPotential& potential, const Axes& axes);

}  // namespace gibbslab
