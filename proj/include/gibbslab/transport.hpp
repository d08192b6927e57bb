#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "gibbslab/linalg.hpp"
#include "gibbslab/measures.hpp"

namespace gibbslab {

// Finitely supported law on R^d: one support point per row.
struct WeightedPoints {
  Matrix points;
  std::vector<double> weights;

  static WeightedPoints from_grid(const GridMeasure& g);
  static WeightedPoints on_line(std::span<const double> xs, std::span<const double> weights);
  std::size_t size() const { return weights.size(); }
  std::size_t dimension() const { return static_cast<std::size_t>(points.cols()); }
};

struct PlanEntry {
  std::size_t source;
  std::size_t target;
  double weight;
};

// Coupling of two weighted point sets under squared-Euclidean cost. Only the
// nonzero entries of the joint weight matrix are stored.
struct TransportPlan {
  Matrix source_points;
  Matrix target_points;
  std::vector<double> source_weights;
  std::vector<double> target_weights;
  std::vector<PlanEntry> entries;
  double total_cost = 0.0;  // sum of weight * squared distance

  Matrix dense() const;
  // Largest violation of the marginal / nonnegativity / cost invariants.
  double max_violation() const;
  // One "source,target,weight" row per entry, preceded by a header line.
  void write_csv(std::ostream& out) const;
};

struct TransportResult {
  double distance;  // W, not W^2
  TransportPlan plan;
};

struct LpOptions {
  std::size_t max_entries = 1'000'000;
  double pivot_tolerance = 1e-12;
  std::size_t max_pivots = 0;  // 0 selects a size-dependent cap
};

inline constexpr double kPlanTolerance = 1e-9;

// Closed-form W between Gaussians (Bures formula).
double w2_gaussian(const GaussianMeasure& a, const GaussianMeasure& b);

struct AffineMap {
  Matrix linear;
  Vector offset;
  Vector operator()(const Vector& x) const { return linear * x + offset; }
};

// Optimal transport map from `from` to `to`; requires nondegenerate `from`.
AffineMap optimal_gaussian_map(const GaussianMeasure& from, const GaussianMeasure& to);

// Exact transportation linear program with squared-Euclidean cost. Throws
// SizeLimit when the plan would exceed options.max_entries entries.
TransportResult w2_exact_lp(const WeightedPoints& mu, const WeightedPoints& nu,
                            const LpOptions& options = {});
TransportResult w2_exact_lp(const GridMeasure& mu, const GridMeasure& nu,
                            const LpOptions& options = {});

// Monotone (quantile) coupling on the real line.
TransportResult w2_1d_monotone(std::span<const double> xs, std::span<const double> mu,
                               std::span<const double> ys, std::span<const double> nu);

// Lean entry points used by inner loops: squared cost and entries only.
struct Coupling {
  std::vector<PlanEntry> entries;
  double cost = 0.0;
};

// Cost is m x n row-major; supplies and demands must each sum to the same
// total (within 1e-12 relative); zero-weight rows / columns are allowed.
Coupling solve_transportation(std::span<const double> cost, std::span<const double> supply,
                              std::span<const double> demand, const LpOptions& options = {});
// `xs` and `ys` must be sorted ascending.
Coupling monotone_coupling_sorted(std::span<const double> xs, std::span<const double> mu,
                                  std::span<const double> ys, std::span<const double> nu);
// Squared W between two laws on common support points (rows of `points`).
// Uses the monotone coupling when the points are 1D and sorted.
Coupling optimal_coupling_on_support(const Matrix& points, std::span<const double> mu,
                                     std::span<const double> nu, const LpOptions& options = {});

}  // namespace gibbslab
