#pragma once

#include <span>
#include <string>
#include <vector>

#include "gibbslab/measures.hpp"

namespace gibbslab {

class GridKernel;

// KL divergence; +infinity is a distinguished state, never a large float.
class Divergence {
 public:
  static Divergence finite(double value) { return Divergence(value, false); }
  static Divergence infinite() { return Divergence(0.0, true); }

  bool is_infinite() const { return infinite_; }
  // Throws Indeterminate when infinite.
  double value() const;
  std::string to_string() const;

 private:
  Divergence(double v, bool inf) : value_(v), infinite_(inf) {}
  double value_;
  bool infinite_;
};

// Closed form; +inf when p is not absolutely continuous w.r.t. q (q may be
// semidefinite).
Divergence kl_gaussian(const GaussianMeasure& p, const GaussianMeasure& q);
// sum p log(p/q) over a common grid; throws GridMismatch.
Divergence kl_grid(const GridMeasure& p, const GridMeasure& q);
Divergence kl_weights(std::span<const double> p, std::span<const double> q);

// D(p||q) - [sum_l D(r(l-1)||r(l)) + D(r(M)||q)] with r(0) = p and
// r(l) = r(l-1) Gamma_{I_l}; `sequence` holds patch indices into the
// kernel's family. Throws Indeterminate if any term is infinite.
double chain_decomposition_residual(const GridMeasure& p, const GridKernel& kernel,
                                    const std::vector<std::size_t>& sequence);

}  // namespace gibbslab
