#include "gibbslab/kernels.hpp"

namespace gibbslab::kernels::scalar {

double sum(std::span<const double> a) {
  double s = 0.0;
  for (double x : a) s += x;
  return s;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void scale(std::span<const double> in, double factor, std::span<double> out) {
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] * factor;
}

double weighted_squared_difference(std::span<const double> w, std::span<const double> x,
                                   std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double d = x[i] - y[i];
    s += w[i] * (d * d);
  }
  return s;
}

void squared_distances(std::span<const double> point, const double* targets, std::size_t count,
                       std::span<double> out) {
  for (std::size_t j = 0; j < count; ++j) out[j] = 0.0;
  for (std::size_t d = 0; d < point.size(); ++d) {
    const double p = point[d];
    const double* row = targets + d * count;
    for (std::size_t j = 0; j < count; ++j) {
      const double diff = p - row[j];
      out[j] = out[j] + diff * diff;
    }
  }
}

ArgMin reduced_cost_argmin(std::span<const double> cost, std::span<const double> column_potential,
                           double row_potential) {
  ArgMin best{(cost[0] - column_potential[0]) - row_potential, 0};
  for (std::size_t j = 1; j < cost.size(); ++j) {
    const double r = (cost[j] - column_potential[j]) - row_potential;
    if (r < best.value) best = {r, j};
  }
  return best;
}

}  // namespace gibbslab::kernels::scalar
