#pragma once

// Data-parallel inner loops. Every kernel has a portable scalar reference in
// `kernels::scalar` and, on x86-64, an AVX2 variant in `kernels::avx2`. The
// unqualified entry points dispatch to the variant selected at startup
// (highest available ISA, overridable with GIBBSLAB_ISA=scalar|avx2).

#include <cstddef>
#include <span>
#include <string_view>

namespace gibbslab::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);
bool isa_available(Isa isa);
Isa active_isa();
void select_isa(Isa isa);

// Restores the previously active ISA on destruction.
class ScopedIsa {
 public:
  explicit ScopedIsa(Isa isa);
  ~ScopedIsa();
  ScopedIsa(const ScopedIsa&) = delete;
  ScopedIsa& operator=(const ScopedIsa&) = delete;

 private:
  Isa previous_;
};

struct ArgMin {
  double value;
  std::size_t index;  // smallest index attaining `value`
};

double sum(std::span<const double> a);
double dot(std::span<const double> a, std::span<const double> b);
void scale(std::span<const double> in, double factor, std::span<double> out);
// sum_i w_i * (x_i - y_i)^2
double weighted_squared_difference(std::span<const double> w, std::span<const double> x,
                                   std::span<const double> y);
// out[j] = sum_d (point[d] - targets[d * count + j])^2; `targets` is
// dimension-major with `point.size()` rows of `count` coordinates.
void squared_distances(std::span<const double> point, const double* targets, std::size_t count,
                       std::span<double> out);
// argmin_j (cost[j] - column_potential[j]) - row_potential, nonempty input.
ArgMin reduced_cost_argmin(std::span<const double> cost, std::span<const double> column_potential,
                           double row_potential);

#define GIBBSLAB_KERNEL_DECLS                                                                  \
  double sum(std::span<const double> a);                                                       \
  double dot(std::span<const double> a, std::span<const double> b);                            \
  void scale(std::span<const double> in, double factor, std::span<double> out);                \
  double weighted_squared_difference(std::span<const double> w, std::span<const double> x,     \
                                     std::span<const double> y);                               \
  void squared_distances(std::span<const double> point, const double* targets,                 \
                         std::size_t count, std::span<double> out);                            \
  ArgMin reduced_cost_argmin(std::span<const double> cost,                                     \
                             std::span<const double> column_potential, double row_potential);

namespace scalar {
GIBBSLAB_KERNEL_DECLS
}
namespace avx2 {
GIBBSLAB_KERNEL_DECLS
}

#undef GIBBSLAB_KERNEL_DECLS

}  // namespace gibbslab::kernels
