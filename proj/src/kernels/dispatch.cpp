#include <atomic>
#include <cstdlib>
#include <string>

#include "gibbslab/error.hpp"
#include "gibbslab/kernels.hpp"

namespace gibbslab::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(GIBBSLAB_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa initial_isa() {
  const bool avx2 = cpu_has_avx2();
  if (const char* env = std::getenv("GIBBSLAB_ISA")) {
    const std::string requested(env);
    if (requested == "scalar") return Isa::Scalar;
    if (requested == "avx2" && avx2) return Isa::Avx2;
  }
  return avx2 ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

bool use_avx2() {
#if defined(GIBBSLAB_HAVE_AVX2)
  return current().load(std::memory_order_relaxed) == Isa::Avx2;
#else
  return false;
#endif
}

}  // namespace

#if !defined(GIBBSLAB_HAVE_AVX2)
// Without the AVX2 translation unit the avx2 namespace forwards to scalar so
// that equivalence tests still link.
namespace avx2 {
double sum(std::span<const double> a) { return scalar::sum(a); }
double dot(std::span<const double> a, std::span<const double> b) { return scalar::dot(a, b); }
void scale(std::span<const double> in, double f, std::span<double> out) { scalar::scale(in, f, out); }
double weighted_squared_difference(std::span<const double> w, std::span<const double> x,
                                   std::span<const double> y) {
  return scalar::weighted_squared_difference(w, x, y);
}
void squared_distances(std::span<const double> p, const double* t, std::size_t c,
                       std::span<double> out) {
  scalar::squared_distances(p, t, c, out);
}
ArgMin reduced_cost_argmin(std::span<const double> c, std::span<const double> v, double u) {
  return scalar::reduced_cost_argmin(c, v, u);
}
}  // namespace avx2
#endif

std::string_view to_string(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

bool isa_available(Isa isa) { return isa == Isa::Scalar || cpu_has_avx2(); }

Isa active_isa() { return current().load(); }

void select_isa(Isa isa) {
  require(isa_available(isa), ErrorCode::InvalidArgument,
          "instruction set " + std::string(to_string(isa)) + " is not available on this CPU");
  current().store(isa);
}

ScopedIsa::ScopedIsa(Isa isa) : previous_(active_isa()) { select_isa(isa); }
ScopedIsa::~ScopedIsa() { current().store(previous_); }

double sum(std::span<const double> a) { return use_avx2() ? avx2::sum(a) : scalar::sum(a); }

double dot(std::span<const double> a, std::span<const double> b) {
  return use_avx2() ? avx2::dot(a, b) : scalar::dot(a, b);
}

void scale(std::span<const double> in, double factor, std::span<double> out) {
  use_avx2() ? avx2::scale(in, factor, out) : scalar::scale(in, factor, out);
}

double weighted_squared_difference(std::span<const double> w, std::span<const double> x,
                                   std::span<const double> y) {
  return use_avx2() ? avx2::weighted_squared_difference(w, x, y)
                    : scalar::weighted_squared_difference(w, x, y);
}

void squared_distances(std::span<const double> point, const double* targets, std::size_t count,
                       std::span<double> out) {
  use_avx2() ? avx2::squared_distances(point, targets, count, out)
             : scalar::squared_distances(point, targets, count, out);
}

ArgMin reduced_cost_argmin(std::span<const double> cost, std::span<const double> column_potential,
                           double row_potential) {
  return use_avx2() ? avx2::reduced_cost_argmin(cost, column_potential, row_potential)
                    : scalar::reduced_cost_argmin(cost, column_potential, row_potential);
}

}  // namespace gibbslab::kernels
