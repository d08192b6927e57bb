#include <immintrin.h>

#include "gibbslab/kernels.hpp"

// Compiled with -mavx2 -mfma; only reached when the CPU reports AVX2.
// Element-wise results (squared_distances, scale, reduced_cost_argmin) match
// the scalar kernels bit-for-bit; reductions differ only by summation order.

namespace gibbslab::kernels::avx2 {

namespace {

double horizontal_sum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

double sum(std::span<const double> a) {
  const std::size_t n = a.size();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(a.data() + i));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(a.data() + i + 4));
  }
  for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(a.data() + i));
  double s = horizontal_sum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i];
  return s;
}

double dot(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + i + 4), _mm256_loadu_pd(b.data() + i + 4),
                           acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i), acc0);
  double s = horizontal_sum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void scale(std::span<const double> in, double factor, std::span<double> out) {
  const std::size_t n = in.size();
  const __m256d f = _mm256_set1_pd(factor);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out.data() + i, _mm256_mul_pd(_mm256_loadu_pd(in.data() + i), f));
  for (; i < n; ++i) out[i] = in[i] * factor;
}

double weighted_squared_difference(std::span<const double> w, std::span<const double> x,
                                   std::span<const double> y) {
  const std::size_t n = w.size();
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x.data() + i), _mm256_loadu_pd(y.data() + i));
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(w.data() + i), _mm256_mul_pd(d, d), acc);
  }
  double s = horizontal_sum(acc);
  for (; i < n; ++i) {
    const double d = x[i] - y[i];
    s += w[i] * (d * d);
  }
  return s;
}

void squared_distances(std::span<const double> point, const double* targets, std::size_t count,
                       std::span<double> out) {
  std::size_t j = 0;
  for (; j + 4 <= count; j += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t d = 0; d < point.size(); ++d) {
      const __m256d diff =
          _mm256_sub_pd(_mm256_set1_pd(point[d]), _mm256_loadu_pd(targets + d * count + j));
      acc = _mm256_add_pd(acc, _mm256_mul_pd(diff, diff));
    }
    _mm256_storeu_pd(out.data() + j, acc);
  }
  for (; j < count; ++j) {
    double acc = 0.0;
    for (std::size_t d = 0; d < point.size(); ++d) {
      const double diff = point[d] - targets[d * count + j];
      acc = acc + diff * diff;
    }
    out[j] = acc;
  }
}

ArgMin reduced_cost_argmin(std::span<const double> cost, std::span<const double> column_potential,
                           double row_potential) {
  const std::size_t n = cost.size();
  if (n < 8) return scalar::reduced_cost_argmin(cost, column_potential, row_potential);

  const __m256d u = _mm256_set1_pd(row_potential);
  const __m256d four = _mm256_set1_pd(4.0);
  __m256d best = _mm256_sub_pd(_mm256_sub_pd(_mm256_loadu_pd(cost.data()),
                                             _mm256_loadu_pd(column_potential.data())),
                               u);
  __m256d best_idx = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
  __m256d idx = _mm256_add_pd(best_idx, four);
  std::size_t j = 4;
  for (; j + 4 <= n; j += 4) {
    const __m256d r = _mm256_sub_pd(
        _mm256_sub_pd(_mm256_loadu_pd(cost.data() + j), _mm256_loadu_pd(column_potential.data() + j)),
        u);
    const __m256d lt = _mm256_cmp_pd(r, best, _CMP_LT_OQ);
    best = _mm256_blendv_pd(best, r, lt);
    best_idx = _mm256_blendv_pd(best_idx, idx, lt);
    idx = _mm256_add_pd(idx, four);
  }

  alignas(32) double values[4];
  alignas(32) double indices[4];
  _mm256_store_pd(values, best);
  _mm256_store_pd(indices, best_idx);
  ArgMin out{values[0], static_cast<std::size_t>(indices[0])};
  for (int lane = 1; lane < 4; ++lane) {
    const auto lane_index = static_cast<std::size_t>(indices[lane]);
    if (values[lane] < out.value || (values[lane] == out.value && lane_index < out.index))
      out = {values[lane], lane_index};
  }
  for (; j < n; ++j) {
    const double r = (cost[j] - column_potential[j]) - row_potential;
    if (r < out.value) out = {r, j};
  }
  return out;
}

}  // namespace gibbslab::kernels::avx2
