#include <algorithm>
#include <cmath>
#include <numeric>

#include "gibbslab/error.hpp"
#include "gibbslab/transport.hpp"

namespace gibbslab {

Coupling monotone_coupling_sorted(std::span<const double> xs, std::span<const double> mu,
                                  std::span<const double> ys, std::span<const double> nu) {
  Coupling out;
  const std::size_t m = xs.size(), n = ys.size();
  std::size_t i = 0, j = 0;
  double ra = m ? mu[0] : 0.0;
  double rb = n ? nu[0] : 0.0;
  while (i < m && j < n) {
    if (ra < rb) {
      if (ra > 0.0) {
        const double d = xs[i] - ys[j];
        out.entries.push_back({i, j, ra});
        out.cost += ra * d * d;
      }
      rb -= ra;
      if (++i < m) ra = mu[i];
    } else {
      if (rb > 0.0) {
        const double d = xs[i] - ys[j];
        out.entries.push_back({i, j, rb});
        out.cost += rb * d * d;
      }
      ra -= rb;
      if (++j < n) rb = nu[j];
    }
  }
  return out;
}

TransportResult w2_1d_monotone(std::span<const double> xs, std::span<const double> mu,
                               std::span<const double> ys, std::span<const double> nu) {
  require(xs.size() == mu.size() && ys.size() == nu.size(), ErrorCode::DimensionMismatch,
          "support and weight lengths differ");
  require(!xs.empty() && !ys.empty(), ErrorCode::InvalidArgument, "empty support");
  for (double w : mu) require(w >= 0.0, ErrorCode::InvalidArgument, "negative weight");
  for (double w : nu) require(w >= 0.0, ErrorCode::InvalidArgument, "negative weight");
  const double sa = std::accumulate(mu.begin(), mu.end(), 0.0);
  const double sb = std::accumulate(nu.begin(), nu.end(), 0.0);
  require(std::abs(sa - 1.0) <= 1e-9 && std::abs(sb - 1.0) <= 1e-9, ErrorCode::InvalidArgument,
          "weights must be normalized");

  auto order = [](std::span<const double> v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    return idx;
  };
  const auto oa = order(xs), ob = order(ys);
  std::vector<double> sx(xs.size()), sm(xs.size()), sy(ys.size()), sn(ys.size());
  for (std::size_t k = 0; k < oa.size(); ++k) sx[k] = xs[oa[k]], sm[k] = mu[oa[k]];
  for (std::size_t k = 0; k < ob.size(); ++k) sy[k] = ys[ob[k]], sn[k] = nu[ob[k]];

  Coupling c = monotone_coupling_sorted(sx, sm, sy, sn);
  TransportResult r;
  r.plan.source_points = Eigen::Map<const Vector>(xs.data(), static_cast<Eigen::Index>(xs.size()));
  r.plan.target_points = Eigen::Map<const Vector>(ys.data(), static_cast<Eigen::Index>(ys.size()));
  r.plan.source_weights.assign(mu.begin(), mu.end());
  r.plan.target_weights.assign(nu.begin(), nu.end());
  for (auto& e : c.entries) r.plan.entries.push_back({oa[e.source], ob[e.target], e.weight});
  r.plan.total_cost = c.cost;
  r.distance = std::sqrt(std::max(0.0, c.cost));
  require(r.plan.max_violation() <= kPlanTolerance, ErrorCode::NonConvergence,
          "monotone coupling violates plan invariants");
  return r;
}

}  // namespace gibbslab
