#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "gibbslab/error.hpp"
#include "gibbslab/kernels.hpp"
#include "gibbslab/transport.hpp"

namespace gibbslab {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

struct BasicCell {
  std::size_t row, col;
  double flow;
};

// Transportation simplex on the compressed (positive-weight) problem. Nodes
// 0..m-1 are rows, m..m+n-1 columns; the m+n-1 basic cells form a spanning
// tree over them.
class Simplex {
 public:
  Simplex(std::span<const double> cost, std::size_t stride, std::vector<std::size_t> rows,
          std::vector<std::size_t> cols, std::vector<double> a, std::vector<double> b,
          const LpOptions& opt)
      : cost_(cost), stride_(stride), rows_(std::move(rows)), cols_(std::move(cols)),
        m_(a.size()), n_(b.size()), opt_(opt) {
    compact_cost_.resize(m_ * n_);
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t j = 0; j < n_; ++j) compact_cost_[i * n_ + j] = c(i, j);
    max_cost_ = 0.0;
    for (double v : compact_cost_) max_cost_ = std::max(max_cost_, std::abs(v));
    northwest_corner(a, b);
  }

  void run() {
    const std::size_t cap = opt_.max_pivots ? opt_.max_pivots : 50 * (m_ + n_) * (m_ + n_) + 1000;
    const double tol = opt_.pivot_tolerance * std::max(1.0, max_cost_);
    std::vector<double> u(m_), v(n_);
    for (std::size_t pivots = 0;; ++pivots) {
      potentials(u, v);
      std::size_t ei = kNone, ej = kNone;
      double best = -tol;
      for (std::size_t i = 0; i < m_; ++i) {
        const auto am = kernels::reduced_cost_argmin(
            std::span<const double>(compact_cost_).subspan(i * n_, n_), v, u[i]);
        if (am.value < best) best = am.value, ei = i, ej = am.index;
      }
      if (ei == kNone) return;
      require(pivots < cap, ErrorCode::NonConvergence, "transportation simplex pivot cap reached");
      pivot(ei, ej);
    }
  }

  Coupling result() const {
    Coupling out;
    for (const auto& cell : cells_) {
      if (cell.flow <= 0.0) continue;
      out.entries.push_back({rows_[cell.row], cols_[cell.col], cell.flow});
      out.cost += cell.flow * c(cell.row, cell.col);
    }
    std::sort(out.entries.begin(), out.entries.end(), [](const PlanEntry& x, const PlanEntry& y) {
      return x.source != y.source ? x.source < y.source : x.target < y.target;
    });
    return out;
  }

 private:
  double c(std::size_t i, std::size_t j) const { return cost_[rows_[i] * stride_ + cols_[j]]; }

  void add_cell(std::size_t i, std::size_t j, double flow) {
    const std::size_t id = cells_.size();
    cells_.push_back({i, j, flow});
    adj_[i].push_back(id);
    adj_[m_ + j].push_back(id);
  }

  void northwest_corner(const std::vector<double>& a, const std::vector<double>& b) {
    adj_.assign(m_ + n_, {});
    cells_.reserve(m_ + n_ - 1);
    std::size_t i = 0, j = 0;
    double ra = a[0], rb = b[0];
    while (true) {
      const double x = std::max(0.0, std::min(ra, rb));
      add_cell(i, j, x);
      ra -= x;
      rb -= x;
      if (i == m_ - 1 && j == n_ - 1) break;
      const bool next_row = (j == n_ - 1) || (i < m_ - 1 && ra <= rb);
      if (next_row) {
        ra = a[++i];
      } else {
        rb = b[++j];
      }
    }
  }

  // Tree walk from row 0 fixing u_0 = 0 and u_i + v_j = c_ij on basic cells.
  void potentials(std::vector<double>& u, std::vector<double>& v) {
    std::vector<char> seen(m_ + n_, 0);
    stack_.clear();
    stack_.push_back(0);
    seen[0] = 1;
    u[0] = 0.0;
    while (!stack_.empty()) {
      const std::size_t node = stack_.back();
      stack_.pop_back();
      for (std::size_t id : adj_[node]) {
        const auto& cell = cells_[id];
        const std::size_t other = node < m_ ? m_ + cell.col : cell.row;
        if (seen[other]) continue;
        seen[other] = 1;
        if (other >= m_)
          v[cell.col] = c(cell.row, cell.col) - u[cell.row];
        else
          u[cell.row] = c(cell.row, cell.col) - v[cell.col];
        stack_.push_back(other);
      }
    }
  }

  void pivot(std::size_t ei, std::size_t ej) {
    // Parent edges of the tree rooted at row node ei.
    parent_cell_.assign(m_ + n_, kNone);
    std::vector<char> seen(m_ + n_, 0);
    stack_.clear();
    stack_.push_back(ei);
    seen[ei] = 1;
    while (!stack_.empty()) {
      const std::size_t node = stack_.back();
      stack_.pop_back();
      for (std::size_t id : adj_[node]) {
        const auto& cell = cells_[id];
        const std::size_t other = node < m_ ? m_ + cell.col : cell.row;
        if (seen[other]) continue;
        seen[other] = 1;
        parent_cell_[other] = id;
        stack_.push_back(other);
      }
    }
    // Path from column node ej back to ei; odd positions lose flow.
    path_.clear();
    for (std::size_t node = m_ + ej; node != ei;) {
      const std::size_t id = parent_cell_[node];
      path_.push_back(id);
      const auto& cell = cells_[id];
      node = node < m_ ? m_ + cell.col : cell.row;
    }
    std::size_t leave = kNone;
    double theta = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < path_.size(); k += 2) {
      const double f = cells_[path_[k]].flow;
      if (f < theta) theta = f, leave = path_[k];
    }
    theta = std::max(0.0, theta);
    for (std::size_t k = 0; k < path_.size(); ++k) cells_[path_[k]].flow += (k % 2 ? theta : -theta);

    auto detach = [&](std::size_t node, std::size_t id) {
      auto& list = adj_[node];
      list.erase(std::find(list.begin(), list.end(), id));
    };
    const auto old = cells_[leave];
    detach(old.row, leave);
    detach(m_ + old.col, leave);
    cells_[leave] = {ei, ej, theta};
    adj_[ei].push_back(leave);
    adj_[m_ + ej].push_back(leave);
  }

  std::span<const double> cost_;
  std::size_t stride_;
  std::vector<std::size_t> rows_, cols_;
  std::size_t m_, n_;
  LpOptions opt_;
  std::vector<double> compact_cost_;
  double max_cost_ = 0.0;
  std::vector<BasicCell> cells_;
  std::vector<std::vector<std::size_t>> adj_;
  std::vector<std::size_t> stack_, parent_cell_, path_;
};

double checked_total(std::span<const double> w, const char* what) {
  double s = 0.0;
  for (double x : w) {
    require(std::isfinite(x) && x >= 0.0, ErrorCode::InvalidArgument,
            std::string(what) + " weights must be finite and nonnegative");
    s += x;
  }
  require(s > 0.0, ErrorCode::InvalidArgument, std::string(what) + " weights sum to zero");
  return s;
}

// Eigen storage is column-major, so a points matrix (one row per point) is
// already laid out dimension-major.
const double* dimension_major(const Matrix& points) { return points.data(); }

bool sorted_line(const Matrix& points) {
  if (points.cols() != 1) return false;
  for (Eigen::Index k = 1; k < points.rows(); ++k)
    if (!(points(k - 1, 0) < points(k, 0))) return false;
  return true;
}

}  // namespace

Coupling solve_transportation(std::span<const double> cost, std::span<const double> supply,
                              std::span<const double> demand, const LpOptions& options) {
  const std::size_t m = supply.size(), n = demand.size();
  require(m >= 1 && n >= 1, ErrorCode::InvalidArgument, "empty transportation problem");
  require(cost.size() == m * n, ErrorCode::DimensionMismatch, "cost matrix has wrong size");
  require(m * n <= options.max_entries, ErrorCode::SizeLimit,
          "transportation problem with " + std::to_string(m) + " x " + std::to_string(n) +
              " entries exceeds the configured limit of " + std::to_string(options.max_entries));
  const double sa = checked_total(supply, "supply");
  const double sb = checked_total(demand, "demand");
  require(std::abs(sa - sb) <= 1e-12 * std::max(1.0, sa), ErrorCode::InvalidArgument,
          "supply and demand totals differ");

  std::vector<std::size_t> rows, cols;
  std::vector<double> a, b;
  for (std::size_t i = 0; i < m; ++i)
    if (supply[i] > 0.0) rows.push_back(i), a.push_back(supply[i]);
  for (std::size_t j = 0; j < n; ++j)
    if (demand[j] > 0.0) cols.push_back(j), b.push_back(demand[j] * (sa / sb));

  Simplex s(cost, n, std::move(rows), std::move(cols), std::move(a), std::move(b), options);
  s.run();
  return s.result();
}

Coupling optimal_coupling_on_support(const Matrix& points, std::span<const double> mu,
                                     std::span<const double> nu, const LpOptions& options) {
  const auto s = static_cast<std::size_t>(points.rows());
  require(mu.size() == s && nu.size() == s, ErrorCode::DimensionMismatch,
          "weights do not match support size");
  if (sorted_line(points)) {
    std::vector<double> xs(points.col(0).data(), points.col(0).data() + s);
    return monotone_coupling_sorted(xs, mu, xs, nu);
  }
  if (std::equal(mu.begin(), mu.end(), nu.begin())) {
    Coupling identity;
    for (std::size_t k = 0; k < s; ++k)
      if (mu[k] > 0.0) identity.entries.push_back({k, k, mu[k]});
    return identity;
  }
  const double* t = dimension_major(points);
  std::vector<double> cost(s * s);
  std::vector<double> p(static_cast<std::size_t>(points.cols()));
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t d = 0; d < p.size(); ++d) p[d] = points(static_cast<Eigen::Index>(i), d);
    kernels::squared_distances(p, t, s, std::span<double>(cost).subspan(i * s, s));
  }
  return solve_transportation(cost, mu, nu, options);
}

WeightedPoints WeightedPoints::from_grid(const GridMeasure& g) {
  return {g.points(), std::vector<double>(g.weights().begin(), g.weights().end())};
}

WeightedPoints WeightedPoints::on_line(std::span<const double> xs, std::span<const double> w) {
  require(xs.size() == w.size(), ErrorCode::DimensionMismatch, "support and weight lengths differ");
  WeightedPoints out;
  out.points = Eigen::Map<const Vector>(xs.data(), static_cast<Eigen::Index>(xs.size()));
  out.weights.assign(w.begin(), w.end());
  return out;
}

TransportResult w2_exact_lp(const WeightedPoints& mu, const WeightedPoints& nu,
                            const LpOptions& options) {
  require(mu.dimension() == nu.dimension(), ErrorCode::DimensionMismatch,
          "point sets live in different dimensions");
  require(static_cast<std::size_t>(mu.points.rows()) == mu.size() &&
              static_cast<std::size_t>(nu.points.rows()) == nu.size(),
          ErrorCode::DimensionMismatch, "support and weight lengths differ");
  const double sa = checked_total(mu.weights, "source");
  const double sb = checked_total(nu.weights, "target");
  require(std::abs(sa - 1.0) <= 1e-9 && std::abs(sb - 1.0) <= 1e-9, ErrorCode::InvalidArgument,
          "weights must be normalized");
  const std::size_t m = mu.size(), n = nu.size();
  require(m * n <= options.max_entries, ErrorCode::SizeLimit,
          "transportation problem with " + std::to_string(m) + " x " + std::to_string(n) +
              " entries exceeds the configured limit of " + std::to_string(options.max_entries));

  const double* t = dimension_major(nu.points);
  std::vector<double> cost(m * n);
  std::vector<double> p(mu.dimension());
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t d = 0; d < p.size(); ++d) p[d] = mu.points(static_cast<Eigen::Index>(i), d);
    kernels::squared_distances(p, t, n, std::span<double>(cost).subspan(i * n, n));
  }
  // Rescale the target so totals agree to rounding before the simplex check.
  std::vector<double> b(nu.weights);
  for (double& x : b) x *= sa / sb;
  Coupling c = solve_transportation(cost, mu.weights, b, options);

  TransportResult r;
  r.plan.source_points = mu.points;
  r.plan.target_points = nu.points;
  r.plan.source_weights = mu.weights;
  r.plan.target_weights = nu.weights;
  r.plan.entries = std::move(c.entries);
  r.plan.total_cost = c.cost;
  r.distance = std::sqrt(std::max(0.0, c.cost));
  require(r.plan.max_violation() <= kPlanTolerance, ErrorCode::NonConvergence,
          "transport plan violates marginal invariants");
  return r;
}

TransportResult w2_exact_lp(const GridMeasure& mu, const GridMeasure& nu, const LpOptions& options) {
  return w2_exact_lp(WeightedPoints::from_grid(mu), WeightedPoints::from_grid(nu), options);
}

Matrix TransportPlan::dense() const {
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(source_weights.size()),
                            static_cast<Eigen::Index>(target_weights.size()));
  for (const auto& e : entries)
    out(static_cast<Eigen::Index>(e.source), static_cast<Eigen::Index>(e.target)) += e.weight;
  return out;
}

double TransportPlan::max_violation() const {
  std::vector<double> row(source_weights.size(), 0.0), col(target_weights.size(), 0.0);
  double worst = 0.0, cost = 0.0;
  for (const auto& e : entries) {
    worst = std::max(worst, -e.weight);
    row.at(e.source) += e.weight;
    col.at(e.target) += e.weight;
    cost += e.weight * (source_points.row(static_cast<Eigen::Index>(e.source)) -
                        target_points.row(static_cast<Eigen::Index>(e.target)))
                           .squaredNorm();
  }
  for (std::size_t i = 0; i < row.size(); ++i) worst = std::max(worst, std::abs(row[i] - source_weights[i]));
  for (std::size_t j = 0; j < col.size(); ++j) worst = std::max(worst, std::abs(col[j] - target_weights[j]));
  worst = std::max(worst, std::abs(cost - total_cost) / std::max(1.0, std::abs(total_cost)));
  return worst;
}

void TransportPlan::write_csv(std::ostream& out) const {
  out << "source,target,weight\n";
  out.precision(17);
  for (const auto& e : entries) out << e.source << ',' << e.target << ',' << e.weight << '\n';
}

}  // namespace gibbslab
