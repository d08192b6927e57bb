#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "gibbslab/certify.hpp"
#include "gibbslab/error.hpp"

namespace gibbslab {

std::string_view to_string(ContractivityMethod m) {
  switch (m) {
    case ContractivityMethod::Def1Exact: return "def1-exact";
    case ContractivityMethod::Def1Exhaustive: return "def1-exhaustive";
    case ContractivityMethod::Def1Empirical: return "def1-empirical";
    case ContractivityMethod::Def2Matrix: return "def2-matrix";
    case ContractivityMethod::Theorem2Matrix: return "theorem2-matrix";
  }
  return "?";
}

ContractivityResult contractivity_from_sup(double sup, std::size_t t, ContractivityMethod method) {
  require(t >= 1, ErrorCode::InvalidArgument, "coverage t must be at least 1");
  const double td = static_cast<double>(t);
  if (!(sup < td)) {
    ContractivityFailure f;
    f.sup = sup;
    f.t = t;
    f.method = method;
    f.reason = "supremum " + std::to_string(sup) + " is not below t = " + std::to_string(t);
    return f;
  }
  ContractivityCertificate c;
  c.t = t;
  c.method = method;
  c.sup = std::max(0.0, sup);
  c.delta = 1.0 - c.sup / td;
  return c;
}

double operator_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  const Matrix gram = m.transpose() * m;
  const Eigen::Index n = gram.rows();
  // Golden-ratio offsets: deterministic and not orthogonal to structured
  // vectors the way a constant start can be.
  Vector v(n);
  for (Eigen::Index k = 0; k < n; ++k) v(k) = 1.0 + std::fmod(0.6180339887498949 * static_cast<double>(k + 1), 1.0);
  v.normalize();
  double lambda = 0.0;
  for (std::size_t it = 0; it < kPowerIterationCap; ++it) {
    Vector w = gram * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    const double next = v.dot(w);  // Rayleigh quotient
    v = w / norm;
    if (std::abs(next - lambda) <= kPowerIterationTolerance * std::max(next, 1e-300)) return std::sqrt(std::max(0.0, next));
    lambda = next;
  }
  fail(ErrorCode::NonConvergence, "power iteration did not converge; last estimate " +
                                      std::to_string(std::sqrt(std::max(0.0, lambda))));
}

Matrix def1_gain_matrix(const QuadraticPotential& potential, const PatchFamily& family) {
  require(family.site_count() == potential.dimension(), ErrorCode::DimensionMismatch,
          "patch family and potential have different site counts");
  const Matrix& J = potential.J();
  Eigen::Index rows = 0;
  for (const auto& p : family.patches()) rows += static_cast<Eigen::Index>(p.sites.size());
  Matrix G = Matrix::Zero(rows, J.cols());
  Eigen::Index r0 = 0;
  for (std::size_t k = 0; k < family.patch_count(); ++k) {
    const auto& p = family.patch(k);
    const auto out = family.complement(k);
    Eigen::LLT<Matrix> llt(submatrix(J, p.sites, p.sites));
    require(llt.info() == Eigen::Success, ErrorCode::NotPositiveDefinite,
            "patch block of J is not positive definite");
    const Matrix gain = llt.solve(submatrix(J, p.sites, out)) * std::sqrt(static_cast<double>(p.multiplicity));
    for (std::size_t o = 0; o < out.size(); ++o)
      G.block(r0, static_cast<Eigen::Index>(out[o]), gain.rows(), 1) = gain.col(static_cast<Eigen::Index>(o));
    r0 += gain.rows();
  }
  return G;
}

ContractivityResult check_contractivity_def1(const QuadraticPotential& potential, const PatchFamily& family) {
  require(!potential.has_perturbation(), ErrorCode::InvalidArgument,
          "exact Definition-1 check needs a perturbation-free potential");
  const double norm = operator_norm(def1_gain_matrix(potential, family));
  auto r = contractivity_from_sup(norm * norm, family.min_coverage(), ContractivityMethod::Def1Exact);
  std::visit([&](auto& x) { x.matrix_norm = norm; }, r);
  return r;
}

namespace {

// W^2 between two boundary slices of one patch, computed on demand.
class SliceDistances {
 public:
  explicit SliceDistances(const GridKernel& k) : kernel_(k), cache_(k.family().patch_count()) {}
  double w2(std::size_t patch, std::size_t a, std::size_t b) {
    if (a == b) return 0.0;
    if (a > b) std::swap(a, b);
    const auto& c = kernel_.conditional(patch);
    const std::size_t key = a * c.boundary_count() + b;
    auto& m = cache_[patch];
    auto it = m.find(key);
    if (it != m.end()) return it->second;
    const double v = kernel_.couple(patch, c.slice(a), c.slice(b)).cost;
    m.emplace(key, v);
    return v;
  }

 private:
  const GridKernel& kernel_;
  std::vector<std::unordered_map<std::size_t, double>> cache_;
};

}  // namespace

ContractivityResult check_contractivity_def1(const GridKernel& kernel, const Def1Search& search) {
  const GridMeasure& q = kernel.q();
  const PatchFamily& fam = kernel.family();
  const std::size_t s = q.size();
  const Matrix pts = q.points();
  SliceDistances dist(kernel);

  auto ratio = [&](std::size_t y, std::size_t z) {
    if (y == z) return 0.0;
    double num = 0.0;
    for (std::size_t k = 0; k < fam.patch_count(); ++k) {
      const auto& c = kernel.conditional(k);
      const std::size_t by = c.indexer.boundary_of(y), bz = c.indexer.boundary_of(z);
      if (!c.defined[by] || !c.defined[bz]) continue;
      num += static_cast<double>(fam.patch(k).multiplicity) * dist.w2(k, by, bz);
    }
    return num / (pts.row(static_cast<Eigen::Index>(y)) - pts.row(static_cast<Eigen::Index>(z))).squaredNorm();
  };

  double sup = 0.0;
  std::size_t wy = 0, wz = 0;
  auto consider = [&](std::size_t y, std::size_t z) {
    const double r = ratio(y, z);
    if (r > sup) sup = r, wy = y, wz = z;
    return r;
  };

  const bool exhaustive = s * (s - 1) / 2 <= search.pair_budget;
  if (exhaustive) {
    for (std::size_t y = 0; y < s; ++y)
      for (std::size_t z = y + 1; z < s; ++z) consider(y, z);
  } else {
    std::uniform_int_distribution<std::size_t> any(0, s - 1);
    Rng g = make_rng(search.seed, 0);
    for (std::size_t k = 0; k < search.random_pairs; ++k) consider(any(g), any(g));
    // Hill climbing over grid levels with step halving.
    const auto& shape = q.shape();
    const auto& strides = q.strides();
    std::size_t widest = 1;
    for (auto len : shape) widest = std::max(widest, len);
    for (std::size_t restart = 0; restart < search.restarts; ++restart) {
      Rng h = make_rng(search.seed, 1, restart);
      std::size_t y = any(h), z = any(h);
      double cur = consider(y, z);
      for (std::size_t step = std::max<std::size_t>(1, widest / 2);; step /= 2) {
        bool improved = true;
        while (improved) {
          improved = false;
          for (std::size_t side = 0; side < 2; ++side)
            for (std::size_t site = 0; site < shape.size(); ++site)
              for (int dir : {-1, 1}) {
                std::size_t& x = side ? z : y;
                const auto lvl = static_cast<long>(q.level(x, site));
                const long next = lvl + dir * static_cast<long>(step);
                if (next < 0 || next >= static_cast<long>(shape[site])) continue;
                const std::size_t moved = x + static_cast<std::size_t>(next - lvl) * strides[site];
                const std::size_t ny = side ? y : moved, nz = side ? moved : z;
                const double r = consider(ny, nz);
                if (r > cur) {
                  cur = r;
                  x = moved;
                  improved = true;
                }
              }
        }
        if (step == 1) break;
      }
    }
  }

  const auto method = exhaustive ? ContractivityMethod::Def1Exhaustive : ContractivityMethod::Def1Empirical;
  auto r = contractivity_from_sup(sup, fam.min_coverage(), method);
  if (auto* c = std::get_if<ContractivityCertificate>(&r)) {
    c->rigorous = exhaustive;
    const Vector py = q.point(wy), pz = q.point(wz);
    c->worst_y.assign(py.data(), py.data() + py.size());
    c->worst_z.assign(pz.data(), pz.data() + pz.size());
    c->note = exhaustive ? "exhaustive over all pairs of grid states" : "random pairs plus hill-climbing";
  }
  return r;
}

ContractivityResult check_definition2(const InfluenceMatrices& m, std::size_t t) {
  const double norm = operator_norm(m.A);
  auto r = contractivity_from_sup(norm * norm, t, ContractivityMethod::Def2Matrix);
  std::visit([&](auto& x) { x.matrix_norm = norm; }, r);
  if (auto* c = std::get_if<ContractivityCertificate>(&r)) c->rigorous = m.exact;
  return r;
}

InfluenceMatrices dobrushin_matrix_A(const QuadraticPotential& potential, const PatchFamily& family) {
  const Matrix& J = potential.J();
  InfluenceMatrices out;
  out.A = Matrix::Zero(static_cast<Eigen::Index>(family.patch_count()), J.cols());
  for (std::size_t k = 0; k < family.patch_count(); ++k) {
    const auto& p = family.patch(k);
    const auto outside = family.complement(k);
    Eigen::LLT<Matrix> llt(submatrix(J, p.sites, p.sites));
    require(llt.info() == Eigen::Success, ErrorCode::NotPositiveDefinite,
            "patch block of J is not positive definite");
    const Matrix gain = llt.solve(submatrix(J, p.sites, outside));
    const double w = std::sqrt(static_cast<double>(p.multiplicity));
    for (std::size_t o = 0; o < outside.size(); ++o)
      out.A(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(outside[o])) = w * gain.col(static_cast<Eigen::Index>(o)).norm();
  }
  out.exact = true;
  out.evaluation = "exact-quadratic";
  return out;
}

InfluenceMatrices dobrushin_matrix_A(const GridKernel& kernel, std::size_t pair_budget, std::uint64_t seed) {
  const GridMeasure& q = kernel.q();
  const PatchFamily& fam = kernel.family();
  SliceDistances dist(kernel);
  InfluenceMatrices out;
  out.A = Matrix::Zero(static_cast<Eigen::Index>(fam.patch_count()), static_cast<Eigen::Index>(q.dimension()));
  out.exact = true;
  for (std::size_t pk = 0; pk < fam.patch_count(); ++pk) {
    const auto& c = kernel.conditional(pk);
    const double w = std::sqrt(static_cast<double>(fam.patch(pk).multiplicity));
    for (Site k : c.outside) {
      const std::size_t levels = q.shape()[k];
      const std::size_t pairs = c.boundary_count() * (levels - 1) / 2;
      const bool all = pairs <= pair_budget;
      out.exact = out.exact && all;
      double best = 0.0;
      auto visit = [&](std::size_t b, std::size_t other_level) {
        const std::size_t f = c.indexer.boundary_offsets()[b];
        const std::size_t lvl = q.level(f, k);
        if (other_level == lvl) return;
        const std::size_t f2 = f + other_level * q.strides()[k] - lvl * q.strides()[k];
        const std::size_t b2 = c.indexer.boundary_of(f2);
        if (!c.defined[b] || !c.defined[b2]) return;
        const double dx = q.axes()[k][other_level] - q.axes()[k][lvl];
        best = std::max(best, std::sqrt(dist.w2(pk, b, b2)) / std::abs(dx));
      };
      if (all) {
        for (std::size_t b = 0; b < c.boundary_count(); ++b)
          for (std::size_t l = q.level(c.indexer.boundary_offsets()[b], k) + 1; l < levels; ++l) visit(b, l);
      } else {
        Rng g = make_rng(seed, pk, k);
        std::uniform_int_distribution<std::size_t> pick_b(0, c.boundary_count() - 1), pick_l(0, levels - 1);
        for (std::size_t s = 0; s < pair_budget; ++s) visit(pick_b(g), pick_l(g));
      }
      out.A(static_cast<Eigen::Index>(pk), static_cast<Eigen::Index>(k)) = w * best;
    }
  }
  out.evaluation = out.exact ? "grid-exhaustive" : "grid-sampled";
  return out;
}

InfluenceMatrices matrix_B(const QuadraticPotential& potential, const PatchFamily& family,
                           const std::vector<Vector>& eta, const Vector& y) {
  const std::size_t n = potential.dimension();
  require(family.site_count() == n, ErrorCode::DimensionMismatch,
          "patch family and potential have different site counts");
  require(eta.size() == family.patch_count(), ErrorCode::DimensionMismatch, "need one eta per patch");
  require(static_cast<std::size_t>(y.size()) == n, ErrorCode::DimensionMismatch, "y has wrong length");
  InfluenceMatrices out;
  Eigen::Index rows = 0;
  for (const auto& p : family.patches()) rows += static_cast<Eigen::Index>(p.sites.size());
  out.B = Matrix::Zero(rows, static_cast<Eigen::Index>(n));
  Eigen::Index r = 0;
  for (std::size_t k = 0; k < family.patch_count(); ++k) {
    const auto& p = family.patch(k);
    require(static_cast<std::size_t>(eta[k].size()) == p.sites.size(), ErrorCode::DimensionMismatch,
            "eta has wrong length for its patch");
    Vector x = y;
    for (std::size_t a = 0; a < p.sites.size(); ++a) x(static_cast<Eigen::Index>(p.sites[a])) = eta[k](static_cast<Eigen::Index>(a));
    const auto outside = family.complement(k);
    const double w = std::sqrt(static_cast<double>(p.multiplicity));
    for (Site i : p.sites) {
      for (Site col : outside) out.B(r, static_cast<Eigen::Index>(col)) = w * potential.second_derivative(x, i, col);
      out.b_rows.emplace_back(k, i);
      ++r;
    }
  }
  out.exact = !potential.has_perturbation();
  out.evaluation = out.exact ? "exact-quadratic" : "finite-difference";
  return out;
}

InfluenceMatrices matrix_B(const QuadraticPotential& potential, const PatchFamily& family) {
  require(!potential.has_perturbation(), ErrorCode::InvalidArgument,
          "B depends on (eta, y) when a perturbation is present");
  std::vector<Vector> eta;
  for (const auto& p : family.patches()) eta.push_back(Vector::Zero(static_cast<Eigen::Index>(p.sites.size())));
  return matrix_B(potential, family, eta, Vector::Zero(static_cast<Eigen::Index>(potential.dimension())));
}

ContractivityResult check_theorem2(const QuadraticPotential& potential, const PatchFamily& family,
                                   const RhoCertificate& rho, const Theorem2Search& search) {
  require(rho.rho > 0.0, ErrorCode::InvalidArgument, "rho must be positive");
  double worst = 0.0;
  bool exact = !potential.has_perturbation();
  if (exact) {
    worst = operator_norm(matrix_B(potential, family).B);
  } else {
    std::uniform_real_distribution<double> box(-search.box, search.box);
    for (std::size_t s = 0; s < search.samples; ++s) {
      Rng g = make_rng(search.seed, s);
      Vector y(static_cast<Eigen::Index>(potential.dimension()));
      for (auto& v : y) v = box(g);
      std::vector<Vector> eta;
      for (const auto& p : family.patches()) {
        Vector e(static_cast<Eigen::Index>(p.sites.size()));
        for (auto& v : e) v = box(g);
        eta.push_back(std::move(e));
      }
      worst = std::max(worst, operator_norm(matrix_B(potential, family, eta, y).B));
    }
  }
  const double scaled = worst / rho.rho;
  auto r = contractivity_from_sup(scaled * scaled, family.min_coverage(), ContractivityMethod::Theorem2Matrix);
  std::visit([&](auto& x) { x.matrix_norm = scaled; }, r);
  if (auto* c = std::get_if<ContractivityCertificate>(&r)) {
    c->rigorous = exact && rho.rigorous;
    c->note = exact ? "B is constant for a quadratic potential" : "sampled sup over (eta, y)";
  }
  return r;
}

double corollary1_coefficient(double rho, double norm_B, double C) {
  require(rho > 0.0, ErrorCode::InvalidArgument, "rho must be positive");
  require(norm_B >= 0.0, ErrorCode::InvalidArgument, "norm must be nonnegative");
  const double ratio = norm_B / rho;
  require(ratio < 1.0 - 1e-9, ErrorCode::NotContractive,
          "|B|/rho = " + std::to_string(ratio) + " is not below 1");
  return C * C / (1.0 - ratio * ratio) * (2.0 / rho);
}

}  // namespace gibbslab
