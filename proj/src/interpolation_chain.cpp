#include <algorithm>
#include <ostream>

#include "gibbslab/error.hpp"
#include "gibbslab/gibbs.hpp"

namespace gibbslab {

namespace {

void count_visits(ChainTrace& t, const PatchFamily& family) {
  t.visits.assign(family.site_count(), 0);
  for (std::size_t patch : t.sequence)
    for (Site s : family.patch(patch).sites) ++t.visits[s];
  t.patch_total = family.total_count();
  t.max_coverage = family.max_coverage();
}

void check_sequence(const std::vector<std::size_t>& seq, const PatchFamily& family) {
  for (std::size_t k : seq)
    require(k < family.patch_count(), ErrorCode::InvalidPatch, "patch index out of range");
}

}  // namespace

ChainTrace interpolation_chain(const GridMeasure& p, const GridKernel& kernel,
                               const std::vector<std::size_t>& sequence) {
  require(p.same_grid(kernel.q()), ErrorCode::GridMismatch, "p lives on a different grid");
  check_sequence(sequence, kernel.family());
  const std::size_t s = p.size();
  require(s * s <= kMaxJointEntries, ErrorCode::SizeLimit,
          "joint distribution over " + std::to_string(s) + " states is too large");

  ChainTrace t;
  t.sequence = sequence;
  count_visits(t, kernel.family());
  t.grid_laws.push_back(p);
  t.initial_divergence = kl_grid(p, kernel.q());

  // dist(Y, Z(l)) as a dense state-by-state matrix; starts on the diagonal.
  Matrix joint = Matrix::Zero(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s));
  for (std::size_t f = 0; f < s; ++f) joint(f, f) = p.weight(f);

  struct Move {
    std::size_t from, to;
    double prob;
  };
  std::vector<Move> moves;
  std::vector<double> slice;
  for (std::size_t patch : sequence) {
    const GridMeasure& r = t.grid_laws.back();
    const DiscreteConditional& c = kernel.conditional(patch);
    const auto w = r.weights();
    const std::size_t pc = c.patch_count();
    moves.clear();
    double moment = 0.0;
    slice.resize(pc);
    for (std::size_t b = 0; b < c.boundary_count(); ++b) {
      double mass = 0.0;
      for (std::size_t k = 0; k < pc; ++k) mass += (slice[k] = w[c.indexer.flat(b, k)]);
      if (mass <= 0.0) continue;
      if (!c.defined[b]) {
        for (std::size_t k = 0; k < pc; ++k)
          if (slice[k] > 0.0) moves.push_back({c.indexer.flat(b, k), c.indexer.flat(b, k), 1.0});
        continue;
      }
      for (double& x : slice) x /= mass;
      const Coupling cp = kernel.couple(patch, slice, c.slice(b));
      moment += mass * cp.cost;
      for (const auto& e : cp.entries)
        moves.push_back({c.indexer.flat(b, e.source), c.indexer.flat(b, e.target), e.weight / slice[e.source]});
    }
    Matrix next = Matrix::Zero(joint.rows(), joint.cols());
    for (const auto& mv : moves)
      next.col(static_cast<Eigen::Index>(mv.to)) += mv.prob * joint.col(static_cast<Eigen::Index>(mv.from));
    joint = std::move(next);

    GridMeasure after = kernel.apply_patch(r, patch);
    t.step_moments.push_back(moment);
    t.step_divergences.push_back(kl_grid(r, after));
    t.grid_laws.push_back(std::move(after));
  }
  t.final_divergence = kl_grid(t.grid_laws.back(), kernel.q());

  const Matrix pts = p.points();
  double e2e = 0.0;
  for (Eigen::Index y = 0; y < joint.rows(); ++y)
    for (Eigen::Index z = 0; z < joint.cols(); ++z)
      if (joint(y, z) != 0.0) e2e += joint(y, z) * (pts.row(y) - pts.row(z)).squaredNorm();
  t.end_to_end_moment = e2e;
  t.joint = std::move(joint);
  return t;
}

ChainTrace interpolation_chain(const GaussianMeasure& p, const GaussianKernel& kernel,
                               const std::vector<std::size_t>& sequence) {
  require(p.dimension() == kernel.q().dimension(), ErrorCode::DimensionMismatch,
          "p and model dimensions differ");
  require(!p.degenerate(), ErrorCode::NotPositiveDefinite, "p must be nondegenerate");
  check_sequence(sequence, kernel.family());
  const auto n = static_cast<Eigen::Index>(p.dimension());

  ChainTrace t;
  t.sequence = sequence;
  count_visits(t, kernel.family());
  t.gaussian_laws.push_back(p);
  t.initial_divergence = kl_gaussian(p, kernel.q());

  // Z(l) = A Y + c with Y ~ p.
  Matrix A = Matrix::Identity(n, n);
  Vector c = Vector::Zero(n);
  const Matrix& S = p.covariance();
  const Vector& m = p.mean();

  for (std::size_t patch : sequence) {
    const GaussianMeasure& r = t.gaussian_laws.back();
    const GaussianConditional& qc = kernel.conditional(patch);
    const auto& I = qc.sites;
    const auto& O = qc.outside;

    // Conditional of r on the patch: N(mu_I + K (zbar - mu_O), Sc).
    const Matrix s_ii = submatrix(r.covariance(), I, I);
    Matrix K = Matrix::Zero(static_cast<Eigen::Index>(I.size()), static_cast<Eigen::Index>(O.size()));
    Matrix sc = s_ii;
    if (!O.empty()) {
      const Matrix s_io = submatrix(r.covariance(), I, O);
      Eigen::LLT<Matrix> llt(submatrix(r.covariance(), O, O));
      require(llt.info() == Eigen::Success, ErrorCode::NotPositiveDefinite,
              "outside block of an interpolation state is singular");
      K = llt.solve(s_io.transpose()).transpose();
      sc = s_ii - K * s_io.transpose();
    }
    sc = 0.5 * (sc + sc.transpose()).eval();
    const AffineMap T = optimal_gaussian_map(GaussianMeasure(Vector::Zero(sc.rows()), sc),
                                             GaussianMeasure(Vector::Zero(sc.rows()), qc.covariance));
    const Vector mu_i = subvector(r.mean(), I);
    const Vector mu_o = subvector(r.mean(), O);

    // Rows of (A, c) for the patch and for the outside.
    auto rows = [&](const Matrix& src, const std::vector<Site>& idx) {
      Matrix out(static_cast<Eigen::Index>(idx.size()), src.cols());
      for (std::size_t a = 0; a < idx.size(); ++a) out.row(static_cast<Eigen::Index>(a)) = src.row(static_cast<Eigen::Index>(idx[a]));
      return out;
    };
    const Matrix a_i = rows(A, I), a_o = rows(A, O);
    const Vector c_i = subvector(c, I), c_o = subvector(c, O);
    const Matrix new_ai = qc.gain * a_o + T.linear * (a_i - K * a_o);
    const Vector new_ci = qc.base_mean + qc.gain * c_o + T.linear * (c_i - mu_i - K * (c_o - mu_o));

    const Matrix da = new_ai - a_i;
    const Vector dc = new_ci - c_i;
    t.step_moments.push_back((da * S * da.transpose()).trace() + (da * m + dc).squaredNorm());

    for (std::size_t a = 0; a < I.size(); ++a) {
      A.row(static_cast<Eigen::Index>(I[a])) = new_ai.row(static_cast<Eigen::Index>(a));
      c(static_cast<Eigen::Index>(I[a])) = new_ci(static_cast<Eigen::Index>(a));
    }
    GaussianMeasure after = kernel.apply_patch(r, patch);
    t.step_divergences.push_back(kl_gaussian(r, after));
    t.gaussian_laws.push_back(std::move(after));
  }
  t.final_divergence = kl_gaussian(t.gaussian_laws.back(), kernel.q());

  const Matrix d = Matrix::Identity(n, n) - A;
  t.end_to_end_moment = (d * S * d.transpose()).trace() + (d * m - c).squaredNorm();
  return t;
}

void ChainTrace::write_csv(std::ostream& out) const {
  out.precision(17);
  out << "step,statistic,value,stderr\n";
  for (std::size_t l = 0; l < step_moments.size(); ++l) {
    out << l + 1 << ",step_moment," << step_moments[l] << ",0\n";
    out << l + 1 << ",step_divergence," << step_divergences[l].to_string() << ",0\n";
  }
  out << steps() << ",end_to_end_moment," << end_to_end_moment << ",0\n";
}

}  // namespace gibbslab
