#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "gibbslab/error.hpp"
#include "support.hpp"

using namespace gibbslab;
using namespace gibbslab::testing;

namespace {

GridMeasure random_law(const GridMeasure& like, Rng& g, double alpha = 1.0) {
  return GridMeasure(like.axes(), dirichlet(g, like.size(), alpha));
}

// Dense transition matrix of Gamma_I from the definition.
Matrix dense_gamma(const GridMeasure& q, const std::vector<Site>& sites) {
  const auto s = static_cast<Eigen::Index>(q.size());
  Matrix K = Matrix::Zero(s, s);
  for (Eigen::Index from = 0; from < s; ++from) {
    double mass = 0.0;
    auto same_outside = [&](Eigen::Index a, Eigen::Index b) {
      for (Site k = 0; k < q.dimension(); ++k)
        if (std::find(sites.begin(), sites.end(), k) == sites.end() &&
            q.level(static_cast<std::size_t>(a), k) != q.level(static_cast<std::size_t>(b), k))
          return false;
      return true;
    };
    for (Eigen::Index to = 0; to < s; ++to)
      if (same_outside(from, to)) mass += q.weight(static_cast<std::size_t>(to));
    for (Eigen::Index to = 0; to < s; ++to)
      if (same_outside(from, to)) K(from, to) = q.weight(static_cast<std::size_t>(to)) / mass;
  }
  return K;
}

}  // namespace

TEST(GridKernel, MatchesDenseStochasticMatrices) {
  const auto kernel = two_site_kernel(4, 0.5);
  const auto& q = kernel.q();
  Rng g(2);
  for (std::size_t k = 0; k < 2; ++k) {
    const Matrix K = dense_gamma(q, kernel.family().patch(k).sites);
    for (int trial = 0; trial < 10; ++trial) {
      const auto mu = random_law(q, g);
      const Eigen::Map<const Vector> w(mu.weights().data(), static_cast<Eigen::Index>(mu.size()));
      const Vector expected = K.transpose() * w;
      const auto got = kernel.apply_patch(mu, k);
      for (std::size_t s = 0; s < q.size(); ++s) EXPECT_NEAR(got.weight(s), expected(static_cast<Eigen::Index>(s)), 1e-12);
    }
  }
}

TEST(GridKernel, ReferenceLawIsInvariant) {
  const auto kernel = grid_kernel(path_potential(3, 0.4), 4, -1.0, 1.0,
                                  PatchFamily::build({{{0, 1}, 1}, {{1, 2}, 2}}, 3));
  const auto& q = kernel.q();
  const auto a = kernel.apply(q), b = kernel.apply_power(q, 5);
  for (std::size_t s = 0; s < q.size(); ++s) {
    EXPECT_NEAR(a.weight(s), q.weight(s), 1e-12);
    EXPECT_NEAR(b.weight(s), q.weight(s), 1e-12);
  }
}

TEST(GridKernel, MixtureAveragesPatchesByMultiplicity) {
  const auto kernel = grid_kernel(path_potential(2, 0.3), 5, -1.0, 1.0, PatchFamily::build({{{0}, 3}, {{1}, 1}}, 2));
  Rng g(6);
  const auto mu = random_law(kernel.q(), g);
  const auto mix = kernel.apply(mu), a = kernel.apply_patch(mu, 0), b = kernel.apply_patch(mu, 1);
  for (std::size_t s = 0; s < mu.size(); ++s) EXPECT_NEAR(mix.weight(s), 0.75 * a.weight(s) + 0.25 * b.weight(s), 1e-14);
}

TEST(GridKernel, SingleSiteEntryPointAgrees) {
  const auto kernel = two_site_kernel(5, 0.2);
  Rng g(3);
  const auto mu = random_law(kernel.q(), g);
  const auto a = apply_gamma_patch(mu, {1}, kernel.model());
  const auto b = kernel.apply_patch(mu, 1);
  for (std::size_t s = 0; s < mu.size(); ++s) EXPECT_NEAR(a.weight(s), b.weight(s), 1e-14);
}

TEST(GaussianKernel, PatchUpdateAndInvariance) {
  const auto pot = path_potential(3, 0.3);
  const auto kernel = gaussian_kernel(pot, PatchFamily::singletons(3));
  const auto& q = kernel.q();
  for (std::size_t k = 0; k < 3; ++k) {
    const auto r = kernel.apply_patch(q, k);
    EXPECT_LT((r.mean() - q.mean()).norm(), 1e-12);
    EXPECT_LT((r.covariance() - q.covariance()).norm(), 1e-12);
  }
  // Update block formulas against a direct construction for site 1.
  Rng g(9);
  const auto mu = random_gaussian_law(3, g);
  const auto r = kernel.apply_patch(mu, 1);
  const auto& c = kernel.conditional(1);
  const std::vector<Site> out{0, 2};
  const Vector mean_o = subvector(mu.mean(), out);
  const Matrix S_oo = submatrix(mu.covariance(), out, out);
  EXPECT_NEAR(r.mean()(1), (c.base_mean + c.gain * mean_o)(0), 1e-12);
  EXPECT_NEAR(r.covariance()(1, 1), (c.gain * S_oo * c.gain.transpose() + c.covariance)(0, 0), 1e-12);
  EXPECT_NEAR(r.covariance()(0, 2), mu.covariance()(0, 2), 1e-14);
}

TEST(GaussianKernel, MixtureIsUnsupported) {
  const auto kernel = gaussian_kernel(path_potential(2, 0.1), PatchFamily::singletons(2));
  try {
    kernel.apply(kernel.q());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GaussianUnsupported);
  }
}

TEST(AnyModel, ModeMismatch) {
  const auto kernel = two_site_kernel(4, 0.1);
  const AnyMeasure mu = GaussianMeasure::standard(2);
  const AnyModel model = kernel.model();
  try {
    apply_gamma_patch(mu, {0}, model);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ModeMismatch);
  }
}

TEST(ChainIdentity, ResidualVanishesOnRandomDraws) {
  Rng g(12);
  for (int trial = 0; trial < 40; ++trial) {
    const double b = 0.8 * (uniform01(g) - 0.5);
    const auto kernel = two_site_kernel(8, b);
    const auto p = random_law(kernel.q(), g, 0.5);
    const auto seq = draw_sequence(kernel.family(), 1 + trial % 6, g);
    EXPECT_LE(std::abs(chain_decomposition_residual(p, kernel, seq)), 1e-10);
  }
}

TEST(InterpolationChain, GridTraceIsConsistent) {
  const auto kernel = grid_kernel(path_potential(3, 0.3), 3, -1.0, 1.0, PatchFamily::singletons(3));
  Rng g(14);
  const auto p = random_law(kernel.q(), g);
  const std::vector<std::size_t> seq{0, 2, 1, 0, 1};
  const auto t = interpolation_chain(p, kernel, seq);
  ASSERT_EQ(t.steps(), 5u);
  ASSERT_EQ(t.grid_laws.size(), 6u);
  GridMeasure r = p;
  for (std::size_t l = 0; l < seq.size(); ++l) r = kernel.apply_patch(r, seq[l]);
  for (std::size_t s = 0; s < r.size(); ++s) {
    EXPECT_NEAR(t.grid_laws.back().weight(s), r.weight(s), 1e-12);
    EXPECT_NEAR(t.joint.row(static_cast<Eigen::Index>(s)).sum(), p.weight(s), 1e-12);
    EXPECT_NEAR(t.joint.col(static_cast<Eigen::Index>(s)).sum(), r.weight(s), 1e-12);
  }
  EXPECT_GE(t.end_to_end_moment + 1e-12, std::pow(w2_exact_lp(p, r).distance, 2));
  // Each step moment is the W^2 of an optimal conditional coupling, hence at
  // least the W^2 of the two laws.
  for (std::size_t l = 0; l < seq.size(); ++l)
    EXPECT_GE(t.step_moments[l] + 1e-12, std::pow(w2_exact_lp(t.grid_laws[l], t.grid_laws[l + 1]).distance, 2));
  EXPECT_EQ(t.visits, (std::vector<std::size_t>{2, 2, 1}));
}

TEST(InterpolationChain, GaussianTraceMatchesPatchUpdates) {
  const auto kernel = gaussian_kernel(path_potential(4, 0.25), PatchFamily::singletons(4));
  Rng g(21);
  const auto p = random_gaussian_law(4, g);
  const std::vector<std::size_t> seq{1, 3, 0, 2, 1};
  const auto t = interpolation_chain(p, kernel, seq);
  GaussianMeasure r = p;
  for (std::size_t k : seq) r = kernel.apply_patch(r, k);
  EXPECT_LT((t.gaussian_laws.back().mean() - r.mean()).norm(), 1e-10);
  EXPECT_LT((t.gaussian_laws.back().covariance() - r.covariance()).norm(), 1e-10);
  EXPECT_GE(t.end_to_end_moment + 1e-10, std::pow(w2_gaussian(p, r), 2));
  for (std::size_t l = 0; l < seq.size(); ++l)
    EXPECT_GE(t.step_moments[l] + 1e-10, std::pow(w2_gaussian(t.gaussian_laws[l], t.gaussian_laws[l + 1]), 2));
}

TEST(InterpolationChain, InvariantStartStaysPut) {
  const auto kernel = two_site_kernel(5, 0.5);
  const auto t = interpolation_chain(kernel.q(), kernel, {0, 1, 0});
  for (const auto& d : t.step_divergences) EXPECT_NEAR(d.value(), 0.0, 1e-14);
  EXPECT_NEAR(std::pow(w2_exact_lp(kernel.q(), t.grid_laws.back()).distance, 2), 0.0, 1e-14);
}

// The chain's joint law is built from optimal conditional couplings, so the
// conditional law of Z given Y is not the product kernel in general.
TEST(InterpolationChain, JointIsNotTheKernel) {
  const auto kernel = two_site_kernel(4, 0.5);
  Rng g(31);
  const auto p = random_law(kernel.q(), g);
  const std::vector<std::size_t> seq{0, 1};
  const auto t = interpolation_chain(p, kernel, seq);
  double worst = 0.0;
  for (std::size_t y = 0; y < p.size(); ++y) {
    std::vector<double> point(p.size(), 0.0);
    point[y] = 1.0;
    GridMeasure dy(p.axes(), point);
    for (std::size_t k : seq) dy = kernel.apply_patch(dy, k);
    for (std::size_t z = 0; z < p.size(); ++z)
      worst = std::max(worst, std::abs(t.joint(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(z)) / p.weight(y) -
                                       dy.weight(z)));
  }
  EXPECT_GT(worst, 1e-3);
}

TEST(InterpolationChain, CsvExport) {
  const auto kernel = two_site_kernel(4, 0.5);
  Rng g(1);
  const auto t = interpolation_chain(random_law(kernel.q(), g), kernel, {0, 1});
  std::ostringstream s;
  t.write_csv(s);
  EXPECT_EQ(s.str().rfind("step,statistic,value,stderr\n", 0), 0u);
}

TEST(Sequences, DrawsFollowMultiplicities) {
  const auto f = PatchFamily::build({{{0}, 3}, {{1}, 1}}, 2);
  Rng g(4);
  std::size_t zeros = 0;
  const std::size_t n = 40000;
  for (std::size_t i = 0; i < n; ++i) zeros += draw_patch(f, g) == 0 ? 1 : 0;
  EXPECT_NEAR(static_cast<double>(zeros) / n, 0.75, 4.0 * std::sqrt(0.75 * 0.25 / n));
}

TEST(CoupledChain, IndependentModelContractsAtTheNominalRate) {
  const auto kernel = gaussian_kernel(QuadraticPotential::build(Matrix::Identity(2, 2), Vector::Zero(2)),
                                      PatchFamily::singletons(2));
  Rng g(5);
  const auto p = random_gaussian_law(2, g, 2.0), r = random_gaussian_law(2, g, 2.0);
  const auto s = simulate_coupled_chain(kernel, p, r, 3, 20000, 77);
  const double w2 = std::pow(w2_gaussian(p, r), 2);
  EXPECT_NEAR(s.mean[1], 0.5 * w2, 3.0 * s.standard_error[1]);
  EXPECT_NEAR(s.mean[2], 0.25 * w2, 3.0 * s.standard_error[2] + 1e-12);
}

TEST(CoupledChain, GridIndependentModel) {
  const auto kernel = grid_kernel(QuadraticPotential::build(Matrix::Identity(2, 2), Vector::Zero(2)), 5, -1.0, 1.0,
                                  PatchFamily::singletons(2));
  Rng g(8);
  const auto p = random_law(kernel.q(), g), r = random_law(kernel.q(), g);
  const auto s = simulate_coupled_chain(kernel, p, r, 2, 20000, 3);
  const double w2 = std::pow(w2_exact_lp(p, r).distance, 2);
  EXPECT_NEAR(s.mean[0], w2, 3.0 * s.standard_error[0]);
  EXPECT_NEAR(s.mean[1], 0.5 * w2, 3.0 * s.standard_error[1]);
}

TEST(CoupledChain, DeterministicGivenSeed) {
  const auto kernel = two_site_kernel(5, 0.5);
  Rng g(8);
  const auto p = random_law(kernel.q(), g), r = random_law(kernel.q(), g);
  const auto a = simulate_coupled_chain(kernel, p, r, 5, 500, 11);
  const auto b = simulate_coupled_chain(kernel, p, r, 5, 500, 11);
  const auto c = simulate_coupled_chain(kernel, p, r, 5, 500, 12);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.standard_error, b.standard_error);
  EXPECT_NE(a.mean, c.mean);
}

TEST(CoupledChain, IdenticalStartsStayCoupled) {
  const auto kernel = gaussian_kernel(path_potential(3, 0.3), PatchFamily::singletons(3));
  const auto p = GaussianMeasure::standard(3);
  const auto s = simulate_coupled_chain(kernel, p, p, 4, 200, 1);
  for (double m : s.mean) EXPECT_DOUBLE_EQ(m, 0.0);
}
