#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "gibbslab/error.hpp"
#include "support.hpp"

using namespace gibbslab;
using namespace gibbslab::testing;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no exception";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(PatchFamily, SingletonsAndWhole) {
  const auto s = PatchFamily::singletons(4);
  EXPECT_EQ(s.total_count(), 4u);
  EXPECT_EQ(s.min_coverage(), 1u);
  EXPECT_EQ(s.max_coverage(), 1u);
  const auto w = PatchFamily::whole(4);
  EXPECT_EQ(w.total_count(), 1u);
  EXPECT_TRUE(w.complement(0).empty());
  EXPECT_EQ(s.complement(2), (std::vector<Site>{0, 1, 3}));
}

TEST(PatchFamily, MultiplicitiesCountTowardsCoverage) {
  const auto f = PatchFamily::build({{{0, 1}, 2}, {{1, 2}, 1}}, 3);
  EXPECT_EQ(f.total_count(), 3u);
  EXPECT_EQ(f.coverage(), (std::vector<std::size_t>{2, 3, 1}));
  EXPECT_EQ(f.min_coverage(), 1u);
  EXPECT_EQ(f.max_coverage(), 3u);
  EXPECT_DOUBLE_EQ(f.selection_weight(0), 2.0 / 3.0);
}

TEST(PatchFamily, LatticeTranslatesOfASquareWindow) {
  const auto f = PatchFamily::lattice_translates({3, 3}, {{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  EXPECT_EQ(f.total_count(), 16u);
  EXPECT_EQ(f.min_coverage(), 4u);
  EXPECT_EQ(f.max_coverage(), 4u);
}

TEST(PatchFamily, TruncatedTranslatesMergeWithMultiplicity) {
  // Window {-1, 0, 1} on a line of 2 sites: {0}, {0,1} (twice), {1}.
  const auto f = PatchFamily::lattice_translates({2}, {{-1}, {0}, {1}});
  EXPECT_EQ(f.patch_count(), 3u);
  EXPECT_EQ(f.total_count(), 4u);
  for (const auto& p : f.patches())
    if (p.sites.size() == 2) EXPECT_EQ(p.multiplicity, 2u);
}

TEST(PatchFamily, Errors) {
  EXPECT_EQ(code_of([] { PatchFamily::build({}, 2); }), ErrorCode::EmptyFamily);
  EXPECT_EQ(code_of([] { PatchFamily::build({{{}, 1}}, 2); }), ErrorCode::InvalidPatch);
  EXPECT_EQ(code_of([] { PatchFamily::build({{{0, 5}, 1}}, 2); }), ErrorCode::InvalidPatch);
  EXPECT_EQ(code_of([] { PatchFamily::build({{{0}, 0}}, 1); }), ErrorCode::InvalidPatch);
  EXPECT_EQ(code_of([] { PatchFamily::build({{{0, 0}, 1}}, 1); }), ErrorCode::InvalidPatch);
  EXPECT_EQ(code_of([] { PatchFamily::build({{{0}, 1}}, 2); }), ErrorCode::UncoveredSite);
}

TEST(Potential, BoundaryEntersThroughTheField) {
  Matrix J = Matrix::Identity(2, 2);
  const auto p = QuadraticPotential::build(J, Vector::Zero(2), {{0, 0, 0.5}, {1, 1, 0.25}}, {2.0, -4.0});
  EXPECT_DOUBLE_EQ(p.h()(0), -1.0);
  EXPECT_DOUBLE_EQ(p.h()(1), 1.0);
  Vector x(2);
  x << 1.0, 2.0;
  EXPECT_DOUBLE_EQ(p.value(x), 0.5 * 5.0 - (-1.0 * 1.0 + 1.0 * 2.0));
}

TEST(Potential, RejectsAsymmetricJAndBadShapes) {
  Matrix J(2, 2);
  J << 1.0, 0.2, 0.3, 1.0;
  EXPECT_EQ(code_of([&] { QuadraticPotential::build(J, Vector::Zero(2)); }), ErrorCode::AsymmetricJ);
  EXPECT_EQ(code_of([&] { QuadraticPotential::build(Matrix::Identity(2, 2), Vector::Zero(3)); }),
            ErrorCode::DimensionMismatch);
}

TEST(Potential, SecondDerivativesMatchJAndFiniteDifferences) {
  const auto base = path_potential(3, 0.3);
  Vector x(3);
  x << 0.2, -0.4, 0.9;
  for (Site i = 0; i < 3; ++i)
    for (Site k = 0; k < 3; ++k) EXPECT_DOUBLE_EQ(base.second_derivative(x, i, k), base.J()(i, k));

  // K_i(x) = 0.1 x^2 tabulated finely: the diagonal picks up ~0.2.
  std::vector<double> grid = linspace(-3.0, 3.0, 6001), values(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) values[j] = 0.1 * grid[j] * grid[j];
  std::vector<SitePerturbation> K(3, SitePerturbation(grid, values, 1.0));
  const auto p = QuadraticPotential::build(base.J(), base.h(), {}, {}, K);
  EXPECT_NEAR(p.second_derivative(x, 1, 1), base.J()(1, 1) + 0.2, 2e-3);
  EXPECT_NEAR(p.second_derivative(x, 0, 1), base.J()(0, 1), 1e-9);
  EXPECT_DOUBLE_EQ(p.perturbation_sup_norm(), 1.0);
}

TEST(Measures, GridValidation) {
  EXPECT_EQ(code_of([] { GridMeasure({{1.0, 0.0}}, {0.5, 0.5}); }), ErrorCode::InvalidGrid);
  EXPECT_EQ(code_of([] { GridMeasure({{0.0, 1.0}}, {1.5, -0.5}); }), ErrorCode::InvalidGrid);
  EXPECT_EQ(code_of([] { GridMeasure({{0.0, 1.0}}, {0.5, 0.4}); }), ErrorCode::InvalidArgument);
  const GridMeasure g({{0.0, 1.0}, {0.0, 2.0, 4.0}}, {0.1, 0.1, 0.2, 0.2, 0.2, 0.2});
  EXPECT_EQ(g.size(), 6u);
  EXPECT_EQ(g.level(4, 0), 1u);
  EXPECT_EQ(g.level(4, 1), 1u);
  EXPECT_DOUBLE_EQ(g.coordinate(5, 1), 4.0);
}

TEST(Measures, DiscretizeNormalizesAtAnyScale) {
  for (double scale : {1.0, 1e3, 1e6}) {
    Matrix J = scale * Matrix::Identity(2, 2);
    const auto p = QuadraticPotential::build(J, Vector::Constant(2, scale));
    const auto g = discretize(p, Axes(2, linspace(-2.0, 2.0, 9)));
    const auto w = g.weights();
    EXPECT_NEAR(std::accumulate(w.begin(), w.end(), 0.0), 1.0, 1e-12);
  }
}

TEST(Measures, DiscretizeIgnoresConstantShifts) {
  // Constant perturbations K_i = 40 shift Phi by 80 and nothing else.
  const auto a = coupled_pair(0.3);
  std::vector<SitePerturbation> K(2, SitePerturbation({-1.0, 1.0}, {40.0, 40.0}, 40.0));
  const auto b = QuadraticPotential::build(a.J(), a.h(), {}, {}, K);
  const Axes axes(2, linspace(-1.0, 1.0, 7));
  const auto ga = discretize(a, axes), gb = discretize(b, axes);
  for (std::size_t s = 0; s < ga.size(); ++s) EXPECT_NEAR(ga.weight(s), gb.weight(s), 1e-12);
}

TEST(Conditional, GaussianMatchesCovarianceConditioning) {
  Matrix J(3, 3);
  J << 2.0, 0.4, -0.3, 0.4, 1.5, 0.2, -0.3, 0.2, 1.0;
  Vector h(3);
  h << 0.5, -1.0, 0.25;
  const GaussianModel model(QuadraticPotential::build(J, h));
  const auto& q = model.measure();
  const auto c = model.conditional({0, 2});
  // Oracle: Schur complement of the covariance.
  const Matrix S = q.covariance();
  const Matrix Sii = submatrix(S, {0, 2}, {0, 2}), Sio = submatrix(S, {0, 2}, {1});
  const Matrix Soo = submatrix(S, {1}, {1});
  const Matrix gain = Sio * Soo.inverse();
  EXPECT_LT((c.covariance - (Sii - gain * Sio.transpose())).norm(), 1e-12);
  EXPECT_LT((c.gain - gain).norm(), 1e-12);
  Vector y(1);
  y << 0.7;
  const Vector mean = subvector(q.mean(), {0, 2}) + gain * (y - subvector(q.mean(), {1}));
  EXPECT_LT((c.mean_given(y) - mean).norm(), 1e-12);
}

TEST(Conditional, GridSlicesAreNormalized) {
  const auto kernel = two_site_kernel(5, 0.4);
  for (std::size_t k = 0; k < 2; ++k) {
    const auto& c = kernel.conditional(k);
    for (std::size_t b = 0; b < c.boundary_count(); ++b) {
      ASSERT_TRUE(c.defined[b]);
      const auto s = c.slice(b);
      EXPECT_NEAR(std::accumulate(s.begin(), s.end(), 0.0), 1.0, 1e-12);
    }
  }
}

TEST(Conditional, ZeroMassBoundariesAreUndefined) {
  const GridMeasure q({{0.0, 1.0}, {0.0, 1.0}}, {0.5, 0.5, 0.0, 0.0});
  const auto c = conditional_law(q, {1});
  EXPECT_TRUE(c.defined[0]);
  EXPECT_FALSE(c.defined[1]);
}

TEST(Conditional, NonPositiveDefiniteJHasNoGaussianLaw) {
  EXPECT_EQ(code_of([] { GaussianModel m(lattice_potential(3, 0.6)); }), ErrorCode::NotPositiveDefinite);
}
