#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "gibbslab/error.hpp"
#include "gibbslab/kernels.hpp"
#include "support.hpp"

using namespace gibbslab;
using namespace gibbslab::testing;

namespace {

GaussianMeasure gauss1(double m, double s) { return GaussianMeasure(Vector::Constant(1, m), Matrix::Constant(1, 1, s * s)); }

WeightedPoints random_cloud(Rng& g, std::size_t k, std::size_t dim) {
  WeightedPoints w;
  w.points = Matrix(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < w.points.rows(); ++i)
    for (Eigen::Index d = 0; d < w.points.cols(); ++d) w.points(i, d) = standard_normal(g);
  w.weights = dirichlet(g, k, 1.0);
  return w;
}

}  // namespace

TEST(GaussianW2, OneDimensionalClosedForm) {
  EXPECT_NEAR(w2_gaussian(gauss1(0.0, 1.0), gauss1(3.0, 2.0)), std::sqrt(9.0 + 1.0), 1e-12);
  EXPECT_DOUBLE_EQ(w2_gaussian(gauss1(1.0, 0.5), gauss1(1.0, 0.5)), 0.0);
}

TEST(GaussianW2, CommutingCovariances) {
  Vector m(2);
  m << 1.0, -2.0;
  const GaussianMeasure a(Vector::Zero(2), Vector(Eigen::Vector2d(1.0, 4.0)).asDiagonal().toDenseMatrix());
  const GaussianMeasure b(m, Vector(Eigen::Vector2d(9.0, 1.0)).asDiagonal().toDenseMatrix());
  EXPECT_NEAR(std::pow(w2_gaussian(a, b), 2), 5.0 + 4.0 + 1.0, 1e-10);
}

TEST(GaussianW2, OptimalMapPushesForward) {
  Rng g(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_gaussian_law(3, g), b = random_gaussian_law(3, g);
    const auto T = optimal_gaussian_map(a, b);
    EXPECT_LT((T.linear - T.linear.transpose()).norm(), 1e-10);
    EXPECT_LT((T.linear * a.covariance() * T.linear.transpose() - b.covariance()).norm(), 1e-8);
    EXPECT_LT((T(a.mean()) - b.mean()).norm(), 1e-10);
    // Its cost attains W^2.
    const Matrix D = T.linear - Matrix::Identity(3, 3);
    const double cost = (D * a.covariance() * D.transpose()).trace() + (T(a.mean()) - a.mean()).squaredNorm();
    EXPECT_NEAR(cost, std::pow(w2_gaussian(a, b), 2), 1e-8);
  }
}

TEST(GaussianW2, MetricProperties) {
  Rng g(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = random_gaussian_law(2, g), b = random_gaussian_law(2, g), c = random_gaussian_law(2, g);
    EXPECT_NEAR(w2_gaussian(a, b), w2_gaussian(b, a), 1e-9);
    EXPECT_LE(w2_gaussian(a, c), w2_gaussian(a, b) + w2_gaussian(b, c) + 1e-9);
  }
}

TEST(Monotone, MatchesLpOnRandomLines) {
  Rng g(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> xs(12), ys(9);
    for (auto& x : xs) x = 3.0 * standard_normal(g);
    for (auto& y : ys) y = 3.0 * standard_normal(g);
    const auto mu = dirichlet(g, xs.size(), 0.7), nu = dirichlet(g, ys.size(), 0.7);
    const auto m = w2_1d_monotone(xs, mu, ys, nu);
    const auto l = w2_exact_lp(WeightedPoints::on_line(xs, mu), WeightedPoints::on_line(ys, nu));
    EXPECT_NEAR(m.distance, l.distance, 1e-9);
    EXPECT_LE(m.plan.max_violation(), kPlanTolerance);
  }
}

TEST(Lp, PlanInvariantsAndTriangleInequality) {
  Rng g(17);
  for (int trial = 0; trial < 30; ++trial) {
    const auto a = random_cloud(g, 10, 2);
    auto b = a, c = a;
    b.weights = dirichlet(g, 10, 1.0);
    c.weights = dirichlet(g, 10, 1.0);
    const auto ab = w2_exact_lp(a, b), bc = w2_exact_lp(b, c), ac = w2_exact_lp(a, c);
    EXPECT_LE(ab.plan.max_violation(), kPlanTolerance);
    for (const auto& e : ab.plan.entries) EXPECT_GE(e.weight, 0.0);
    EXPECT_LE(ac.distance, ab.distance + bc.distance + 1e-9);
    EXPECT_NEAR(ab.distance, w2_exact_lp(b, a).distance, 1e-9);
  }
}

TEST(Lp, UniformWeightsReduceToTheBestAssignment) {
  Rng g(23);
  for (int trial = 0; trial < 10; ++trial) {
    auto a = random_cloud(g, 5, 2), b = random_cloud(g, 5, 2);
    a.weights.assign(5, 0.2);
    b.weights.assign(5, 0.2);
    std::vector<int> perm{0, 1, 2, 3, 4};
    double best = 1e300;
    do {
      double c = 0.0;
      for (int i = 0; i < 5; ++i) c += 0.2 * (a.points.row(i) - b.points.row(perm[i])).squaredNorm();
      best = std::min(best, c);
    } while (std::next_permutation(perm.begin(), perm.end()));
    EXPECT_NEAR(std::pow(w2_exact_lp(a, b).distance, 2), best, 1e-10);
  }
}

TEST(Lp, ZeroWeightsAndIdenticalMeasures) {
  WeightedPoints a;
  a.points = Matrix(3, 1);
  a.points << 0.0, 1.0, 5.0;
  a.weights = {0.5, 0.0, 0.5};
  EXPECT_NEAR(w2_exact_lp(a, a).distance, 0.0, 1e-12);
  WeightedPoints b = a;
  b.weights = {0.0, 1.0, 0.0};
  EXPECT_NEAR(std::pow(w2_exact_lp(a, b).distance, 2), 0.5 * 1.0 + 0.5 * 16.0, 1e-12);
}

TEST(Lp, SizeLimit) {
  Rng g(1);
  const auto a = random_cloud(g, 40, 1);
  LpOptions o;
  o.max_entries = 100;
  try {
    w2_exact_lp(a, a, o);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SizeLimit);
  }
}

TEST(Lp, GridOverloadUsesEveryCoordinate) {
  // Two-dimensional grid: mass moved diagonally costs both coordinates.
  const Axes axes{{0.0, 1.0}, {0.0, 2.0}};
  const GridMeasure a(axes, {1.0, 0.0, 0.0, 0.0}), b(axes, {0.0, 0.0, 0.0, 1.0});
  EXPECT_NEAR(std::pow(w2_exact_lp(a, b).distance, 2), 1.0 + 4.0, 1e-12);
}

TEST(Lp, AgreesAcrossKernelVariants) {
  Rng g(29);
  const auto a = random_cloud(g, 30, 3);
  auto b = a;
  b.weights = dirichlet(g, 30, 0.5);
  const double d = w2_exact_lp(a, b).distance;
  kernels::ScopedIsa scalar(kernels::Isa::Scalar);
  EXPECT_NEAR(w2_exact_lp(a, b).distance, d, 1e-12);
}

TEST(Plan, CsvRows) {
  WeightedPoints a;
  a.points = Matrix(2, 1);
  a.points << 0.0, 1.0;
  a.weights = {0.5, 0.5};
  std::ostringstream s;
  w2_exact_lp(a, a).plan.write_csv(s);
  EXPECT_EQ(s.str().substr(0, 21), "source,target,weight\n");
  EXPECT_NE(s.str().find("0,0,0.5"), std::string::npos);
}
