#include <gtest/gtest.h>

#include <cmath>

#include "gibbslab/error.hpp"
#include "support.hpp"

using namespace gibbslab;
using namespace gibbslab::testing;

TEST(Divergence, InfiniteIsExplicit) {
  const auto d = Divergence::infinite();
  EXPECT_TRUE(d.is_infinite());
  EXPECT_EQ(d.to_string(), "inf");
  EXPECT_THROW((void)d.value(), Error);
  EXPECT_DOUBLE_EQ(Divergence::finite(0.5).value(), 0.5);
}

TEST(Divergence, WeightsClosedForm) {
  const std::vector<double> p{0.5, 0.5}, q{0.25, 0.75};
  EXPECT_NEAR(kl_weights(p, q).value(), 0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0), 1e-15);
  EXPECT_DOUBLE_EQ(kl_weights(p, p).value(), 0.0);
  EXPECT_TRUE(kl_weights(std::vector<double>{0.5, 0.5}, std::vector<double>{1.0, 0.0}).is_infinite());
  EXPECT_DOUBLE_EQ(kl_weights(std::vector<double>{1.0, 0.0}, std::vector<double>{0.5, 0.5}).value(), std::log(2.0));
}

TEST(Divergence, GridMismatch) {
  const GridMeasure a({{0.0, 1.0}}, {0.5, 0.5}), b({{0.0, 2.0}}, {0.5, 0.5});
  try {
    kl_grid(a, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GridMismatch);
  }
}

TEST(Divergence, GaussianClosedForm) {
  const GaussianMeasure p(Vector::Constant(1, 1.0), Matrix::Constant(1, 1, 4.0));
  const GaussianMeasure q(Vector::Constant(1, 0.0), Matrix::Constant(1, 1, 1.0));
  // log(s_q/s_p) + (s_p^2 + (m_p - m_q)^2) / (2 s_q^2) - 1/2
  EXPECT_NEAR(kl_gaussian(p, q).value(), std::log(0.5) + 5.0 / 2.0 - 0.5, 1e-12);
  EXPECT_NEAR(kl_gaussian(p, p).value(), 0.0, 1e-14);
}

TEST(Divergence, SingularReferenceLaw) {
  Matrix S = Matrix::Zero(2, 2);
  S(0, 0) = 1.0;
  const auto q = GaussianMeasure::semidefinite(Vector::Zero(2), S);
  // Mass off the range of q: infinite.
  EXPECT_TRUE(kl_gaussian(GaussianMeasure::standard(2), q).is_infinite());
}

TEST(Divergence, TalagrandEqualityForShiftedGaussians) {
  Rng g(4);
  for (int trial = 0; trial < 20; ++trial) {
    const double s2 = 0.2 + uniform01(g);
    Vector m(4);
    for (auto& x : m) x = standard_normal(g);
    const GaussianMeasure p(m, s2 * Matrix::Identity(4, 4)), q(Vector::Zero(4), s2 * Matrix::Identity(4, 4));
    EXPECT_NEAR(std::pow(w2_gaussian(p, q), 2), 2.0 * s2 * kl_gaussian(p, q).value(), 1e-9);
  }
}

TEST(Divergence, DecreasesAlongTheSampler) {
  const auto kernel = two_site_kernel(6, 0.5);
  Rng g(8);
  for (int trial = 0; trial < 50; ++trial) {
    GridMeasure p(kernel.q().axes(), dirichlet(g, kernel.q().size(), 0.5));
    for (std::size_t k = 0; k < 2; ++k) {
      const auto next = kernel.apply_patch(p, k);
      EXPECT_LE(kl_grid(next, kernel.q()).value(), kl_grid(p, kernel.q()).value() + 1e-10);
    }
  }
}
