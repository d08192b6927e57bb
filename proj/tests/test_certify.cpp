#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "gibbslab/error.hpp"
#include "support.hpp"

using namespace gibbslab;
using namespace gibbslab::testing;

namespace {

double delta_of(const ContractivityResult& r) { return std::get<ContractivityCertificate>(r).delta; }

}  // namespace

TEST(Rho, GaussianConditionalsUseTheSmallestBlockEigenvalue) {
  Matrix J(3, 3);
  J << 2.0, 0.5, 0.0, 0.5, 1.0, 0.1, 0.0, 0.1, 3.0;
  const auto p = QuadraticPotential::build(J, Vector::Zero(3));
  const auto single = rho_gaussian_conditionals(p, PatchFamily::singletons(3));
  EXPECT_DOUBLE_EQ(single.rho, 1.0);
  EXPECT_EQ(single.kind, RhoKind::GaussianExact);
  EXPECT_TRUE(single.rigorous);
  const auto pair = rho_gaussian_conditionals(p, PatchFamily::build({{{0, 1}, 1}, {{2}, 1}}, 3));
  EXPECT_NEAR(pair.rho, 1.5 - std::sqrt(0.25 + 0.25), 1e-12);
}

TEST(Rho, HolleyStroock) {
  const auto c = rho_holley_stroock(2.0, 0.25);
  EXPECT_NEAR(c.rho, 2.0 * std::exp(-1.0), 1e-15);
  EXPECT_EQ(c.kind, RhoKind::HolleyStroock);
  try {
    rho_holley_stroock(0.0, 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonpositiveConvexity);
  }
}

TEST(Rho, EmpiricalOnADiscretizedStandardGaussian) {
  const auto kernel = grid_kernel(QuadraticPotential::build(Matrix::Identity(1, 1), Vector::Zero(1)), 256, -5.0, 5.0,
                                  PatchFamily::whole(1));
  const auto c = rho_empirical(kernel.conditional(0), 0, RhoSearch{.trials = 1000, .seed = 1});
  EXPECT_EQ(c.kind, RhoKind::Empirical);
  EXPECT_FALSE(c.rigorous);
  EXPECT_GE(c.rho, 0.5);
  EXPECT_LE(c.rho, 1.5);
}

TEST(Rho, EmpiricalIsMonotoneInTrials) {
  const auto kernel = two_site_kernel(6, 0.5);
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t trials : {10u, 40u, 160u}) {
    const auto c = rho_empirical(kernel, RhoSearch{.trials = trials, .seed = 3});
    EXPECT_LE(c.rho, previous + 1e-15);
    previous = c.rho;
  }
}

TEST(Def1, ExactGaussianValues) {
  // 2-site coupling 0.5: |G|^2 = 0.25.
  EXPECT_NEAR(delta_of(check_contractivity_def1(coupled_pair(0.5), PatchFamily::singletons(2))), 0.75, 1e-12);
  // Path of 5 sites, coupling 0.2: |adjacency| = 2 cos(pi/6).
  const double a = 2.0 * std::cos(std::numbers::pi / 6.0);
  EXPECT_NEAR(delta_of(check_contractivity_def1(path_potential(5, 0.2), PatchFamily::singletons(5))),
              1.0 - 0.04 * a * a, 1e-12);
  EXPECT_NEAR(delta_of(check_contractivity_def1(lattice_potential(3, 0.2), PatchFamily::singletons(9))), 0.68, 1e-12);
}

TEST(Def1, StrongCouplingFails) {
  const auto r = check_contractivity_def1(lattice_potential(3, 0.6), PatchFamily::singletons(9));
  ASSERT_FALSE(certified(r));
  EXPECT_NEAR(std::get<ContractivityFailure>(r).sup, 0.36 * 8.0, 1e-10);
}

TEST(Def1, SupAtTheThresholdIsAFailureNotAClamp) {
  EXPECT_FALSE(certified(contractivity_from_sup(1.0, 1, ContractivityMethod::Def1Exact)));
  EXPECT_FALSE(certified(contractivity_from_sup(2.5, 2, ContractivityMethod::Def1Exact)));
  EXPECT_NEAR(delta_of(contractivity_from_sup(0.5, 2, ContractivityMethod::Def1Exact)), 0.75, 1e-15);
}

TEST(Def1, GainMatrixReproducesConditionalTransport) {
  // sum_I mult W^2(Q_I|y, Q_I|z) = |G (y - z)|^2 with a multi-site patch.
  const auto pot = path_potential(4, 0.3);
  const auto fam = PatchFamily::build({{{0, 1}, 2}, {{2}, 1}, {{1, 2, 3}, 1}}, 4);
  const Matrix G = def1_gain_matrix(pot, fam);
  const GaussianModel model(pot);
  Rng g(4);
  for (int trial = 0; trial < 10; ++trial) {
    Vector y(4), z(4);
    for (auto& x : y) x = standard_normal(g);
    for (auto& x : z) x = standard_normal(g);
    double total = 0.0;
    for (std::size_t k = 0; k < fam.patch_count(); ++k) {
      const auto c = model.conditional(fam.patch(k).sites);
      const auto out = fam.complement(k);
      const GaussianMeasure a(c.mean_given(subvector(y, out)), c.covariance), b(c.mean_given(subvector(z, out)), c.covariance);
      total += static_cast<double>(fam.patch(k).multiplicity) * std::pow(w2_gaussian(a, b), 2);
    }
    EXPECT_NEAR(total, (G * (y - z)).squaredNorm(), 1e-10);
  }
}

TEST(Def1, GridExhaustiveBeatsNothingItMisses) {
  const auto kernel = two_site_kernel(4, 0.5);
  const auto r = check_contractivity_def1(kernel);
  ASSERT_TRUE(certified(r));
  const auto& c = std::get<ContractivityCertificate>(r);
  EXPECT_EQ(c.method, ContractivityMethod::Def1Exhaustive);
  // Recompute the sup by brute force over state pairs.
  const auto& q = kernel.q();
  double sup = 0.0;
  for (std::size_t y = 0; y < q.size(); ++y)
    for (std::size_t z = y + 1; z < q.size(); ++z) {
      double total = 0.0;
      for (std::size_t k = 0; k < 2; ++k) {
        const auto& cond = kernel.conditional(k);
        total += kernel.couple(k, cond.slice(cond.indexer.boundary_of(y)), cond.slice(cond.indexer.boundary_of(z))).cost;
      }
      sup = std::max(sup, total / (q.point(y) - q.point(z)).squaredNorm());
    }
  EXPECT_NEAR(c.sup, sup, 1e-12);
}

TEST(Matrices, GaussianAColumnsAndDefinition2) {
  const auto pot = coupled_pair(0.5);
  const auto m = dobrushin_matrix_A(pot, PatchFamily::singletons(2));
  EXPECT_TRUE(m.exact);
  EXPECT_NEAR(m.A(0, 1), 0.5, 1e-15);
  EXPECT_NEAR(m.A(0, 0), 0.0, 1e-15);
  EXPECT_NEAR(delta_of(check_definition2(m, 1)), 0.75, 1e-12);
}

TEST(Matrices, ConstantBIsTheOffPatchInteraction) {
  const auto pot = lattice_potential(3, 0.2);
  const auto fam = PatchFamily::singletons(9);
  const auto m = matrix_B(pot, fam);
  EXPECT_EQ(m.B.rows(), 9);
  EXPECT_NEAR(operator_norm(m.B), 0.2 * 2.0 * std::sqrt(2.0), 1e-10);
  // The (eta, y) form agrees for a quadratic potential.
  std::vector<Vector> eta(9, Vector::Constant(1, 0.3));
  const auto m2 = matrix_B(pot, fam, eta, Vector::Constant(9, -0.2));
  EXPECT_LT((m2.B - m.B).norm(), 1e-12);
}

TEST(Matrices, OperatorNormAgreesWithSvd) {
  Rng g(6);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix a(5, 3);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = standard_normal(g);
    const double svd = Eigen::JacobiSVD<Matrix>(a).singularValues()(0);
    EXPECT_NEAR(operator_norm(a), svd, 1e-9 * svd);
  }
  EXPECT_DOUBLE_EQ(operator_norm(Matrix::Zero(3, 3)), 0.0);
}

TEST(Theorem2, ConsistentWithExactDefinition1OnConstantDiagonal) {
  for (double c : {0.05, 0.1, 0.2, 0.3}) {
    for (double diag : {1.0, 2.0}) {
      const Matrix a = lattice_adjacency(3);
      const auto pot = QuadraticPotential::build(diag * Matrix::Identity(9, 9) + c * a, Vector::Zero(9));
      const auto fam = PatchFamily::singletons(9);
      const auto rho = rho_gaussian_conditionals(pot, fam);
      const auto t2 = check_theorem2(pot, fam, rho);
      const auto d1 = check_contractivity_def1(pot, fam);
      const double sup_d1 = std::visit([](const auto& r) { return r.sup; }, d1);
      const double sup_t2 = std::visit([](const auto& r) { return r.sup; }, t2);
      EXPECT_NEAR(sup_d1, sup_t2, 1e-8) << c << " " << diag;
    }
  }
}

TEST(Corollary1, CoefficientAndGuard) {
  EXPECT_NEAR(corollary1_coefficient(1.0, 0.5, 2.0), 4.0 / 0.75 * 2.0, 1e-12);
  try {
    corollary1_coefficient(1.0, 1.0, 2.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotContractive);
  }
}

TEST(Certificates, Names) {
  EXPECT_EQ(to_string(RhoKind::Empirical), "empirical");
  EXPECT_EQ(to_string(RhoKind::HolleyStroock), "holley-stroock");
  EXPECT_EQ(to_string(ContractivityMethod::Def1Empirical), "def1-empirical");
  EXPECT_EQ(to_string(ContractivityMethod::Theorem2Matrix), "theorem2-matrix");
}
