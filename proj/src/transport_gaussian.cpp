#include <algorithm>
#include <cmath>

#include "gibbslab/error.hpp"
#include "gibbslab/transport.hpp"

namespace gibbslab {

double w2_gaussian(const GaussianMeasure& a, const GaussianMeasure& b) {
  require(a.dimension() == b.dimension(), ErrorCode::DimensionMismatch,
          "Gaussian dimensions differ");
  if (a.mean() == b.mean() && a.covariance() == b.covariance()) return 0.0;

  const Matrix root_b = sqrt_psd(b.covariance());
  const Matrix cross = root_b * a.covariance() * root_b;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (cross + cross.transpose()), Eigen::EigenvaluesOnly);
  const double cross_trace = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  const double w2 = (a.mean() - b.mean()).squaredNorm() + a.covariance().trace() +
                    b.covariance().trace() - 2.0 * cross_trace;
  return std::sqrt(std::max(0.0, w2));
}

AffineMap optimal_gaussian_map(const GaussianMeasure& from, const GaussianMeasure& to) {
  require(from.dimension() == to.dimension(), ErrorCode::DimensionMismatch,
          "Gaussian dimensions differ");
  require(!from.degenerate(), ErrorCode::NotPositiveDefinite,
          "source Gaussian must be nondegenerate");
  const Matrix root = sqrt_psd(from.covariance());
  const Matrix inv_root = inv_sqrt_psd(from.covariance());
  const Matrix middle = root * to.covariance() * root;
  Matrix t = inv_root * sqrt_psd(0.5 * (middle + middle.transpose())) * inv_root;
  t = 0.5 * (t + t.transpose()).eval();
  return {t, to.mean() - t * from.mean()};
}

}  // namespace gibbslab
