#include "gibbslab/measures.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "gibbslab/error.hpp"

namespace gibbslab {

GaussianMeasure::GaussianMeasure(Vector mean, Matrix covariance)
    : GaussianMeasure(std::move(mean), std::move(covariance), Unchecked{}) {
  Eigen::LLT<Matrix> llt(covariance_);
  require(llt.info() == Eigen::Success && min_eigenvalue(covariance_) > 0.0,
          ErrorCode::NotPositiveDefinite, "covariance is not positive definite");
}

GaussianMeasure::GaussianMeasure(Vector mean, Matrix covariance, Unchecked)
    : mean_(std::move(mean)), covariance_(std::move(covariance)) {
  require(covariance_.rows() == covariance_.cols() && covariance_.rows() == mean_.size(),
          ErrorCode::DimensionMismatch, "mean and covariance dimensions differ");
  require(mean_.size() >= 1, ErrorCode::DimensionMismatch, "empty Gaussian");
  require(is_symmetric(covariance_), ErrorCode::AsymmetricJ, "covariance is not symmetric");
  covariance_ = 0.5 * (covariance_ + covariance_.transpose()).eval();
}

GaussianMeasure GaussianMeasure::semidefinite(Vector mean, Matrix covariance) {
  GaussianMeasure g(std::move(mean), std::move(covariance), Unchecked{});
  const double lmin = min_eigenvalue(g.covariance_);
  const double scale = std::max(1.0, g.covariance_.cwiseAbs().maxCoeff());
  require(lmin >= -1e-12 * scale, ErrorCode::NotPositiveDefinite,
          "covariance has a negative eigenvalue");
  g.degenerate_ = lmin <= 1e-12 * scale;
  return g;
}

GaussianMeasure GaussianMeasure::standard(std::size_t n) {
  return GaussianMeasure(Vector::Zero(n), Matrix::Identity(n, n));
}

GridMeasure::GridMeasure(Axes axes, std::vector<double> weights)
    : axes_(std::move(axes)), weights_(std::move(weights)) {
  require(!axes_.empty(), ErrorCode::InvalidGrid, "grid has no axes");
  std::size_t total = 1;
  shape_.resize(axes_.size());
  for (std::size_t s = 0; s < axes_.size(); ++s) {
    const auto& a = axes_[s];
    require(!a.empty(), ErrorCode::InvalidGrid, "axis " + std::to_string(s) + " is empty");
    for (std::size_t i = 1; i < a.size(); ++i)
      require(a[i] > a[i - 1], ErrorCode::InvalidGrid,
              "axis " + std::to_string(s) + " is not strictly increasing");
    shape_[s] = a.size();
    total *= a.size();
  }
  require(weights_.size() == total, ErrorCode::DimensionMismatch,
          "weight tensor has " + std::to_string(weights_.size()) + " entries, grid has " +
              std::to_string(total));
  strides_.assign(axes_.size(), 1);
  for (std::size_t s = axes_.size() - 1; s-- > 0;) strides_[s] = strides_[s + 1] * shape_[s + 1];

  double sum = 0.0;
  for (double w : weights_) {
    require(w >= 0.0 && std::isfinite(w), ErrorCode::InvalidGrid, "grid weights must be >= 0");
    sum += w;
  }
  require(std::abs(sum - 1.0) <= kNormalizationTolerance, ErrorCode::InvalidArgument,
          "grid weights sum to " + std::to_string(sum) + ", not 1");
}

GridMeasure GridMeasure::from_unnormalized(Axes axes, std::vector<double> weights) {
  double sum = 0.0;
  for (double w : weights) {
    require(w >= 0.0 && std::isfinite(w), ErrorCode::InvalidGrid, "grid weights must be >= 0");
    sum += w;
  }
  require(sum > 0.0, ErrorCode::InvalidArgument, "grid weights have zero total mass");
  for (double& w : weights) w /= sum;
  return GridMeasure(std::move(axes), std::move(weights));
}

Vector GridMeasure::point(std::size_t flat) const {
  Vector x(static_cast<Eigen::Index>(dimension()));
  for (Site s = 0; s < dimension(); ++s) x(s) = coordinate(flat, s);
  return x;
}

Matrix GridMeasure::points() const {
  Matrix pts(static_cast<Eigen::Index>(size()), static_cast<Eigen::Index>(dimension()));
  for (std::size_t f = 0; f < size(); ++f)
    for (Site s = 0; s < dimension(); ++s) pts(f, s) = coordinate(f, s);
  return pts;
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  for (std::size_t i = 0; i < count; ++i)
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  return out;
}

PatchIndexer::PatchIndexer(const std::vector<std::size_t>& shape, const std::vector<Site>& sites) {
  const std::size_t n = shape.size();
  std::vector<std::size_t> strides(n, 1);
  for (std::size_t s = n - 1; s-- > 0;) strides[s] = strides[s + 1] * shape[s + 1];
  std::vector<bool> in_patch(n, false);
  for (Site s : sites) {
    require(s < n, ErrorCode::InvalidPatch, "patch site outside the grid");
    in_patch[s] = true;
  }

  auto enumerate = [&](bool inside) {
    std::vector<std::size_t> offsets{0};
    for (Site s = 0; s < n; ++s) {
      if (in_patch[s] != inside) continue;
      std::vector<std::size_t> next;
      next.reserve(offsets.size() * shape[s]);
      for (std::size_t base : offsets)
        for (std::size_t l = 0; l < shape[s]; ++l) next.push_back(base + l * strides[s]);
      offsets = std::move(next);
    }
    return offsets;
  };
  patch_offset_ = enumerate(true);
  boundary_offset_ = enumerate(false);

  const std::size_t total = patch_offset_.size() * boundary_offset_.size();
  boundary_index_.assign(total, 0);
  patch_index_.assign(total, 0);
  for (std::size_t b = 0; b < boundary_offset_.size(); ++b)
    for (std::size_t k = 0; k < patch_offset_.size(); ++k) {
      const std::size_t f = boundary_offset_[b] + patch_offset_[k];
      boundary_index_[f] = b;
      patch_index_[f] = k;
    }
  contiguous_ = true;
  for (std::size_t k = 0; k < patch_offset_.size(); ++k)
    if (patch_offset_[k] != k) contiguous_ = false;
}

}  // namespace gibbslab
