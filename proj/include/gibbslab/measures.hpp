#pragma once

#include <span>
#include <vector>

#include "gibbslab/linalg.hpp"

namespace gibbslab {

class GaussianMeasure {
 public:
  // Nondegenerate law; throws NotPositiveDefinite or AsymmetricJ (for an
  // asymmetric covariance).
  GaussianMeasure(Vector mean, Matrix covariance);

  // Admits a positive semidefinite covariance; used for singular reference
  // laws in divergence computations.
  static GaussianMeasure semidefinite(Vector mean, Matrix covariance);

  std::size_t dimension() const { return static_cast<std::size_t>(mean_.size()); }
  const Vector& mean() const { return mean_; }
  const Matrix& covariance() const { return covariance_; }
  bool degenerate() const { return degenerate_; }

  static GaussianMeasure standard(std::size_t n);

 private:
  struct Unchecked {};
  GaussianMeasure(Vector mean, Matrix covariance, Unchecked);

  Vector mean_;
  Matrix covariance_;
  bool degenerate_ = false;
};

using Axes = std::vector<std::vector<double>>;

// Finitely supported law on the product grid axes[0] x ... x axes[n-1].
// Weights are stored row-major: the last site varies fastest.
class GridMeasure {
 public:
  // Throws InvalidGrid for unsorted axes or negative weights, InvalidArgument
  // when the weights do not sum to 1 within 1e-12.
  GridMeasure(Axes axes, std::vector<double> weights);

  // Normalizes nonnegative weights with positive total.
  static GridMeasure from_unnormalized(Axes axes, std::vector<double> weights);

  std::size_t dimension() const { return axes_.size(); }
  std::size_t size() const { return weights_.size(); }
  const Axes& axes() const { return axes_; }
  std::span<const double> weights() const { return weights_; }
  double weight(std::size_t flat) const { return weights_[flat]; }
  const std::vector<std::size_t>& shape() const { return shape_; }
  const std::vector<std::size_t>& strides() const { return strides_; }

  std::size_t level(std::size_t flat, Site site) const {
    return (flat / strides_[site]) % shape_[site];
  }
  double coordinate(std::size_t flat, Site site) const { return axes_[site][level(flat, site)]; }
  Vector point(std::size_t flat) const;

  bool same_grid(const GridMeasure& other) const { return axes_ == other.axes_; }

  // Support coordinates, one row per grid point (size x dimension).
  Matrix points() const;

  static constexpr double kNormalizationTolerance = 1e-12;

 private:
  Axes axes_;
  std::vector<double> weights_;
  std::vector<std::size_t> shape_;
  std::vector<std::size_t> strides_;
};

std::vector<double> linspace(double lo, double hi, std::size_t count);

// Splits flat grid indices into the part indexed by `sites` and the part
// indexed by the remaining sites: flat = boundary_offset[b] + patch_offset[k].
class PatchIndexer {
 public:
  PatchIndexer(const std::vector<std::size_t>& shape, const std::vector<Site>& sites);

  std::size_t boundary_count() const { return boundary_offset_.size(); }
  std::size_t patch_count() const { return patch_offset_.size(); }
  const std::vector<std::size_t>& boundary_offsets() const { return boundary_offset_; }
  const std::vector<std::size_t>& patch_offsets() const { return patch_offset_; }
  std::size_t flat(std::size_t boundary, std::size_t patch) const {
    return boundary_offset_[boundary] + patch_offset_[patch];
  }
  // Inverse maps from a flat index.
  std::size_t boundary_of(std::size_t flat) const { return boundary_index_[flat]; }
  std::size_t patch_of(std::size_t flat) const { return patch_index_[flat]; }
  // True when patch offsets are 0, 1, ..., patch_count-1.
  bool contiguous() const { return contiguous_; }

 private:
  std::vector<std::size_t> boundary_offset_;
  std::vector<std::size_t> patch_offset_;
  std::vector<std::size_t> boundary_index_;
  std::vector<std::size_t> patch_index_;
  bool contiguous_ = false;
};

}  // namespace gibbslab
