#pragma once

#include <cstddef>
#include <vector>

namespace gibbslab {

using Site = std::size_t;

// A subset of sites (sorted, 0-based) with a positive multiplicity.
struct Patch {
  std::vector<Site> sites;
  std::size_t multiplicity = 1;
};

// Multiset of patches over sites {0, ..., n-1}. N counts patches with
// multiplicity; coverage[i] counts the patches containing site i, again with
// multiplicity; t and v are the smallest and largest coverage.
class PatchFamily {
 public:
  // Throws EmptyFamily, InvalidPatch (empty, out of range, zero multiplicity)
  // or UncoveredSite.
  static PatchFamily build(std::vector<Patch> patches, std::size_t n);

  static PatchFamily singletons(std::size_t n);
  static PatchFamily whole(std::size_t n);

  // Intersections of the translates of `window` (offsets in Z^d) with the box
  // [0, dims[0]) x ... x [0, dims[d-1]); sites are numbered row-major. Equal
  // intersections are merged and their count becomes the multiplicity.
  static PatchFamily lattice_translates(const std::vector<std::size_t>& dims,
                                        const std::vector<std::vector<long>>& window);

  std::size_t site_count() const { return n_; }
  std::size_t patch_count() const { return patches_.size(); }
  const std::vector<Patch>& patches() const { return patches_; }
  const Patch& patch(std::size_t index) const { return patches_.at(index); }

  std::size_t total_count() const { return total_; }      // N
  std::size_t min_coverage() const { return min_cov_; }   // t
  std::size_t max_coverage() const { return max_cov_; }   // v
  const std::vector<std::size_t>& coverage() const { return coverage_; }

  // Complement of patch `index` in {0, ..., n-1}, sorted.
  std::vector<Site> complement(std::size_t index) const;

  // Probability of drawing patch `index` under multiplicity-weighted uniform
  // selection: multiplicity / N.
  double selection_weight(std::size_t index) const;

 private:
  PatchFamily() = default;

  std::size_t n_ = 0;
  std::vector<Patch> patches_;
  std::vector<std::size_t> coverage_;
  std::size_t total_ = 0;
  std::size_t min_cov_ = 0;
  std::size_t max_cov_ = 0;
};

std::vector<Site> complement_of(const std::vector<Site>& sites, std::size_t n);

}  // namespace gibbslab
