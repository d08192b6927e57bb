#include "gibbslab/patch_family.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "gibbslab/error.hpp"

namespace gibbslab {

PatchFamily PatchFamily::build(std::vector<Patch> patches, std::size_t n) {
  require(n >= 1, ErrorCode::InvalidArgument, "site count must be at least 1");
  require(!patches.empty(), ErrorCode::EmptyFamily, "patch list is empty");

  PatchFamily family;
  family.n_ = n;
  family.coverage_.assign(n, 0);
  for (std::size_t k = 0; k < patches.size(); ++k) {
    Patch& p = patches[k];
    require(!p.sites.empty(), ErrorCode::InvalidPatch, "patch " + std::to_string(k) + " is empty");
    require(p.multiplicity >= 1, ErrorCode::InvalidPatch,
            "patch " + std::to_string(k) + " has multiplicity 0");
    std::sort(p.sites.begin(), p.sites.end());
    require(std::adjacent_find(p.sites.begin(), p.sites.end()) == p.sites.end(),
            ErrorCode::InvalidPatch, "patch " + std::to_string(k) + " repeats a site");
    require(p.sites.back() < n, ErrorCode::InvalidPatch,
            "patch " + std::to_string(k) + " contains site " + std::to_string(p.sites.back()) +
                " outside [0, " + std::to_string(n) + ")");
    for (Site s : p.sites) family.coverage_[s] += p.multiplicity;
    family.total_ += p.multiplicity;
  }
  for (Site s = 0; s < n; ++s)
    require(family.coverage_[s] > 0, ErrorCode::UncoveredSite,
            "site " + std::to_string(s) + " is not covered by any patch");
  const auto [lo, hi] = std::minmax_element(family.coverage_.begin(), family.coverage_.end());
  family.min_cov_ = *lo;
  family.max_cov_ = *hi;
  family.patches_ = std::move(patches);
  return family;
}

PatchFamily PatchFamily::singletons(std::size_t n) {
  std::vector<Patch> patches;
  for (Site s = 0; s < n; ++s) patches.push_back({{s}, 1});
  return build(std::move(patches), n);
}

PatchFamily PatchFamily::whole(std::size_t n) {
  Patch p;
  for (Site s = 0; s < n; ++s) p.sites.push_back(s);
  return build({p}, n);
}

PatchFamily PatchFamily::lattice_translates(const std::vector<std::size_t>& dims,
                                            const std::vector<std::vector<long>>& window) {
  const std::size_t d = dims.size();
  require(d >= 1, ErrorCode::InvalidArgument, "lattice box needs at least one dimension");
  require(!window.empty(), ErrorCode::EmptyFamily, "translation window is empty");
  for (const auto& w : window)
    require(w.size() == d, ErrorCode::DimensionMismatch, "window offset has wrong dimension");

  std::vector<long> lo(d), hi(d);
  for (std::size_t a = 0; a < d; ++a) {
    long wmin = window[0][a], wmax = window[0][a];
    for (const auto& w : window) {
      wmin = std::min(wmin, w[a]);
      wmax = std::max(wmax, w[a]);
    }
    // translate x hits the box iff some x + w lands in [0, dims[a]).
    lo[a] = -wmax;
    hi[a] = static_cast<long>(dims[a]) - 1 - wmin;
  }

  std::size_t n = 1;
  for (std::size_t len : dims) n *= len;

  std::map<std::vector<Site>, std::size_t> counts;
  std::vector<long> shift(lo);
  while (true) {
    std::vector<Site> sites;
    for (const auto& w : window) {
      Site flat = 0;
      bool inside = true;
      for (std::size_t a = 0; a < d; ++a) {
        const long c = shift[a] + w[a];
        if (c < 0 || c >= static_cast<long>(dims[a])) {
          inside = false;
          break;
        }
        flat = flat * dims[a] + static_cast<Site>(c);
      }
      if (inside) sites.push_back(flat);
    }
    if (!sites.empty()) {
      std::sort(sites.begin(), sites.end());
      sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
      ++counts[sites];
    }
    bool advanced = false;
    for (std::size_t a = d; a-- > 0;) {
      if (++shift[a] <= hi[a]) {
        advanced = true;
        break;
      }
      shift[a] = lo[a];
    }
    if (!advanced) break;
  }

  std::vector<Patch> patches;
  for (auto& [sites, count] : counts) patches.push_back({sites, count});
  return build(std::move(patches), n);
}

std::vector<Site> PatchFamily::complement(std::size_t index) const {
  return complement_of(patches_.at(index).sites, n_);
}

double PatchFamily::selection_weight(std::size_t index) const {
  return static_cast<double>(patches_.at(index).multiplicity) / static_cast<double>(total_);
}

std::vector<Site> complement_of(const std::vector<Site>& sites, std::size_t n) {
  std::vector<Site> out;
  std::size_t k = 0;
  for (Site s = 0; s < n; ++s) {
    if (k < sites.size() && sites[k] == s) {
      ++k;
      continue;
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace gibbslab
