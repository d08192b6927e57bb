#pragma once
// Reproducible random streams. Every trial / restart gets its own generator,
// seeded from (master seed, stream labels) through splitmix64, so results do
// not depend on evaluation order.
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace gibbslab {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
  return splitmix64(splitmix64(splitmix64(master) ^ a) ^ (b * 0xd1342543de82ef95ULL));
}

// FNV-1a, used to turn labels such as suite ids into stream numbers.
constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline Rng make_rng(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
  return Rng(derive_seed(master, a, b));
}

inline double uniform01(Rng& g) { return std::uniform_real_distribution<double>(0.0, 1.0)(g); }
inline double standard_normal(Rng& g) { return std::normal_distribution<double>(0.0, 1.0)(g); }

inline std::vector<double> dirichlet(Rng& g, std::size_t k, double concentration) {
  std::gamma_distribution<double> gamma(concentration, 1.0);
  std::vector<double> w(k);
  double s = 0.0;
  while (s <= 0.0) {
    s = 0.0;
    for (auto& x : w) s += (x = gamma(g));
  }
  for (auto& x : w) x /= s;
  return w;
}

// Index drawn with probability proportional to weights (nonnegative, positive sum).
inline std::size_t categorical(Rng& g, std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  double u = uniform01(g) * total;
  std::size_t last = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] <= 0.0) continue;
    last = k;
    if (u < weights[k]) return k;
    u -= weights[k];
  }
  return last;
}

}  // namespace gibbslab
