#pragma once
// Small models shared by the test binaries.

#include <cmath>
#include <string>
#include <vector>

#include "gibbslab/verify.hpp"

namespace gibbslab::testing {

inline QuadraticPotential coupled_pair(double b, Vector h = Vector::Zero(2)) {
  Matrix J(2, 2);
  J << 1.0, b, b, 1.0;
  return QuadraticPotential::build(J, h);
}

// J = diag + coupling * adjacency on a path of n sites.
inline QuadraticPotential path_potential(std::size_t n, double coupling, double diagonal = 1.0) {
  const auto k = static_cast<Eigen::Index>(n);
  Matrix J = diagonal * Matrix::Identity(k, k);
  for (Eigen::Index i = 0; i + 1 < k; ++i) J(i, i + 1) = J(i + 1, i) = coupling;
  return QuadraticPotential::build(J, Vector::Zero(k));
}

// side x side lattice, nearest neighbours.
inline Matrix lattice_adjacency(std::size_t side) {
  const auto n = static_cast<Eigen::Index>(side * side);
  Matrix a = Matrix::Zero(n, n);
  for (std::size_t r = 0; r < side; ++r)
    for (std::size_t c = 0; c < side; ++c) {
      const auto s = static_cast<Eigen::Index>(r * side + c);
      if (c + 1 < side) a(s, s + 1) = a(s + 1, s) = 1.0;
      if (r + 1 < side) a(s, s + static_cast<Eigen::Index>(side)) = a(s + static_cast<Eigen::Index>(side), s) = 1.0;
    }
  return a;
}

inline QuadraticPotential lattice_potential(std::size_t side, double coupling) {
  const Matrix a = lattice_adjacency(side);
  return QuadraticPotential::build(Matrix::Identity(a.rows(), a.cols()) + coupling * a, Vector::Zero(a.rows()));
}

inline GridKernel grid_kernel(const QuadraticPotential& potential, std::size_t levels, double lo, double hi,
                              PatchFamily family) {
  const Axes axes(potential.dimension(), linspace(lo, hi, levels));
  return GridKernel(GridModel(discretize(potential, axes), potential), std::move(family));
}

inline GridKernel two_site_kernel(std::size_t levels = 6, double b = 0.5) {
  return grid_kernel(coupled_pair(b), levels, -1.0, 1.0, PatchFamily::singletons(2));
}

inline GaussianKernel gaussian_kernel(const QuadraticPotential& potential, PatchFamily family) {
  return GaussianKernel(GaussianModel(potential), std::move(family));
}

inline VerifyContext context(std::uint64_t seed = 7) {
  VerifyContext ctx;
  ctx.model_hash = "test";
  ctx.seed = seed;
  return ctx;
}

inline std::vector<double> random_weights(Rng& g, std::size_t k, double alpha = 1.0) { return dirichlet(g, k, alpha); }

}  // namespace gibbslab::testing
