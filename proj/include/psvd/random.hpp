#ifndef PSVD_RANDOM_HPP
#define PSVD_RANDOM_HPP

#include <cstddef>
#include <cstdint>
#include <random>

#include "psvd/matrix.hpp"

namespace psvd {

/// rows x cols matrix of independent N(0, 1) draws. The generator is created
/// from `seed` on every call, so equal seeds give bit-identical matrices.
inline Matrix random_normal_matrix(std::size_t rows, std::size_t cols,
                                   std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (double& v : m.values()) v = normal(rng);
  return m;
}

inline Vector random_normal_vector(std::size_t len, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(len);
  for (double& x : v) x = normal(rng);
  return v;
}

}  // namespace psvd

#endif  // PSVD_RANDOM_HPP
