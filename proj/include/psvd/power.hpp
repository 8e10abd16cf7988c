#ifndef PSVD_POWER_HPP
#define PSVD_POWER_HPP

// Single-vector power method and rank-one deflation. A one-at-a-time
// baseline for cross-checking the block iteration.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "psvd/error.hpp"
#include "psvd/matrix.hpp"
#include "psvd/random.hpp"
#include "psvd/svd.hpp"

namespace psvd {

struct PowerResult {
  EigenPair pair;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Iterates v <- A v / ||A v|| until ||v_t - v_{t-1}|| <= eps. Returns the
/// Rayleigh quotient v^T A v with the final vector. Hitting itmax leaves
/// converged = false; the last iterate is still returned.
inline PowerResult classic_power_method(const Matrix& a, const Vector& v0,
                                        double eps, std::size_t itmax) {
  if (!a.is_square())
    throw ShapeError("classic_power_method: matrix is not square");
  if (v0.size() != a.rows())
    throw ShapeError("classic_power_method: start vector length mismatch");
  const double n0 = norm2(v0.values());
  if (!(n0 > 0.0))
    throw PreconditionError("classic_power_method: start vector is zero");

  Vector v = v0;
  for (double& x : v) x /= n0;

  PowerResult out{EigenPair{0.0, v}, 0, false};
  for (std::size_t t = 1; t <= itmax; ++t) {
    Vector z = matvec(a, v);
    const double nz = norm2(z.values());
    out.iterations = t;
    if (nz == 0.0) {
      // v lies in the null space: eigenvalue 0, v is its eigenvector.
      out.converged = true;
      break;
    }
    double delta = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
      z[i] /= nz;
      delta += (z[i] - v[i]) * (z[i] - v[i]);
    }
    v = std::move(z);
    if (std::sqrt(delta) <= eps) {
      out.converged = true;
      break;
    }
  }
  out.pair = EigenPair{dot(v.values(), matvec(a, v).values()), v};
  return out;
}

/// S - lambda v v^T, re-symmetrized.
inline Matrix deflate(const Matrix& s, const EigenPair& pair) {
  if (!s.is_square()) throw ShapeError("deflate: matrix is not square");
  if (pair.vector.size() != s.rows())
    throw ShapeError("deflate: eigenvector length mismatch");
  Matrix out = s;
  const auto& v = pair.vector;
  for (std::size_t i = 0; i < s.rows(); ++i)
    for (std::size_t j = 0; j < s.cols(); ++j)
      out(i, j) -= pair.value * v[i] * v[j];
  symmetrize(out);
  return out;
}

/// Every eigenpair of symmetric PSD `s` by power method plus deflation.
///
/// Each pair starts from a seeded N(0,1) vector (seed + k for pair k). Once
/// the deflated remainder has Frobenius norm <= 1e-12 ||S||_F the remaining
/// pairs are reported as zero eigenvalues without iterating.
inline std::vector<PowerResult> power_deflation_spectrum(const Matrix& s,
                                                         double eps,
                                                         std::size_t itmax,
                                                         std::uint64_t seed) {
  if (!s.is_square())
    throw ShapeError("power_deflation_spectrum: matrix is not square");
  const std::size_t n = s.rows();
  const double norm0 = std::sqrt(frobenius_norm_sq(s));

  std::vector<PowerResult> pairs;
  pairs.reserve(n);
  Matrix rest = s;
  for (std::size_t k = 0; k < n; ++k) {
    if (std::sqrt(frobenius_norm_sq(rest)) <= 1e-12 * norm0) {
      Vector e(n);
      e[k] = 1.0;
      pairs.push_back(PowerResult{EigenPair{0.0, e}, 0, true});
      continue;
    }
    PowerResult pr =
        classic_power_method(rest, random_normal_vector(n, seed + k), eps, itmax);
    if (pr.pair.value < 0.0) pr.pair.value = 0.0;
    rest = deflate(rest, pr.pair);
    pairs.push_back(std::move(pr));
  }
  return pairs;
}

}  // namespace psvd

#endif  // PSVD_POWER_HPP
