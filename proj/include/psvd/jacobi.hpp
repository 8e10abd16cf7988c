#ifndef PSVD_JACOBI_HPP
#define PSVD_JACOBI_HPP

// Cyclic Jacobi eigensolver for symmetric matrices. Used as the reference
// spectrum; it shares no code with the subspace iteration.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "psvd/error.hpp"
#include "psvd/matrix.hpp"
#include "psvd/svd.hpp"

namespace psvd {

struct EigenDecomposition {
  Vector values;  ///< descending
  Matrix vectors;  ///< column j pairs with values[j]
};

inline constexpr std::size_t kJacobiMaxSweeps = 100;

/// Full eigendecomposition of symmetric `s` by cyclic-by-rows Jacobi
/// rotations. Sweeps stop once the off-diagonal Frobenius norm is
/// <= tol * ||S||_F.
inline EigenDecomposition jacobi_eigen_sym(const Matrix& s, double tol = 1e-12) {
  if (!s.is_square())
    throw ShapeError("jacobi_eigen_sym: matrix is not square");
  if (asymmetry(s) > 1e-10)
    throw PreconditionError("jacobi_eigen_sym: matrix is not symmetric");

  const std::size_t n = s.rows();
  Matrix a = s;
  Matrix v = Matrix::identity(n);
  const double target = tol * std::sqrt(frobenius_norm_sq(s));

  auto off_norm = [&] {
    double sum = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) sum += 2.0 * a(p, q) * a(p, q);
    return std::sqrt(sum);
  };

  std::size_t sweeps = 0;
  while (off_norm() > target) {
    if (++sweeps > kJacobiMaxSweeps)
      throw ConvergenceError("jacobi_eigen_sym: no convergence after " +
                             std::to_string(kJacobiMaxSweeps) + " sweeps");
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rotation angle annihilating a(p, q).
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return a(i, i) > a(j, j);
  });
  Vector values(n);
  for (std::size_t k = 0; k < n; ++k) values[k] = a(order[k], order[k]);
  Matrix vectors = permute_columns(v, order);
  normalize_column_signs(vectors);
  return {std::move(values), std::move(vectors)};
}

/// SVD of X through the eigendecomposition of X^T X.
inline SvdResult oracle_svd(const Matrix& x) {
  EigenDecomposition eig = jacobi_eigen_sym(gram_matrix(x));
  Vector lambdas = eig.values;
  for (double& l : lambdas) l = std::max(l, 0.0);
  RunReport report;
  report.converged = true;
  report.final_delta = 0.0;
  return assemble_svd(x, std::move(eig.vectors), lambdas, 1.0, report);
}

}  // namespace psvd

#endif  // PSVD_JACOBI_HPP
