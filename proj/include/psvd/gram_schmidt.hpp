#ifndef PSVD_GRAM_SCHMIDT_HPP
#define PSVD_GRAM_SCHMIDT_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "psvd/error.hpp"
#include "psvd/matrix.hpp"

namespace psvd {

/// Residual norms below this fraction of the largest input column norm mark
/// a column as linearly dependent.
inline constexpr double kMgsDropTolerance = 1e-12;

/// Modified Gram-Schmidt orthonormalization of the columns of `w`.
///
/// Column i is swept against the already-finished columns 0..i-1 in the
/// modified (sequential update) order, then swept a second time to recover
/// the orthogonality lost to cancellation, and finally normalized. The first
/// sweep performs exactly the classical modified Gram-Schmidt update; the
/// second only removes rounding residue. The first j output columns span
/// the first j input columns for every j.
///
/// Throws RankDeficiencyError naming the first column whose residual norm
/// drops below `drop_tolerance` times the largest input column norm.
inline Matrix modified_gram_schmidt(const Matrix& w,
                                    double drop_tolerance = kMgsDropTolerance) {
  const std::size_t m = w.rows();
  const std::size_t n = w.cols();
  if (m < n)
    throw ShapeError("modified_gram_schmidt: " + std::to_string(n) +
                     " columns exceed " + std::to_string(m) + " rows");

  // Column-major working copy.
  std::vector<std::vector<double>> cols(n, std::vector<double>(m));
  double largest = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) cols[j][i] = w(i, j);
    largest = std::max(largest, norm2(cols[j]));
  }
  const double drop = drop_tolerance * largest;

  for (std::size_t i = 0; i < n; ++i) {
    auto& vi = cols[i];
    for (int sweep = 0; sweep < 2; ++sweep) {
      for (std::size_t k = 0; k < i; ++k) {
        const auto& vk = cols[k];
        const double r = dot(vk, vi);
        for (std::size_t t = 0; t < m; ++t) vi[t] -= r * vk[t];
      }
    }
    const double r = norm2(vi);
    if (!(r > drop) || r == 0.0)
      throw RankDeficiencyError(
          i, "modified_gram_schmidt: column " + std::to_string(i) +
                 " is numerically dependent on the preceding columns");
    for (double& v : vi) v /= r;
  }

  Matrix out(m, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < m; ++i) out(i, j) = cols[j][i];
  return out;
}

/// max |W^T W - I|.
inline double orthonormality_error(const Matrix& w) {
  const Matrix g = gram_matrix(w);
  double e = 0.0;
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j)
      e = std::max(e, std::abs(g(i, j) - (i == j ? 1.0 : 0.0)));
  return e;
}

}  // namespace psvd

#endif  // PSVD_GRAM_SCHMIDT_HPP
