#ifndef PSVD_ANALYTICS_HPP
#define PSVD_ANALYTICS_HPP

// Principal component analysis and the identity-activation linear
// autoencoder, both on top of the psvd solver.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>

#include "psvd/error.hpp"
#include "psvd/matrix.hpp"
#include "psvd/random.hpp"
#include "psvd/svd.hpp"

namespace psvd {

struct Centered {
  Matrix data;
  Vector means;
};

struct Standardized {
  Matrix data;
  Vector means;
  Vector sds;  ///< sample standard deviations, divisor m - 1
};

inline Vector column_means(const Matrix& x) {
  Vector means(x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) means[j] += x(i, j);
  for (double& v : means) v /= static_cast<double>(x.rows());
  return means;
}

inline Centered center(const Matrix& x) {
  if (x.rows() < 2) throw PreconditionError("center: need at least 2 rows");
  Vector means = column_means(x);
  Matrix xc = x;
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) xc(i, j) -= means[j];
  return {std::move(xc), std::move(means)};
}

inline Standardized standardize(const Matrix& x) {
  if (x.rows() < 2) throw PreconditionError("standardize: need at least 2 rows");
  Centered c = center(x);
  Vector sds(x.cols());
  for (std::size_t j = 0; j < x.cols(); ++j) {
    double ss = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) ss += c.data(i, j) * c.data(i, j);
    sds[j] = std::sqrt(ss / static_cast<double>(x.rows() - 1));
    if (!(sds[j] > 0.0))
      throw DegenerateColumnError(
          j, "standardize: column " + std::to_string(j) + " has zero variance");
  }
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) c.data(i, j) /= sds[j];
  return {std::move(c.data), std::move(c.means), std::move(sds)};
}

enum class PcaMode { covariance, correlation };

struct PcaResult {
  Vector eigenvalues;  ///< d_j^2 / m, descending
  Matrix axes;         ///< n x r principal directions
  Matrix scores;       ///< m x r, preprocessed X times axes
  /// n x k, X^T X V_k Lambda_k^{-1/2} over the k nonzero eigenvalues;
  /// empty when every eigenvalue is zero.
  std::optional<Matrix> attribute_coords;
  Vector explained;  ///< percent of total variance per component
  PcaMode mode;
  Vector column_means;
  Vector column_sds;  ///< all ones in covariance mode
  RunReport report;
};

/// PCA of the rows of `x`. The covariance matrix uses divisor m; the
/// standard deviations of correlation mode use m - 1.
inline PcaResult pca(const Matrix& x, std::size_t r, PcaMode mode,
                     PsvdConfig cfg = {}) {
  const std::size_t m = x.rows();
  const std::size_t n = x.cols();
  if (r < 1 || r > n) throw PreconditionError("pca: r must be in [1, cols]");
  if (m < 2) throw PreconditionError("pca: need at least 2 observations");

  Matrix xp = x;
  Vector means(n);
  Vector sds(n);
  for (double& s : sds) s = 1.0;
  if (mode == PcaMode::covariance) {
    Centered c = center(x);
    xp = std::move(c.data);
    means = std::move(c.means);
  } else {
    Standardized s = standardize(x);
    xp = std::move(s.data);
    means = std::move(s.means);
    sds = std::move(s.sds);
  }

  cfg.rank = std::min(r, std::min(m, n));
  SvdResult res = psvd(xp, cfg);
  const std::size_t k = res.rank();
  const double md = static_cast<double>(m);

  Vector eigenvalues(k);
  for (std::size_t j = 0; j < k; ++j) eigenvalues[j] = res.d[j] * res.d[j] / md;

  const double total = frobenius_norm_sq(xp) / md;
  Vector explained(k);
  if (total > 0.0)
    for (std::size_t j = 0; j < k; ++j)
      explained[j] = 100.0 * eigenvalues[j] / total;

  Matrix scores = matmul(xp, res.W);

  std::optional<Matrix> attribute_coords;
  const std::size_t nonzero = res.report.numerical_rank;
  if (nonzero > 0) {
    const Matrix vk = res.W.leading_columns(nonzero);
    Matrix coords = matmul(gram_matrix(xp), vk);
    for (std::size_t j = 0; j < nonzero; ++j) {
      const double inv_sqrt = 1.0 / res.d[j];  // Lambda^{-1/2} of X^T X
      for (std::size_t i = 0; i < n; ++i) coords(i, j) *= inv_sqrt;
    }
    attribute_coords = std::move(coords);
  }

  return PcaResult{std::move(eigenvalues), std::move(res.W), std::move(scores),
                   std::move(attribute_coords), std::move(explained), mode,
                   std::move(means), std::move(sds), res.report};
}

/// Identity-activation autoencoder with zero biases: the encoder is W
/// (n x r), the decoder its transpose.
struct LinearAutoencoder {
  Matrix weights;
};

/// x^T W.
inline Vector encode(const Vector& x, const LinearAutoencoder& ae) {
  const Matrix& w = ae.weights;
  if (x.size() != w.rows()) throw ShapeError("encode: input length mismatch");
  Vector v(w.cols());
  for (std::size_t i = 0; i < w.rows(); ++i)
    for (std::size_t j = 0; j < w.cols(); ++j) v[j] += x[i] * w(i, j);
  return v;
}

/// v^T W^T.
inline Vector decode(const Vector& v, const LinearAutoencoder& ae) {
  const Matrix& w = ae.weights;
  if (v.size() != w.cols()) throw ShapeError("decode: code length mismatch");
  return matvec(w, v);
}

/// Row-wise encode: X W.
inline Matrix encode_rows(const Matrix& x, const LinearAutoencoder& ae) {
  return matmul(x, ae.weights);
}

/// Row-wise decode: V W^T.
inline Matrix decode_rows(const Matrix& codes, const LinearAutoencoder& ae) {
  return matmul(codes, transpose(ae.weights));
}

inline LinearAutoencoder ae_from_svd(const SvdResult& res, std::size_t r) {
  if (r < 1 || r > res.W.cols())
    throw PreconditionError("ae_from_svd: r out of range");
  return {res.W.leading_columns(r)};
}

/// Called after every epoch with (epoch, objective).
using EpochObserver = std::function<void(std::size_t, double)>;

/// Plain full-batch gradient descent on 1/2 ||X - X W W^T||_F^2 with no
/// orthogonality constraint. The start is a seeded N(0, 1/n) matrix.
///
/// Throws DivergenceError when the objective rises 10 epochs in a row or
/// stops being finite.
inline LinearAutoencoder train_linear_ae(const Matrix& x, std::size_t r,
                                         double step, std::size_t epochs,
                                         std::uint64_t seed,
                                         const EpochObserver& observer = {}) {
  if (!(step > 0.0) || !std::isfinite(step))
    throw PreconditionError("train_linear_ae: step must be > 0");
  const std::size_t n = x.cols();
  if (r < 1 || r > n) throw PreconditionError("train_linear_ae: r out of range");

  Matrix w = scaled(random_normal_matrix(n, r, seed),
                    1.0 / std::sqrt(static_cast<double>(n)));
  double previous = reconstruction_objective(x, w);
  std::size_t rising = 0;

  for (std::size_t epoch = 1; epoch <= epochs; ++epoch) {
    const Matrix xw = matmul(x, w);
    const Matrix residual = subtract(x, matmul(xw, transpose(w)));
    // dJ/dW = -(X^T E + E^T X) W with E = X - X W W^T.
    const Matrix xte = matmul_tn(x, residual);
    Matrix sym = xte;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) sym(i, j) += xte(j, i);
    const Matrix grad = matmul(sym, w);
    for (std::size_t i = 0; i < w.rows(); ++i)
      for (std::size_t j = 0; j < w.cols(); ++j) w(i, j) += step * grad(i, j);

    if (!w.all_finite())
      throw DivergenceError("train_linear_ae: weights overflowed; use a smaller step");
    const double current = reconstruction_objective(x, w);
    if (observer) observer(epoch, current);
    rising = current > previous ? rising + 1 : 0;
    if (rising >= 10)
      throw DivergenceError(
          "train_linear_ae: objective rose for 10 consecutive epochs; use a "
          "smaller step");
    previous = current;
  }
  return {std::move(w)};
}

}  // namespace psvd

#endif  // PSVD_ANALYTICS_HPP
