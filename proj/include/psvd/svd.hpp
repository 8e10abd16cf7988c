#ifndef PSVD_SVD_HPP
#define PSVD_SVD_HPP

// Truncated SVD by simultaneous power iteration on the gain matrix
// G = I + eta (X^T X)^q with Gram-Schmidt re-orthonormalization.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "psvd/error.hpp"
#include "psvd/gram_schmidt.hpp"
#include "psvd/matrix.hpp"
#include "psvd/random.hpp"

namespace psvd {

/// Solver settings. Defaults: q = 2, eta = 1, eps = 1e-8, 200 iterations.
struct PsvdConfig {
  std::size_t rank = 0;  ///< number of singular triplets; 0 selects all
  unsigned q = 2;        ///< power applied to X^T X, one of 1..4
  double eta = 1.0;      ///< step, > 0
  double eps = 1e-8;     ///< stop once the squared Frobenius step <= eps
  std::size_t itmax = 200;
  std::uint64_t seed = 42;
  bool prescale = false;  ///< divide X by max |x_ij| before forming G
};

struct RunReport {
  std::size_t iterations = 0;
  double final_delta = std::numeric_limits<double>::infinity();
  bool converged = false;
  std::size_t numerical_rank = 0;
  double zero_threshold = 0.0;
};

/// X = U diag(d) W^T truncated to r terms. d is descending; columns of U
/// past the numerical rank are zero.
struct SvdResult {
  Matrix U;
  Vector d;
  Matrix W;
  RunReport report;

  std::size_t rank() const noexcept { return d.size(); }
};

struct EigenPair {
  double value;
  Vector vector;
};

struct GainMatrix {
  Matrix gain;
  double scale;  ///< singular values of the scaled input times this restore X's
};

struct SubspaceIteration {
  Matrix W;
  RunReport report;
};

struct Spectrum {
  Vector lambdas;                  ///< descending
  std::vector<std::size_t> order;  ///< lambdas[k] came from input column order[k]
};

inline constexpr double kRelativeZeroThreshold = 1e-8;
inline constexpr double kAbsoluteZeroThreshold = 1e-12;

/// Effective rank for an m x n input: cfg.rank, or min(m, n) when unset.
inline std::size_t effective_rank(const PsvdConfig& cfg, std::size_t rows,
                                  std::size_t cols) {
  return cfg.rank == 0 ? std::min(rows, cols) : cfg.rank;
}

inline void validate(const PsvdConfig& cfg, std::size_t rows,
                     std::size_t cols) {
  const std::size_t limit = std::min(rows, cols);
  if (cfg.rank > limit)
    throw PreconditionError("rank " + std::to_string(cfg.rank) +
                            " exceeds min(rows, cols) = " +
                            std::to_string(limit));
  if (cfg.q < 1 || cfg.q > 4)
    throw PreconditionError("q must be one of 1, 2, 3, 4");
  if (!(cfg.eta > 0.0) || !std::isfinite(cfg.eta))
    throw PreconditionError("eta must be a positive finite number");
  if (!(cfg.eps > 0.0) || !std::isfinite(cfg.eps))
    throw PreconditionError("eps must be a positive finite number");
  if (cfg.itmax < 1) throw PreconditionError("itmax must be >= 1");
}

/// Flips column j of `w` so that its largest-magnitude entry (lowest index
/// on ties) is positive. Returns the applied sign per column.
inline std::vector<double> normalize_column_signs(Matrix& w) {
  std::vector<double> signs(w.cols(), 1.0);
  for (std::size_t j = 0; j < w.cols(); ++j) {
    std::size_t best = 0;
    double best_abs = -1.0;
    for (std::size_t i = 0; i < w.rows(); ++i) {
      const double a = std::abs(w(i, j));
      if (a > best_abs) {
        best_abs = a;
        best = i;
      }
    }
    if (w(best, j) < 0.0) {
      signs[j] = -1.0;
      for (std::size_t i = 0; i < w.rows(); ++i) w(i, j) = -w(i, j);
    }
  }
  return signs;
}

inline Matrix permute_columns(const Matrix& w,
                              const std::vector<std::size_t>& order) {
  if (order.size() != w.cols())
    throw ShapeError("permute_columns: permutation length mismatch");
  Matrix out(w.rows(), w.cols());
  for (std::size_t k = 0; k < order.size(); ++k)
    for (std::size_t i = 0; i < w.rows(); ++i) out(i, k) = w(i, order[k]);
  return out;
}

/// G = I + eta (X^T X)^q, optionally after dividing X by its largest
/// absolute entry.
inline GainMatrix build_gain(const Matrix& x, double eta, unsigned q,
                             bool prescale) {
  if (!(eta > 0.0)) throw PreconditionError("build_gain: eta must be > 0");
  if (q < 1 || q > 4)
    throw PreconditionError("build_gain: q must be one of 1, 2, 3, 4");

  double scale = 1.0;
  Matrix s = [&] {
    if (prescale) {
      const double m = max_abs(x);
      if (m > 0.0) {
        scale = m;
        return gram_matrix(scaled(x, 1.0 / m));
      }
    }
    return gram_matrix(x);
  }();

  Matrix g = sym_matrix_power(s, q);
  for (double& v : g.values()) v *= eta;
  for (std::size_t i = 0; i < g.rows(); ++i) g(i, i) += 1.0;
  if (!g.all_finite())
    throw NumericOverflowError(
        "build_gain: gain matrix overflowed; rerun with prescale enabled");
  return {std::move(g), scale};
}

/// Repeats W <- MGS(G W) from a column-orthonormal W0 until the squared
/// Frobenius change between iterates is <= eps or itmax steps were taken.
inline SubspaceIteration subspace_iterate(const Matrix& gain, const Matrix& w0,
                                          double eps, std::size_t itmax) {
  if (!gain.is_square())
    throw ShapeError("subspace_iterate: gain matrix is not square");
  if (gain.rows() != w0.rows())
    throw ShapeError("subspace_iterate: W0 has " + std::to_string(w0.rows()) +
                     " rows, gain matrix is " + std::to_string(gain.rows()) +
                     " square");
  if (orthonormality_error(w0) > 1e-8)
    throw PreconditionError("subspace_iterate: W0 is not column-orthonormal");
  if (!(eps > 0.0)) throw PreconditionError("subspace_iterate: eps must be > 0");
  if (itmax < 1) throw PreconditionError("subspace_iterate: itmax must be >= 1");

  // G is nonsingular, so G W keeps full column rank; only residuals at the
  // rounding level of a unit column count as dependent.
  const double drop =
      static_cast<double>(gain.rows()) * std::numeric_limits<double>::epsilon();

  SubspaceIteration state{w0, RunReport{}};
  Matrix& w = state.W;
  RunReport& report = state.report;

  for (std::size_t t = 1; t <= itmax; ++t) {
    Matrix next = matmul(gain, w);
    // MGS output is invariant under positive column scaling; equalizing the
    // column norms keeps the drop tolerance meaningful when G is graded.
    for (std::size_t j = 0; j < next.cols(); ++j) {
      double nrm = 0.0;
      for (std::size_t i = 0; i < next.rows(); ++i)
        nrm += next(i, j) * next(i, j);
      nrm = std::sqrt(nrm);
      if (nrm > 0.0)
        for (std::size_t i = 0; i < next.rows(); ++i) next(i, j) /= nrm;
    }
    try {
      next = modified_gram_schmidt(next, drop);
    } catch (const RankDeficiencyError& e) {
      throw NumericError("subspace_iterate: iteration " + std::to_string(t) +
                         ": " + e.what());
    }
    const double delta = frobenius_norm_sq(subtract(next, w));
    w = std::move(next);
    report.iterations = t;
    report.final_delta = delta;
    if (delta <= eps) {
      report.converged = true;
      break;
    }
  }
  return state;
}

/// Diagonal of (XW)^T (XW), sorted descending with the permutation used.
inline Spectrum recover_spectrum(const Matrix& x, const Matrix& w) {
  if (x.cols() != w.rows())
    throw ShapeError("recover_spectrum: X has " + std::to_string(x.cols()) +
                     " columns, W has " + std::to_string(w.rows()) + " rows");
  const Matrix xw = matmul(x, w);
  const Matrix p = matmul_tn(xw, xw);
  const std::size_t r = w.cols();

  std::vector<double> diag(r);
  for (std::size_t j = 0; j < r; ++j) {
    double v = p(j, j);
    if (v < -1e-10)
      throw NumericError("recover_spectrum: negative diagonal entry " +
                         std::to_string(v) + " in column " + std::to_string(j));
    diag[j] = std::max(v, 0.0);
  }

  std::vector<std::size_t> order(r);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return diag[a] > diag[b];
                   });
  Vector lambdas(r);
  for (std::size_t k = 0; k < r; ++k) lambdas[k] = diag[order[k]];
  return {std::move(lambdas), std::move(order)};
}

/// Turns right singular vectors and eigenvalues of X^T X into a full SVD
/// result: d = scale * sqrt(lambda), u_j = X w_j / sqrt(lambda_j).
///
/// `x` is the matrix the eigenvalues belong to (the scaled input when
/// prescaling). Columns with d_j <= 1e-8 d_1 (1e-12 absolute if d_1 = 0)
/// are below the numerical rank: their d_j is set to 0 and their U column
/// is zero. W column
/// signs are normalized so the largest-magnitude entry is positive.
inline SvdResult assemble_svd(const Matrix& x, Matrix w, const Vector& lambdas,
                              double scale, RunReport report) {
  if (x.cols() != w.rows())
    throw ShapeError("assemble_svd: X and W do not conform");
  if (lambdas.size() != w.cols())
    throw ShapeError("assemble_svd: one eigenvalue per W column expected");
  const std::size_t r = w.cols();
  for (std::size_t j = 0; j + 1 < r; ++j)
    if (lambdas[j] < lambdas[j + 1])
      throw PreconditionError("assemble_svd: eigenvalues must be descending");

  normalize_column_signs(w);

  Vector d(r);
  for (std::size_t j = 0; j < r; ++j)
    d[j] = scale * std::sqrt(std::max(lambdas[j], 0.0));
  const double threshold =
      d[0] > 0.0 ? kRelativeZeroThreshold * d[0] : kAbsoluteZeroThreshold;

  const Matrix xw = matmul(x, w);
  Matrix u(x.rows(), r);
  std::size_t numerical_rank = 0;
  for (std::size_t j = 0; j < r; ++j) {
    if (!(d[j] > threshold)) {
      d[j] = 0.0;
      continue;
    }
    ++numerical_rank;
    const double inv = 1.0 / std::sqrt(lambdas[j]);
    for (std::size_t i = 0; i < x.rows(); ++i) u(i, j) = xw(i, j) * inv;
  }
  report.numerical_rank = numerical_rank;
  report.zero_threshold = threshold;
  return {std::move(u), std::move(d), std::move(w), report};
}

/// Full pipeline: seeded N(0,1) start, MGS, gain, subspace iteration,
/// spectrum recovery and assembly. Inputs with fewer rows than columns are
/// transposed internally and the factors swapped back.
///
/// Non-convergence is not an error: the result carries converged = false.
inline SvdResult psvd(const Matrix& x, const PsvdConfig& cfg = {}) {
  validate(cfg, x.rows(), x.cols());

  if (x.rows() < x.cols()) {
    SvdResult t = psvd(transpose(x), cfg);
    SvdResult out{std::move(t.W), std::move(t.d), std::move(t.U), t.report};
    const auto signs = normalize_column_signs(out.W);
    for (std::size_t j = 0; j < signs.size(); ++j)
      if (signs[j] < 0.0)
        for (std::size_t i = 0; i < out.U.rows(); ++i) out.U(i, j) = -out.U(i, j);
    return out;
  }

  const std::size_t n = x.cols();
  const std::size_t r = effective_rank(cfg, x.rows(), n);

  const Matrix w0 = modified_gram_schmidt(random_normal_matrix(n, r, cfg.seed));
  GainMatrix g = build_gain(x, cfg.eta, cfg.q, cfg.prescale);
  const Matrix xs = g.scale == 1.0 ? x : scaled(x, 1.0 / g.scale);

  SubspaceIteration it = subspace_iterate(g.gain, w0, cfg.eps, cfg.itmax);
  Spectrum spec = recover_spectrum(xs, it.W);
  return assemble_svd(xs, permute_columns(it.W, spec.order), spec.lambdas,
                      g.scale, it.report);
}

enum class OrthonormalityCheck { enforce, skip };

/// J(W) = 1/2 ||X - X W W^T||_F^2 for column-orthonormal W, evaluated as
/// 1/2 (||X||_F^2 - ||X W||_F^2). The two agree whenever W^T W = I; the
/// latter is the form whose gradient is -X^T X W.
inline double objective(const Matrix& x, const Matrix& w,
                        OrthonormalityCheck check = OrthonormalityCheck::enforce) {
  if (x.cols() != w.rows()) throw ShapeError("objective: X and W do not conform");
  if (check == OrthonormalityCheck::enforce && orthonormality_error(w) > 1e-8)
    throw PreconditionError("objective: W is not column-orthonormal");
  return 0.5 * (frobenius_norm_sq(x) - frobenius_norm_sq(matmul(x, w)));
}

/// 1/2 ||X - X W W^T||_F^2 for arbitrary W.
inline double reconstruction_objective(const Matrix& x, const Matrix& w) {
  if (x.cols() != w.rows())
    throw ShapeError("reconstruction_objective: X and W do not conform");
  const Matrix xw = matmul(x, w);
  return 0.5 * frobenius_norm_sq(subtract(x, matmul(xw, transpose(w))));
}

/// dJ/dW = -X^T X W.
inline Matrix gradient_J(const Matrix& x, const Matrix& w) {
  if (x.cols() != w.rows())
    throw ShapeError("gradient_J: X and W do not conform");
  return scaled(matmul_tn(x, matmul(x, w)), -1.0);
}

/// 100 * sum_{j<=r} d_j / sum_j d_j.
inline double reconstruction_rate(const Vector& d, std::size_t r) {
  if (r < 1 || r > d.size())
    throw PreconditionError("reconstruction_rate: r out of range");
  double total = 0.0;
  for (double v : d) {
    if (v < 0.0)
      throw PreconditionError("reconstruction_rate: negative singular value");
    total += v;
  }
  if (!(total > 0.0))
    throw PreconditionError(
        "reconstruction_rate: undefined for all-zero singular values");
  double kept = 0.0;
  for (std::size_t j = 0; j < r; ++j) kept += d[j];
  return 100.0 * kept / total;
}

/// sum_{j<=r} d_j u_j w_j^T.
inline Matrix low_rank_approx(const SvdResult& res, std::size_t r) {
  if (r < 1 || r > res.rank())
    throw PreconditionError("low_rank_approx: r out of range");
  Matrix out(res.U.rows(), res.W.rows());
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto row = out.row(i);
    for (std::size_t j = 0; j < r; ++j) {
      const double coef = res.d[j] * res.U(i, j);
      if (coef == 0.0) continue;
      for (std::size_t k = 0; k < out.cols(); ++k) row[k] += coef * res.W(k, j);
    }
  }
  return out;
}

/// Storage ratio of X against its rank-r factors: (m n) / (r (m + n + 1)).
inline double compression_ratio(std::size_t m, std::size_t n, std::size_t r) {
  if (r == 0) throw PreconditionError("compression_ratio: r must be >= 1");
  return static_cast<double>(m) * static_cast<double>(n) /
         (static_cast<double>(r) * static_cast<double>(m + n + 1));
}

}  // namespace psvd

#endif  // PSVD_SVD_HPP
