#ifndef PSVD_MATRIX_HPP
#define PSVD_MATRIX_HPP

// Dense row-major storage and the exact kernels the solvers build on.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "psvd/error.hpp"

namespace psvd {

namespace detail {

inline bool all_finite(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(),
                     [](double v) { return std::isfinite(v); });
}

inline std::string shape_str(std::size_t rows, std::size_t cols) {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

}  // namespace detail

/// A dense real vector of length >= 1.
class Vector {
 public:
  explicit Vector(std::size_t len) : data_(len, 0.0) {
    if (len == 0) throw ShapeError("Vector: length must be >= 1");
  }

  explicit Vector(std::vector<double> values) : data_(std::move(values)) {
    if (data_.empty()) throw ShapeError("Vector: length must be >= 1");
    if (!detail::all_finite(data_))
      throw NumericError("Vector: entries must be finite");
  }

  Vector(std::initializer_list<double> values)
      : Vector(std::vector<double>(values)) {}

  std::size_t size() const noexcept { return data_.size(); }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  auto begin() noexcept { return data_.begin(); }
  auto end() noexcept { return data_.end(); }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  std::vector<double> data_;
};

/// A dense m x n real matrix, row-major, m, n >= 1.
///
/// Constructors reject empty shapes and non-finite entries. The mutable
/// element accessor exists for building results in place; kernels below
/// never mutate their inputs.
class Matrix {
 public:
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {
    check_shape();
  }

  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    check_shape();
    if (data_.size() != rows_ * cols_)
      throw ShapeError("Matrix: data length " + std::to_string(data_.size()) +
                       " does not match shape " +
                       detail::shape_str(rows_, cols_));
    if (!detail::all_finite(data_))
      throw NumericError("Matrix: entries must be finite");
  }

  Matrix(std::initializer_list<std::initializer_list<double>> rows)
      : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
    check_shape();
    data_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
      if (row.size() != cols_) throw ShapeError("Matrix: ragged initializer");
      data_.insert(data_.end(), row.begin(), row.end());
    }
    if (!detail::all_finite(data_))
      throw NumericError("Matrix: entries must be finite");
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static Matrix diagonal(std::span<const double> diag) {
    Matrix m(diag.size(), diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return m;
  }

  /// rows x cols matrix with `diag` on its leading diagonal.
  static Matrix diagonal(std::size_t rows, std::size_t cols,
                         std::span<const double> diag) {
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < diag.size() && i < rows && i < cols; ++i)
      m(i, i) = diag[i];
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  std::span<double> row(std::size_t i) {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  Vector column(std::size_t j) const {
    Vector v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
  }

  void set_column(std::size_t j, std::span<const double> v) {
    if (v.size() != rows_) throw ShapeError("set_column: length mismatch");
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
  }

  /// First `count` columns.
  Matrix leading_columns(std::size_t count) const {
    if (count == 0 || count > cols_)
      throw ShapeError("leading_columns: count out of range");
    Matrix out(rows_, count);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < count; ++j) out(i, j) = (*this)(i, j);
    return out;
  }

  bool all_finite() const { return detail::all_finite(data_); }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  void check_shape() const {
    if (rows_ == 0 || cols_ == 0)
      throw ShapeError("Matrix: shape " + detail::shape_str(rows_, cols_) +
                       " has an empty dimension");
  }

  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

inline Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

inline Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows())
    throw ShapeError("matmul: cannot multiply " +
                     detail::shape_str(a.rows(), a.cols()) + " by " +
                     detail::shape_str(b.rows(), b.cols()));
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto out = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      auto brow = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) out[j] += aik * brow[j];
    }
  }
  return c;
}

/// A^T * B without materializing the transpose.
inline Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows())
    throw ShapeError("matmul_tn: row counts differ (" +
                     detail::shape_str(a.rows(), a.cols()) + ", " +
                     detail::shape_str(b.rows(), b.cols()) + ")");
  Matrix c(a.cols(), b.cols());
  for (std::size_t k = 0; k < a.rows(); ++k) {
    auto arow = a.row(k);
    auto brow = b.row(k);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double aki = arow[i];
      if (aki == 0.0) continue;
      auto out = c.row(i);
      for (std::size_t j = 0; j < b.cols(); ++j) out[j] += aki * brow[j];
    }
  }
  return c;
}

inline Vector matvec(const Matrix& a, const Vector& x) {
  if (a.cols() != x.size()) throw ShapeError("matvec: length mismatch");
  Vector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    auto arow = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) s += arow[j] * x[j];
    y[i] = s;
  }
  return y;
}

inline double dot(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ShapeError("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

inline double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

inline Matrix add(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError("add: shape mismatch");
  Matrix c = a;
  auto cv = c.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < cv.size(); ++i) cv[i] += bv[i];
  return c;
}

inline Matrix subtract(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError("subtract: shape mismatch");
  Matrix c = a;
  auto cv = c.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < cv.size(); ++i) cv[i] -= bv[i];
  return c;
}

inline Matrix scaled(const Matrix& a, double s) {
  Matrix c = a;
  for (double& v : c.values()) v *= s;
  return c;
}

inline double max_abs(const Matrix& a) {
  double m = 0.0;
  for (double v : a.values()) m = std::max(m, std::abs(v));
  return m;
}

/// Largest |a_ij - b_ij|.
inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError("max_abs_diff: shape mismatch");
  double m = 0.0;
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i)
    m = std::max(m, std::abs(av[i] - bv[i]));
  return m;
}

inline double trace(const Matrix& a) {
  if (!a.is_square()) throw ShapeError("trace: matrix is not square");
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) s += a(i, i);
  return s;
}

inline double frobenius_norm_sq(const Matrix& x) {
  double s = 0.0;
  for (double v : x.values()) s += v * v;
  return s;
}

/// X^T X. Only the upper triangle is accumulated; the lower is mirrored so
/// the result is exactly symmetric.
inline Matrix gram_matrix(const Matrix& x) {
  const std::size_t n = x.cols();
  Matrix s(n, n);
  for (std::size_t k = 0; k < x.rows(); ++k) {
    auto xr = x.row(k);
    for (std::size_t i = 0; i < n; ++i) {
      const double xi = xr[i];
      if (xi == 0.0) continue;
      auto out = s.row(i);
      for (std::size_t j = i; j < n; ++j) out[j] += xi * xr[j];
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) s(i, j) = s(j, i);
  return s;
}

/// (M + M^T) / 2 in place.
inline void symmetrize(Matrix& m) {
  if (!m.is_square()) throw ShapeError("symmetrize: matrix is not square");
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j) {
      const double avg = 0.5 * (m(i, j) + m(j, i));
      m(i, j) = avg;
      m(j, i) = avg;
    }
}

/// Largest |s_ij - s_ji|.
inline double asymmetry(const Matrix& s) {
  if (!s.is_square()) throw ShapeError("asymmetry: matrix is not square");
  double m = 0.0;
  for (std::size_t i = 0; i < s.rows(); ++i)
    for (std::size_t j = i + 1; j < s.cols(); ++j)
      m = std::max(m, std::abs(s(i, j) - s(j, i)));
  return m;
}

/// S^q for symmetric S, re-symmetrizing after every product.
inline Matrix sym_matrix_power(const Matrix& s, std::size_t q) {
  if (!s.is_square())
    throw ShapeError("sym_matrix_power: matrix is " +
                     detail::shape_str(s.rows(), s.cols()) +
                     ", expected square");
  if (q == 0) throw PreconditionError("sym_matrix_power: q must be >= 1");
  Matrix p = s;
  for (std::size_t k = 1; k < q; ++k) {
    p = matmul(p, s);
    symmetrize(p);
  }
  return p;
}

}  // namespace psvd

#endif  // PSVD_MATRIX_HPP
