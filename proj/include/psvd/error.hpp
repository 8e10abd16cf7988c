#ifndef PSVD_ERROR_HPP
#define PSVD_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace psvd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class NumericOverflowError : public NumericError {
 public:
  using NumericError::NumericError;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// Gram-Schmidt hit a column whose residual fell below the drop tolerance.
class RankDeficiencyError : public Error {
 public:
  RankDeficiencyError(std::size_t column, const std::string& what)
      : Error(what), column_(column) {}
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

/// A column with zero variance where a standard deviation is required.
class DegenerateColumnError : public Error {
 public:
  DegenerateColumnError(std::size_t column, const std::string& what)
      : Error(what), column_(column) {}
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

/// Malformed text input. Line and column are 1-based; 0 means unknown.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : Error(what), line_(line), column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace psvd

#endif  // PSVD_ERROR_HPP
