#ifndef PSVD_IO_HPP
#define PSVD_IO_HPP

// Matrix readers (CSV, MatrixMarket, embedded fixtures) and result writers.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include <json.hpp>

#include "psvd/analytics.hpp"
#include "psvd/error.hpp"
#include "psvd/fixtures.hpp"
#include "psvd/matrix.hpp"
#include "psvd/svd.hpp"

namespace psvd {

enum class SourceKind { csv, matrix_market, fixture };

struct MatrixSource {
  SourceKind kind = SourceKind::csv;
  std::string path_or_name;
  bool has_header = false;
  char delimiter = ',';
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

/// Parses a complete finite double; false on anything else.
inline bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size() && std::isfinite(out);
}

/// Splits one CSV record; double-quoted fields may contain the delimiter
/// and "" escapes.
inline std::vector<std::string> split_record(std::string_view line,
                                             char delimiter) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == delimiter) {
      cells.push_back(std::move(cell));
      cell.clear();
    } else {
      cell.push_back(c);
    }
  }
  cells.push_back(std::move(cell));
  return cells;
}

inline bool blank(std::string_view line) { return trim(line).empty(); }

inline void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace detail

/// Reads a dense matrix from CSV text. Blank lines are skipped; LF and CRLF
/// line endings are both accepted.
inline Matrix read_csv(std::istream& in, bool has_header = false,
                       char delimiter = ',') {
  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  bool header_pending = has_header;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (detail::blank(line)) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    const auto cells = detail::split_record(line, delimiter);
    if (rows == 0) {
      cols = cells.size();
    } else if (cells.size() != cols) {
      throw ParseError(line_no, 0,
                       "line " + std::to_string(line_no) + ": expected " +
                           std::to_string(cols) + " fields, found " +
                           std::to_string(cells.size()));
    }
    for (std::size_t j = 0; j < cells.size(); ++j) {
      double v = 0.0;
      if (!detail::parse_double(cells[j], v))
        throw ParseError(line_no, j + 1,
                         "line " + std::to_string(line_no) + ", column " +
                             std::to_string(j + 1) + ": '" + cells[j] +
                             "' is not a finite number");
      values.push_back(v);
    }
    ++rows;
  }
  if (rows == 0) throw ParseError(line_no, 0, "no data rows");
  return Matrix(rows, cols, std::move(values));
}

/// Reads `%%MatrixMarket matrix <array|coordinate> real general`.
/// Coordinate entries are 1-based and materialized dense; duplicates add.
inline Matrix read_matrix_market(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw FormatError("MatrixMarket: empty input");
  ++line_no;
  detail::strip_cr(line);

  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  auto lower = [](std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
  };
  if (tag != "%%MatrixMarket")
    throw FormatError("MatrixMarket: missing %%MatrixMarket banner");
  object = lower(object);
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (object != "matrix")
    throw FormatError("MatrixMarket: unsupported object '" + object + "'");
  if (format != "array" && format != "coordinate")
    throw FormatError("MatrixMarket: unsupported format '" + format + "'");
  if (field != "real")
    throw FormatError("MatrixMarket: unsupported field '" + field + "'");
  if (symmetry != "general")
    throw FormatError("MatrixMarket: unsupported symmetry '" + symmetry + "'");

  auto next_data_line = [&](std::string& out) {
    while (std::getline(in, out)) {
      ++line_no;
      detail::strip_cr(out);
      if (detail::blank(out) || out.front() == '%') continue;
      return true;
    }
    return false;
  };

  auto parse_fields = [&](const std::string& text, std::size_t expected) {
    std::istringstream ss(text);
    std::vector<std::string> tokens;
    for (std::string tok; ss >> tok;) tokens.push_back(tok);
    if (tokens.size() != expected)
      throw ParseError(line_no, 0,
                       "line " + std::to_string(line_no) + ": expected " +
                           std::to_string(expected) + " fields");
    return tokens;
  };

  auto parse_count = [&](const std::string& tok, std::size_t col) {
    double v = 0.0;
    if (!detail::parse_double(tok, v) || v < 0.0 || v != std::floor(v))
      throw ParseError(line_no, col,
                       "line " + std::to_string(line_no) + ": '" + tok +
                           "' is not a non-negative integer");
    return static_cast<std::size_t>(v);
  };

  auto parse_value = [&](const std::string& tok, std::size_t col) {
    double v = 0.0;
    if (!detail::parse_double(tok, v))
      throw ParseError(line_no, col,
                       "line " + std::to_string(line_no) + ": '" + tok +
                           "' is not a finite number");
    return v;
  };

  if (!next_data_line(line))
    throw ParseError(line_no, 0, "MatrixMarket: missing size line");
  const bool coordinate = format == "coordinate";
  const auto size = parse_fields(line, coordinate ? 3 : 2);
  const std::size_t rows = parse_count(size[0], 1);
  const std::size_t cols = parse_count(size[1], 2);
  if (rows == 0 || cols == 0)
    throw ParseError(line_no, 0, "MatrixMarket: empty dimension");

  Matrix m(rows, cols);
  if (coordinate) {
    const std::size_t nnz = parse_count(size[2], 3);
    for (std::size_t k = 0; k < nnz; ++k) {
      if (!next_data_line(line))
        throw ParseError(line_no, 0, "MatrixMarket: expected " +
                                         std::to_string(nnz) + " entries");
      const auto tok = parse_fields(line, 3);
      const std::size_t i = parse_count(tok[0], 1);
      const std::size_t j = parse_count(tok[1], 2);
      if (i < 1 || i > rows || j < 1 || j > cols)
        throw ParseError(line_no, 0,
                         "line " + std::to_string(line_no) +
                             ": index out of range");
      m(i - 1, j - 1) += parse_value(tok[2], 3);
    }
  } else {
    // Column-major order.
    for (std::size_t j = 0; j < cols; ++j)
      for (std::size_t i = 0; i < rows; ++i) {
        if (!next_data_line(line))
          throw ParseError(line_no, 0, "MatrixMarket: expected " +
                                           std::to_string(rows * cols) +
                                           " values");
        m(i, j) = parse_value(parse_fields(line, 1)[0], 1);
      }
  }
  if (!m.all_finite()) throw NumericError("MatrixMarket: non-finite entry");
  return m;
}

inline Matrix read_matrix(const MatrixSource& src) {
  if (src.kind == SourceKind::fixture) {
    auto m = fixtures::by_name(src.path_or_name);
    if (!m) throw PreconditionError("unknown fixture '" + src.path_or_name + "'");
    return *std::move(m);
  }
  std::ifstream in(src.path_or_name, std::ios::binary);
  if (!in) throw IoError("cannot open '" + src.path_or_name + "'");
  if (src.kind == SourceKind::matrix_market) return read_matrix_market(in);
  return read_csv(in, src.has_header, src.delimiter);
}

/// Picks MatrixMarket for *.mtx / *.mm paths and CSV otherwise.
inline MatrixSource source_for_path(const std::string& path,
                                    bool has_header = false,
                                    char delimiter = ',') {
  const auto ext = std::filesystem::path(path).extension().string();
  const SourceKind kind = (ext == ".mtx" || ext == ".mm")
                              ? SourceKind::matrix_market
                              : SourceKind::csv;
  return {kind, path, has_header, delimiter};
}

// ---------------------------------------------------------------------------
// Writers

namespace detail {

inline std::string format_g(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

inline void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

inline void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw IoError("cannot create directory '" + dir.string() + "'");
}

}  // namespace detail

/// Digits for matrix CSVs: enough for an exact double round trip.
inline constexpr int kMatrixDigits = 17;
/// Digits for singular value / eigenvalue listings.
inline constexpr int kValueDigits = 12;

inline void write_matrix_csv(std::ostream& out, const Matrix& m,
                             int digits = kMatrixDigits) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << detail::format_g(m(i, j), digits);
    }
    out << '\n';
  }
}

inline void write_matrix_csv(const std::filesystem::path& path, const Matrix& m,
                             int digits = kMatrixDigits) {
  auto out = detail::open_out(path);
  write_matrix_csv(out, m, digits);
  detail::finish(out, path);
}

inline void write_vector_csv(const std::filesystem::path& path, const Vector& v,
                             int digits = kValueDigits) {
  auto out = detail::open_out(path);
  for (double x : v) out << detail::format_g(x, digits) << '\n';
  detail::finish(out, path);
}

/// Scores with a leading label column: `label,PC1,...,PCr`.
inline void write_labeled_scores(const std::filesystem::path& path,
                                 const Matrix& scores,
                                 const std::vector<std::string>& labels) {
  if (labels.size() != scores.rows())
    throw ShapeError("write_labeled_scores: one label per row expected");
  auto out = detail::open_out(path);
  out << "label";
  for (std::size_t j = 0; j < scores.cols(); ++j) out << ",PC" << j + 1;
  out << '\n';
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    out << labels[i];
    for (std::size_t j = 0; j < scores.cols(); ++j)
      out << ',' << detail::format_g(scores(i, j), kMatrixDigits);
    out << '\n';
  }
  detail::finish(out, path);
}

/// Run settings echoed into report.json.
struct RunMeta {
  PsvdConfig cfg;
  double elapsed_ms = 0.0;
};

inline nlohmann::ordered_json report_json(const RunReport& report,
                                          const RunMeta& meta) {
  nlohmann::ordered_json j;
  j["iterations"] = report.iterations;
  j["final_delta"] = report.final_delta;
  j["converged"] = report.converged;
  j["numerical_rank"] = report.numerical_rank;
  j["seed"] = meta.cfg.seed;
  j["q"] = meta.cfg.q;
  j["eta"] = meta.cfg.eta;
  j["eps"] = meta.cfg.eps;
  j["elapsed_ms"] = meta.elapsed_ms;
  return j;
}

inline void write_report_json(const std::filesystem::path& path,
                              const RunReport& report, const RunMeta& meta) {
  auto out = detail::open_out(path);
  out << report_json(report, meta).dump(2) << '\n';
  detail::finish(out, path);
}

/// Writes d.csv, U.csv, W.csv and report.json into `dir` (created if
/// needed). Returns the files written.
inline std::vector<std::filesystem::path> write_result(
    const SvdResult& res, const std::filesystem::path& dir,
    const RunMeta& meta) {
  detail::ensure_dir(dir);
  std::vector<std::filesystem::path> files{dir / "d.csv", dir / "U.csv",
                                           dir / "W.csv", dir / "report.json"};
  write_vector_csv(files[0], res.d);
  write_matrix_csv(files[1], res.U);
  write_matrix_csv(files[2], res.W);
  write_report_json(files[3], res.report, meta);
  return files;
}

/// Writes eigenvalues.csv, explained.csv, axes.csv, scores.csv,
/// attribute_coords.csv (when any eigenvalue is nonzero) and report.json.
inline std::vector<std::filesystem::path> write_result(
    const PcaResult& res, const std::filesystem::path& dir,
    const RunMeta& meta) {
  detail::ensure_dir(dir);
  std::vector<std::filesystem::path> files;
  auto add = [&](const char* name) {
    files.push_back(dir / name);
    return files.back();
  };
  write_vector_csv(add("eigenvalues.csv"), res.eigenvalues);
  write_vector_csv(add("explained.csv"), res.explained);
  write_matrix_csv(add("axes.csv"), res.axes);
  write_matrix_csv(add("scores.csv"), res.scores);
  if (res.attribute_coords)
    write_matrix_csv(add("attribute_coords.csv"), *res.attribute_coords);
  write_report_json(add("report.json"), res.report, meta);
  return files;
}

}  // namespace psvd

#endif  // PSVD_IO_HPP
