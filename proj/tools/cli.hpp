#ifndef PSVD_TOOLS_CLI_HPP
#define PSVD_TOOLS_CLI_HPP

// The `psvd` command-line front end. Kept in a header so the test suite can
// drive run_cli() in-process.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "psvd/psvd.hpp"

namespace psvd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNotConverged = 3;

namespace detail {

inline std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

struct SourceOptions {
  std::string input;
  std::string fixture;
  bool header = false;
  char delimiter = ',';
};

struct SolverOptions {
  std::size_t rank = 0;
  unsigned q = 2;
  double eta = 1.0;
  double tol = 1e-8;
  std::size_t itmax = 200;
  std::uint64_t seed = 42;
  bool prescale = false;
  std::string out;
  bool timing = false;

  PsvdConfig config() const {
    PsvdConfig cfg;
    cfg.rank = rank;
    cfg.q = q;
    cfg.eta = eta;
    cfg.eps = tol;
    cfg.itmax = itmax;
    cfg.seed = seed;
    cfg.prescale = prescale;
    return cfg;
  }
};

inline void add_source(CLI::App* app, SourceOptions& src) {
  auto* in = app->add_option("--input", src.input, "CSV or MatrixMarket (.mtx) file");
  auto* fx = app->add_option("--fixture", src.fixture, "Embedded matrix")
                 ->check(CLI::IsMember({"Xa", "Xb", "Xc", "iris", "digit"}));
  in->excludes(fx);
  fx->excludes(in);
  app->add_flag("--header", src.header, "CSV input has a header row");
  app->add_option("--delimiter", src.delimiter, "CSV field delimiter");
}

inline void add_solver(CLI::App* app, SolverOptions& opt, bool with_rank) {
  if (with_rank)
    app->add_option("--rank", opt.rank, "Number of singular triplets (default: all)");
  app->add_option("--q", opt.q, "Power of X^T X in the gain matrix")
      ->check(CLI::Range(1u, 4u));
  app->add_option("--eta", opt.eta, "Step parameter")->check(CLI::PositiveNumber);
  app->add_option("--tol", opt.tol, "Convergence tolerance")->check(CLI::PositiveNumber);
  app->add_option("--itmax", opt.itmax, "Maximum iterations")->check(CLI::PositiveNumber);
  app->add_option("--seed", opt.seed, "Seed of the random start");
  app->add_flag("--prescale", opt.prescale, "Divide X by max |x_ij| first");
  app->add_option("--out", opt.out, "Directory for result files");
  app->add_flag("--timing", opt.timing, "Record wall time in report.json");
}

inline Matrix load(const SourceOptions& src) {
  if (!src.fixture.empty())
    return read_matrix({SourceKind::fixture, src.fixture, false, ','});
  if (src.input.empty())
    throw PreconditionError("one of --input or --fixture is required");
  return read_matrix(source_for_path(src.input, src.header, src.delimiter));
}

class Stopwatch {
 public:
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline std::vector<double> parse_list(const std::string& text,
                                      const char* flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    double v = 0.0;
    if (!psvd::detail::parse_double(item, v))
      throw PreconditionError(std::string(flag) + ": '" + item +
                              "' is not a number");
    out.push_back(v);
  }
  if (out.empty()) throw PreconditionError(std::string(flag) + ": empty list");
  return out;
}

inline std::vector<std::string> read_labels(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::vector<std::string> labels;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (header) {
      header = false;
      continue;
    }
    if (!line.empty()) labels.push_back(line);
  }
  return labels;
}

}  // namespace detail

/// Runs the CLI. Exit codes: 0 success, 2 input/usage error,
/// 3 non-convergence (results are still printed and written).
inline int run_cli(int argc, const char* const* argv, std::ostream& out,
                   std::ostream& err) {
  using namespace detail;

  CLI::App app{"Truncated SVD by gain-matrix subspace iteration"};
  app.require_subcommand(1);

  SourceOptions src;
  SolverOptions opt;

  auto* svd_cmd = app.add_subcommand("svd", "Singular values and vectors");
  add_source(svd_cmd, src);
  add_solver(svd_cmd, opt, true);

  auto* pca_cmd = app.add_subcommand("pca", "Principal component analysis");
  add_source(pca_cmd, src);
  add_solver(pca_cmd, opt, false);
  std::size_t components = 0;
  std::string mode = "correlation";
  bool plot_data = false;
  std::string labels_path;
  pca_cmd->add_option("--components", components, "Number of components (default: all)");
  pca_cmd->add_option("--mode", mode, "covariance or correlation")
      ->check(CLI::IsMember({"covariance", "correlation"}));
  pca_cmd->add_flag("--plot-data", plot_data, "Emit labeled scores for plotting");
  pca_cmd->add_option("--labels", labels_path, "One label per row, after a header line");

  auto* rec_cmd = app.add_subcommand("reconstruct", "Rank-r approximation");
  add_source(rec_cmd, src);
  add_solver(rec_cmd, opt, false);
  std::size_t rec_rank = 0;
  rec_cmd->add_option("--rank", rec_rank, "Rank of the approximation")->required();

  auto* bench_cmd =
      app.add_subcommand("bench-convergence", "Iterations over (q, eta) grids");
  add_source(bench_cmd, src);
  add_solver(bench_cmd, opt, true);
  std::string q_list = "2,3,4";
  std::string eta_list = "0.01,0.1,1,10,100";
  std::size_t repeats = 10;
  bench_cmd->add_option("--q-list", q_list, "Comma-separated q values");
  bench_cmd->add_option("--eta-list", eta_list, "Comma-separated eta values");
  bench_cmd->add_option("--repeats", repeats, "Seeds per cell")->check(CLI::PositiveNumber);

  auto* power_cmd = app.add_subcommand(
      "power-baseline", "Eigenpairs of X^T X by power method and deflation");
  add_source(power_cmd, src);
  std::size_t power_itmax = 10000;
  double power_tol = 1e-10;
  std::uint64_t power_seed = 42;
  power_cmd->add_option("--tol", power_tol, "Vector step tolerance")
      ->check(CLI::PositiveNumber);
  power_cmd->add_option("--itmax", power_itmax, "Maximum iterations per pair")
      ->check(CLI::PositiveNumber);
  power_cmd->add_option("--seed", power_seed, "Seed of the start vectors");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kExitUsage;
  }

  try {
    const Stopwatch clock;
    const Matrix x = load(src);
    PsvdConfig cfg = opt.config();
    auto meta = [&] {
      return RunMeta{cfg, opt.timing ? clock.elapsed_ms() : 0.0};
    };

    if (svd_cmd->parsed()) {
      const SvdResult res = psvd(x, cfg);
      for (double d : res.d) out << fmt("%.8f", d) << "\n";
      if (!opt.out.empty()) write_result(res, opt.out, meta());
      if (!res.report.converged) {
        err << "warning: no convergence after " << res.report.iterations
            << " iterations (delta " << res.report.final_delta << ")\n";
        return kExitNotConverged;
      }
      return kExitOk;
    }

    if (pca_cmd->parsed()) {
      const std::size_t r = components == 0 ? x.cols() : components;
      const PcaMode pm =
          mode == "covariance" ? PcaMode::covariance : PcaMode::correlation;
      const PcaResult res = pca(x, r, pm, cfg);

      std::vector<std::string> labels;
      if (plot_data) {
        if (!labels_path.empty()) {
          labels = read_labels(labels_path);
        } else if (src.fixture == "iris") {
          labels = fixtures::iris_labels();
        } else {
          for (std::size_t i = 0; i < x.rows(); ++i)
            labels.push_back(std::to_string(i + 1));
        }
        if (labels.size() != x.rows())
          throw PreconditionError("--labels: " + std::to_string(labels.size()) +
                                  " labels for " + std::to_string(x.rows()) +
                                  " rows");
      }

      if (plot_data && opt.out.empty()) {
        out << "label";
        for (std::size_t j = 0; j < res.scores.cols(); ++j) out << ",PC" << j + 1;
        out << "\n";
        for (std::size_t i = 0; i < res.scores.rows(); ++i) {
          out << labels[i];
          for (std::size_t j = 0; j < res.scores.cols(); ++j)
            out << "," << fmt("%.17g", res.scores(i, j));
          out << "\n";
        }
      } else {
        out << "component,eigenvalue,explained_percent\n";
        for (std::size_t j = 0; j < res.eigenvalues.size(); ++j)
          out << "PC" << j + 1 << "," << fmt("%.8f", res.eigenvalues[j]) << ","
              << fmt("%.6f", res.explained[j]) << "\n";
      }
      if (!opt.out.empty()) {
        write_result(res, opt.out, meta());
        if (plot_data)
          write_labeled_scores(std::filesystem::path(opt.out) / "plot_data.csv",
                               res.scores, labels);
      }
      return res.report.converged ? kExitOk : kExitNotConverged;
    }

    if (rec_cmd->parsed()) {
      const std::size_t full = std::min(x.rows(), x.cols());
      if (rec_rank < 1 || rec_rank > full)
        throw PreconditionError("--rank must be in [1, " + std::to_string(full) + "]");
      cfg.rank = 0;
      const SvdResult res = psvd(x, cfg);
      const Matrix xr = low_rank_approx(res, rec_rank);
      const double rate = reconstruction_rate(res.d, rec_rank);
      const double sq_error = frobenius_norm_sq(subtract(x, xr));
      const double ratio = compression_ratio(x.rows(), x.cols(), rec_rank);
      if (opt.out.empty()) {
        write_matrix_csv(out, xr);
      } else {
        psvd::detail::ensure_dir(opt.out);
        const std::filesystem::path dir = opt.out;
        write_matrix_csv(dir / "Xr.csv", xr);
        write_report_json(dir / "report.json", res.report, meta());
      }
      out << "rank=" << rec_rank << " rate=" << fmt("%.6f", rate)
          << "% sq_error=" << fmt("%.10g", sq_error)
          << " compression=" << fmt("%.6f", ratio) << "\n";
      return res.report.converged ? kExitOk : kExitNotConverged;
    }

    if (bench_cmd->parsed()) {
      const auto qs = parse_list(q_list, "--q-list");
      const auto etas = parse_list(eta_list, "--eta-list");
      struct Cell {
        double q, eta, median;
        std::size_t converged;
      };
      std::vector<Cell> cells;
      for (double qv : qs) {
        if (qv < 1 || qv > 4 || qv != static_cast<unsigned>(qv))
          throw PreconditionError("--q-list: q must be one of 1, 2, 3, 4");
        for (double ev : etas) {
          std::vector<double> counts;
          std::size_t ok = 0;
          for (std::size_t k = 0; k < repeats; ++k) {
            PsvdConfig c = cfg;
            c.q = static_cast<unsigned>(qv);
            c.eta = ev;
            c.seed = cfg.seed + k;
            try {
              const SvdResult res = psvd(x, c);
              if (res.report.converged) {
                ++ok;
                counts.push_back(static_cast<double>(res.report.iterations));
              } else {
                counts.push_back(static_cast<double>(c.itmax + 1));
              }
            } catch (const NumericOverflowError&) {
              counts.push_back(static_cast<double>(c.itmax + 1));
            }
          }
          cells.push_back({qv, ev, median(counts), ok});
        }
      }

      out << "q\\eta";
      for (double ev : etas) out << "\t" << fmt("%g", ev);
      out << "\n";
      std::size_t idx = 0;
      for (double qv : qs) {
        out << fmt("%g", qv);
        for (std::size_t e = 0; e < etas.size(); ++e)
          out << "\t" << fmt("%g", cells[idx++].median);
        out << "\n";
      }
      if (!opt.out.empty()) {
        psvd::detail::ensure_dir(opt.out);
        const auto path = std::filesystem::path(opt.out) / "bench.csv";
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot write '" + path.string() + "'");
        f << "q,eta,median_iterations,converged_runs,repeats\n";
        for (const Cell& c : cells)
          f << fmt("%g", c.q) << "," << fmt("%g", c.eta) << ","
            << fmt("%g", c.median) << "," << c.converged << "," << repeats << "\n";
        if (!f) throw IoError("write failed for '" + path.string() + "'");
      }
      return kExitOk;
    }

    if (power_cmd->parsed()) {
      const auto pairs =
          power_deflation_spectrum(gram_matrix(x), power_tol, power_itmax, power_seed);
      bool all = true;
      for (const PowerResult& p : pairs) {
        out << fmt("%.8f", std::sqrt(std::max(p.pair.value, 0.0))) << "\t"
            << p.iterations;
        if (!p.converged) {
          out << "\tnot-converged";
          all = false;
        }
        out << "\n";
      }
      return all ? kExitOk : kExitNotConverged;
    }
  } catch (const psvd::Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace psvd::cli

#endif  // PSVD_TOOLS_CLI_HPP
