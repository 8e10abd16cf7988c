// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "cli_run.hpp"
#include "psvd/psvd.hpp"

using psvd::Matrix;
using psvd::PsvdConfig;
using psvd::Vector;
namespace fx = psvd::fixtures;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

constexpr std::size_t kSeeds = 10;
constexpr std::uint64_t kFirstSeed = 42;

// Median iteration count over kSeeds seeds; non-converged runs count itmax + 1.
double median_iterations(const Matrix& x, unsigned q, double eta,
                         std::size_t* converged = nullptr) {
  std::vector<double> counts;
  std::size_t ok = 0;
  for (std::size_t k = 0; k < kSeeds; ++k) {
    PsvdConfig c;
    c.q = q;
    c.eta = eta;
    c.seed = kFirstSeed + k;
    const auto r = psvd::psvd(x, c);
    if (r.report.converged) ++ok;
    counts.push_back(r.report.converged ? static_cast<double>(r.report.iterations)
                                        : static_cast<double>(c.itmax + 1));
  }
  if (converged) *converged = ok;
  std::sort(counts.begin(), counts.end());
  const std::size_t n = counts.size();
  return n % 2 ? counts[n / 2] : 0.5 * (counts[n / 2 - 1] + counts[n / 2]);
}

struct Named {
  const char* name;
  Matrix x;
};

std::vector<Named> all_fixtures() {
  return {{"Xa", fx::xa()}, {"Xb", fx::xb()}, {"Xc", fx::xc()}, {"iris", fx::iris()}};
}

// Tighter stopping rule for the oracle-level comparisons (criteria 4, 7).
PsvdConfig tight() {
  PsvdConfig c;
  c.eps = 1e-24;
  c.itmax = 10000;
  return c;
}

Check criterion1() {
  Check c;
  const std::vector<std::vector<double>> expected = {
      {2.80193774, 1.44504187, 0.24697960},
      {26.02508484, 9.31733797, 3.29881377, 0.0},
      {35.32704347, 20.0, 19.59591794, 0.0, 0.0},
      {95.95991387, 17.76103366, 3.46093093, 1.88482630}};
  const auto t0 = std::chrono::steady_clock::now();
  const auto fixtures = all_fixtures();
  for (std::size_t f = 0; f < fixtures.size(); ++f) {
    const auto r = psvd::psvd(fixtures[f].x);
    const auto& e = expected[f];
    c.require(r.d.size() == e.size(), std::string(fixtures[f].name) + " rank");
    for (std::size_t j = 0; j < e.size() && j < r.d.size(); ++j) {
      const double tol = e[j] == 0.0 ? 1e-8 : 1e-6;
      c.require(std::abs(r.d[j] - e[j]) <= tol,
                std::string(fixtures[f].name) + " d" + std::to_string(j + 1) + "=" +
                    num(r.d[j]));
    }
  }
  const double secs = seconds_since(t0);
  c.require(secs < 1.0, "runtime " + num(secs) + " s");
  if (c.ok) c.detail = "all fixtures within 1e-6, " + num(secs) + " s";
  return c;
}

Check criterion2() {
  Check c;
  struct Row {
    const char* name;
    Matrix x;
    double reference;  // published iteration count
  };
  const std::vector<Row> rows = {
      {"Xa", fx::xa(), 11}, {"Xb", fx::xb(), 6}, {"iris", fx::iris(), 10}};
  std::string summary;
  for (const auto& row : rows) {
    std::size_t ok = 0;
    const double med = median_iterations(row.x, 2, 1.0, &ok);
    summary += std::string(row.name) + "=" + num(med) + " ";
    c.require(ok == kSeeds, std::string(row.name) + " converged " +
                                std::to_string(ok) + "/10");
    c.require(med <= 3 * row.reference, std::string(row.name) + " median " + num(med) +
                                        " > 3x" + num(row.reference));
  }
  std::size_t ok_c = 0;
  const double med_c = median_iterations(fx::xc(), 2, 1.0, &ok_c);
  summary += "Xc=" + num(med_c) + " ";
  c.require(med_c <= 200, "Xc q=2 median " + num(med_c) + " > 200");
  c.require(ok_c * 2 > kSeeds, "Xc q=2 converged " + std::to_string(ok_c) + "/10");

  std::size_t ok_steep = 0;
  const double med_steep = median_iterations(fx::xc(), 4, 10.0, &ok_steep);
  summary += "Xc(q=4,eta=10)=" + num(med_steep);
  c.require(med_steep > 200,
            "Xc q=4 eta=10 converged in " + std::to_string(ok_steep) +
                "/10 seeds (median " + num(med_steep) + "), expected no convergence");
  if (c.ok) c.detail = "medians " + summary;
  return c;
}

Check criterion3() {
  Check c;
  const double a001 = median_iterations(fx::xa(), 2, 0.01);
  const double a01 = median_iterations(fx::xa(), 2, 0.1);
  const double a1 = median_iterations(fx::xa(), 2, 1.0);
  c.require(a001 > a01 && a01 > a1,
            "Xa medians " + num(a001) + ", " + num(a01) + ", " + num(a1));
  std::vector<double> xc;
  for (double eta : {0.1, 1.0, 10.0}) xc.push_back(median_iterations(fx::xc(), 2, eta));
  const auto [lo, hi] = std::minmax_element(xc.begin(), xc.end());
  c.require(*hi - *lo <= 2, "Xc medians " + num(xc[0]) + ", " + num(xc[1]) + ", " +
                                num(xc[2]));
  if (c.ok)
    c.detail = "Xa " + num(a001) + " > " + num(a01) + " > " + num(a1) + "; Xc " +
               num(xc[0]) + "/" + num(xc[1]) + "/" + num(xc[2]);
  return c;
}

Check criterion4() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> rows(2, 30), cols(1, 10);
  std::size_t vectors_checked = 0;
  for (std::uint64_t k = 0; k < 50; ++k) {
    const std::size_t m = rows(rng), n = cols(rng);
    const Matrix x = psvd::random_normal_matrix(m, n, 1000 + k);
    PsvdConfig cfg = tight();
    cfg.seed = k;
    const auto a = psvd::psvd(x, cfg);
    const auto o = psvd::oracle_svd(x);
    const std::string tag = "matrix " + std::to_string(k) + " (" + std::to_string(m) +
                            "x" + std::to_string(n) + ")";
    // the oracle works on the n x n Gram matrix; psvd returns min(m, n) triplets
    const std::size_t k_cmp = std::min(m, n);
    if (a.rank() != k_cmp) {
      c.require(false, tag + " rank");
      continue;
    }
    const double threshold = o.report.zero_threshold;
    const double d1 = o.d[0];
    for (std::size_t j = 0; j < k_cmp; ++j) {
      if (o.d[j] <= threshold) continue;
      c.require(std::abs(a.d[j] - o.d[j]) <= 1e-8 * o.d[j],
                tag + " d" + std::to_string(j + 1) + " " + num(a.d[j]) + " vs " +
                    num(o.d[j]));
      // A singular vector is determined only when isolated from both neighbours.
      const bool gap_below = j + 1 == o.rank() || o.d[j] - o.d[j + 1] > 1e-3 * d1;
      const bool gap_above = j == 0 || o.d[j - 1] - o.d[j] > 1e-3 * d1;
      if (!(gap_below && gap_above)) continue;
      ++vectors_checked;
      double same = 0.0, flipped = 0.0;
      for (std::size_t i = 0; i < a.W.rows(); ++i) {
        same = std::max(same, std::abs(a.W(i, j) - o.W(i, j)));
        flipped = std::max(flipped, std::abs(a.W(i, j) + o.W(i, j)));
      }
      c.require(std::min(same, flipped) <= 1e-6,
                tag + " w" + std::to_string(j + 1) + " off by " +
                    num(std::min(same, flipped)));
    }
  }
  const double secs = seconds_since(t0);
  c.require(secs < 10.0, "runtime " + num(secs) + " s");
  if (c.ok)
    c.detail = "50 matrices, " + std::to_string(vectors_checked) +
               " vectors compared, " + num(secs) + " s";
  return c;
}

Check criterion5() {
  Check c;
  std::size_t runs = 0;
  auto check_run = [&](const std::string& tag, const Matrix& x, const PsvdConfig& cfg) {
    const auto r = psvd::psvd(x, cfg);
    if (!r.report.converged) return;
    ++runs;
    const double orth = psvd::orthonormality_error(r.W);
    c.require(orth <= 1e-10, tag + " orthonormality " + num(orth));
    if (r.W.rows() != x.cols()) return;
    const double total = psvd::frobenius_norm_sq(x);
    for (std::size_t k = 1; k < r.rank(); ++k) {
      double tail = 0.0;
      for (std::size_t j = k; j < r.rank(); ++j) tail += r.d[j] * r.d[j];
      const Matrix wk = r.W.leading_columns(k);
      const double err =
          psvd::frobenius_norm_sq(psvd::subtract(x, psvd::matmul(psvd::matmul(x, wk),
                                                                  psvd::transpose(wk))));
      // zero tails compare against the rounding floor of ||X||^2
      const double scale = std::max(tail, 1e-10 * total);
      c.require(std::abs(err - tail) <= 1e-6 * scale,
                tag + " rank-" + std::to_string(k) + " error " + num(err) + " vs " +
                    num(tail));
    }
  };
  for (const auto& f : all_fixtures()) check_run(f.name, f.x, PsvdConfig{});
  for (std::uint64_t k = 0; k < 20; ++k)
    check_run("random " + std::to_string(k), psvd::random_normal_matrix(15, 6, 500 + k),
              PsvdConfig{});

  for (const auto& f : all_fixtures()) {
    const auto es = psvd::jacobi_eigen_sym(psvd::gram_matrix(f.x));
    // q <= 2: beyond that ||G|| reaches 1e13..1e17 and any dense eigensolver's
    // absolute error eps_mach ||G|| swamps the eigenvalues near 1.
    for (unsigned q = 1; q <= 2; ++q) {
      for (double eta : {0.1, 1.0, 10.0}) {
        const auto g = psvd::build_gain(f.x, eta, q, false);
        const auto eg = psvd::jacobi_eigen_sym(g.gain);
        for (std::size_t j = 0; j < es.values.size(); ++j) {
          const double lam = std::pow(std::max(es.values[j], 0.0), q);
          const double gamma = eta * lam + 1.0;
          c.require(std::abs(eg.values[j] - gamma) <= 1e-9 * gamma,
                    std::string(f.name) + " gain eigenvalue q=" + std::to_string(q) +
                        " " + num(eg.values[j]) + " vs " + num(gamma));
        }
      }
    }
    const double l1 = es.values[0];
    for (double lj : es.values) {
      const double ratio = std::max(lj, 0.0) / l1;
      for (unsigned q = 1; q <= 4; ++q)
        c.require(std::pow(ratio, q) <= ratio * (1 + 1e-15),
                  std::string(f.name) + " decay");
    }
  }
  if (c.ok) c.detail = std::to_string(runs) + " converged runs; shift and decay hold";
  return c;
}

Check criterion6() {
  Check c;
  const double h = 1e-6;
  double worst = 0.0;
  for (std::uint64_t k = 0; k < 10; ++k) {
    const Matrix x = psvd::random_normal_matrix(10, 5, 700 + k);
    const Matrix w = psvd::random_normal_matrix(5, 3, 800 + k);
    const Matrix g = psvd::gradient_J(x, w);
    const auto skip = psvd::OrthonormalityCheck::skip;
    for (std::size_t i = 0; i < w.rows(); ++i)
      for (std::size_t j = 0; j < w.cols(); ++j) {
        Matrix wp = w, wm = w;
        wp(i, j) += h;
        wm(i, j) -= h;
        const double fd =
            (psvd::objective(x, wp, skip) - psvd::objective(x, wm, skip)) / (2 * h);
        const double rel = std::abs(g(i, j) - fd) / std::max(std::abs(fd), 1e-12);
        worst = std::max(worst, rel);
      }
  }
  c.require(worst <= 1e-5, "worst relative error " + num(worst));
  if (c.ok) c.detail = "worst relative error " + num(worst);
  return c;
}

Check criterion7() {
  Check c;
  for (const auto& f : all_fixtures()) {
    const auto o = psvd::oracle_svd(f.x);
    const double total = psvd::frobenius_norm_sq(f.x);
    for (std::size_t r = 1; r < o.rank(); ++r) {
      PsvdConfig cfg = tight();
      cfg.rank = r;
      const auto res = psvd::psvd(f.x, cfg);
      double tail = 0.0;
      for (std::size_t j = r; j < o.rank(); ++j) tail += o.d[j] * o.d[j];
      const double target = 0.5 * tail;
      const double got = psvd::objective(f.x, res.W);
      const double tol = target > 0.0 ? 1e-8 * target : 1e-8 * total;
      c.require(std::abs(got - target) <= tol,
                std::string(f.name) + " r=" + std::to_string(r) + " J=" + num(got) +
                    " vs " + num(target));
    }
  }
  const Matrix x = fx::xa();
  for (std::size_t r : {1u, 2u}) {
    PsvdConfig cfg = tight();
    cfg.rank = r;
    const double j_svd = psvd::objective(x, psvd::psvd(x, cfg).W);
    const auto ae = psvd::train_linear_ae(x, r, 0.01, 5000, 42);
    const double j_ae = psvd::reconstruction_objective(x, ae.weights);
    c.require(j_svd <= j_ae + 1e-6, "Xa r=" + std::to_string(r) + " J_svd " +
                                        num(j_svd) + " > J_ae " + num(j_ae));
  }
  if (c.ok) c.detail = "J = half tail on all fixtures; J_svd <= J_ae on Xa r=1,2";
  return c;
}

Check criterion8() {
  Check c;
  const Matrix x = fx::iris();
  const auto p = psvd::pca(x, 4, psvd::PcaMode::covariance);
  const Matrix cov = psvd::scaled(psvd::gram_matrix(psvd::center(x).data), 1.0 / 150.0);
  const auto e = psvd::jacobi_eigen_sym(cov);
  double total = 0.0;
  for (double v : e.values) total += v;
  const double oracle_pc1 = 100.0 * e.values[0] / total;
  c.require(oracle_pc1 >= 91.5 && oracle_pc1 <= 93.5, "oracle PC1 " + num(oracle_pc1));
  c.require(p.explained[0] >= 91.5 && p.explained[0] <= 93.5,
            "psvd PC1 " + num(p.explained[0]));
  c.require(std::abs(p.explained[0] - oracle_pc1) <= 1e-6,
            "psvd PC1 " + num(p.explained[0]) + " vs oracle " + num(oracle_pc1));
  double sum = 0.0;
  for (double v : p.explained) sum += v;
  c.require(std::abs(sum - 100.0) <= 1e-9, "explained sum " + num(sum));
  if (c.ok) c.detail = "PC1 " + num(p.explained[0]) + "%, sum " + num(sum);
  return c;
}

double reported_rate(const std::string& out) {
  const auto pos = out.find("rate=");
  if (pos == std::string::npos) return std::nan("");
  return std::stod(out.substr(pos + 5));
}

Check criterion9() {
  Check c;
  const auto b = psvd::testing::run({"reconstruct", "--fixture", "Xb", "--rank", "3"});
  const double rb = reported_rate(b.out);
  c.require(b.code == 0, "Xb exit " + std::to_string(b.code));
  c.require(std::abs(rb - 100.0) <= 1e-9, "Xb rate " + num(rb));
  const auto a = psvd::testing::run({"reconstruct", "--fixture", "Xa", "--rank", "1"});
  const double ra = reported_rate(a.out);
  c.require(a.code == 0, "Xa exit " + std::to_string(a.code));
  c.require(std::abs(ra - 62.349) <= 1e-3, "Xa rate " + num(ra));
  if (c.ok) c.detail = "Xb " + num(rb) + "%, Xa " + num(ra) + "%";
  return c;
}

Check criterion10() {
  Check c;
  using psvd::testing::run;
  using psvd::testing::scratch_dir;
  using psvd::testing::slurp;
  using psvd::testing::spit;

  const auto a = scratch_dir("acc_det_a");
  const auto b = scratch_dir("acc_det_b");
  for (const char* fixture : {"Xa", "Xb", "Xc", "iris"}) {
    const auto ra = run({"svd", "--fixture", fixture, "--out", a.string()});
    const auto rb = run({"svd", "--fixture", fixture, "--out", b.string()});
    c.require(ra.out == rb.out, std::string(fixture) + " stdout differs");
    for (const char* f : {"d.csv", "U.csv", "W.csv", "report.json"})
      c.require(slurp(a / f) == slurp(b / f), std::string(fixture) + " " + f + " differs");
  }

  const auto dir = scratch_dir("acc_inputs");
  spit(dir / "zero.csv", "0,0,0\n0,0,0\n0,0,0\n0,0,0\n");
  const auto z = run({"svd", "--input", (dir / "zero.csv").string()});
  c.require(z.code == 0 && z.out == "0.00000000\n0.00000000\n0.00000000\n",
            "zero matrix exit " + std::to_string(z.code));

  const auto xb = psvd::psvd(fx::xb());
  c.require(xb.d[3] == 0.0 && xb.report.numerical_rank == 3, "Xb null singular value");
  const auto xc = psvd::psvd(fx::xc());
  c.require(xc.report.numerical_rank == 3, "Xc numerical rank");

  const auto wide = psvd::psvd(psvd::transpose(fx::xb()));
  c.require(wide.rank() == 4 && std::abs(wide.d[0] - 26.02508484) <= 1e-6 &&
                wide.d[3] == 0.0,
            "m < n spectrum");
  spit(dir / "wide.csv", "1,2,3,4,5\n5,4,3,2,1\n");
  c.require(run({"svd", "--input", (dir / "wide.csv").string()}).code == 0, "m < n CLI");

  spit(dir / "ragged.csv", "1,2,3\n4,5,6\n7,8\n");
  const auto rg = run({"svd", "--input", (dir / "ragged.csv").string()});
  c.require(rg.code == 2 && rg.err.find("line 3") != std::string::npos,
            "ragged CSV exit " + std::to_string(rg.code));
  if (c.ok) c.detail = "byte-identical reruns; zero, rank-deficient, wide and ragged inputs";
  return c;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Check()>>> criteria = {
      {"Table values", criterion1},
      {"Convergence behaviour", criterion2},
      {"Iteration trends", criterion3},
      {"Oracle equivalence", criterion4},
      {"Invariants", criterion5},
      {"Gradient check", criterion6},
      {"Objective optimality", criterion7},
      {"PCA explained variance", criterion8},
      {"Reconstruction rate", criterion9},
      {"Determinism and robustness", criterion10}};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    try {
      c = criteria[i].second();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s criterion %zu (%s): %s\n", c.ok ? "PASS" : "FAIL", i + 1,
                criteria[i].first, c.detail.c_str());
    if (!c.ok) ++failed;
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
