#include <gtest/gtest.h>

#include <cmath>

#include "psvd/fixtures.hpp"
#include "psvd/jacobi.hpp"
#include "psvd/random.hpp"

using psvd::Matrix;

TEST(Jacobi, TwoByTwo) {
  const auto e = psvd::jacobi_eigen_sym(Matrix{{2, 1}, {1, 2}});
  EXPECT_NEAR(e.values[0], 3.0, 1e-14);
  EXPECT_NEAR(e.values[1], 1.0, 1e-14);
  const double h = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(e.vectors(0, 0), h, 1e-14);
  EXPECT_NEAR(e.vectors(1, 0), h, 1e-14);
  // tie on magnitude: lowest index made positive
  EXPECT_NEAR(e.vectors(0, 1), h, 1e-14);
  EXPECT_NEAR(e.vectors(1, 1), -h, 1e-14);
}

TEST(Jacobi, XaGramSpectrum) {
  const auto e = psvd::jacobi_eigen_sym(psvd::gram_matrix(psvd::fixtures::xa()));
  // trace 10, det(Xa)^2 = 1
  EXPECT_NEAR(e.values[0] + e.values[1] + e.values[2], 10.0, 1e-12);
  EXPECT_NEAR(e.values[0] * e.values[1] * e.values[2], 1.0, 1e-12);
  EXPECT_NEAR(e.values[0], 7.85085, 1e-5);
  EXPECT_NEAR(e.values[1], 2.08815, 1e-5);
  EXPECT_NEAR(e.values[2], 0.06100, 1e-5);
}

TEST(Jacobi, ReconstructsRandomSymmetric) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Matrix a = psvd::random_normal_matrix(7, 7, seed);
    Matrix s = psvd::add(a, psvd::transpose(a));
    const auto e = psvd::jacobi_eigen_sym(s);
    const Matrix vd = psvd::matmul(
        e.vectors, Matrix::diagonal(e.values.values()));
    const Matrix back = psvd::matmul(vd, psvd::transpose(e.vectors));
    EXPECT_LE(psvd::max_abs_diff(back, s), 1e-11);
    EXPECT_LE(psvd::orthonormality_error(e.vectors), 1e-12);
    for (std::size_t j = 1; j < 7; ++j) EXPECT_GE(e.values[j - 1], e.values[j]);
  }
}

TEST(Jacobi, RejectsAsymmetric) {
  EXPECT_THROW(psvd::jacobi_eigen_sym(Matrix{{1, 2}, {0, 1}}),
               psvd::PreconditionError);
  EXPECT_THROW(psvd::jacobi_eigen_sym(Matrix(2, 3)), psvd::ShapeError);
}

TEST(OracleSvd, XaTable) {
  const auto r = psvd::oracle_svd(psvd::fixtures::xa());
  EXPECT_NEAR(r.d[0], 2.80193774, 1e-8);
  EXPECT_NEAR(r.d[1], 1.44504187, 1e-8);
  EXPECT_NEAR(r.d[2], 0.24697960, 1e-8);
  EXPECT_NEAR(r.d[0] * r.d[1] * r.d[2], 1.0, 1e-12);
}
