#ifndef PSVD_FIXTURES_HPP
#define PSVD_FIXTURES_HPP

// Small reference matrices compiled into the library.

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "psvd/matrix.hpp"

namespace psvd::fixtures {

inline Matrix xa() {
  return Matrix{{1, 1, 1}, {0, 2, 1}, {1, 0, 1}};
}

inline Matrix xb() {
  return Matrix{{3, 1, 9, 2},
                {10, 4, 8, 6},
                {7, 6, 12, 1},
                {11, 2, 5, 9},
                {1, 1, 1, 0}};
}

inline Matrix xc() {
  return Matrix{{22, 10, 2, 3, 7},  {14, 7, 10, 0, 8},
                {-1, 13, -1, -11, 3}, {-3, -2, 13, -2, 4},
                {9, 8, 1, -2, 4},     {9, 1, -7, 5, -1},
                {2, -6, 6, 5, 1},     {4, 5, 0, -2, 2}};
}

inline constexpr std::size_t kIrisRows = 150;
inline constexpr std::size_t kIrisCols = 4;

// Fisher's iris measurements: sepal length, sepal width, petal length,
// petal width (cm). Same values as data/iris.csv.
inline constexpr std::array<double, kIrisRows * kIrisCols> kIrisData = {
    5.1, 3.5, 1.4, 0.2,
    4.9, 3.0, 1.4, 0.2,
    4.7, 3.2, 1.3, 0.2,
    4.6, 3.1, 1.5, 0.2,
    5.0, 3.6, 1.4, 0.2,
    5.4, 3.9, 1.7, 0.4,
    4.6, 3.4, 1.4, 0.3,
    5.0, 3.4, 1.5, 0.2,
    4.4, 2.9, 1.4, 0.2,
    4.9, 3.1, 1.5, 0.1,
    5.4, 3.7, 1.5, 0.2,
    4.8, 3.4, 1.6, 0.2,
    4.8, 3.0, 1.4, 0.1,
    4.3, 3.0, 1.1, 0.1,
    5.8, 4.0, 1.2, 0.2,
    5.7, 4.4, 1.5, 0.4,
    5.4, 3.9, 1.3, 0.4,
    5.1, 3.5, 1.4, 0.3,
    5.7, 3.8, 1.7, 0.3,
    5.1, 3.8, 1.5, 0.3,
    5.4, 3.4, 1.7, 0.2,
    5.1, 3.7, 1.5, 0.4,
    4.6, 3.6, 1.0, 0.2,
    5.1, 3.3, 1.7, 0.5,
    4.8, 3.4, 1.9, 0.2,
    5.0, 3.0, 1.6, 0.2,
    5.0, 3.4, 1.6, 0.4,
    5.2, 3.5, 1.5, 0.2,
    5.2, 3.4, 1.4, 0.2,
    4.7, 3.2, 1.6, 0.2,
    4.8, 3.1, 1.6, 0.2,
    5.4, 3.4, 1.5, 0.4,
    5.2, 4.1, 1.5, 0.1,
    5.5, 4.2, 1.4, 0.2,
    4.9, 3.1, 1.5, 0.2,
    5.0, 3.2, 1.2, 0.2,
    5.5, 3.5, 1.3, 0.2,
    4.9, 3.6, 1.4, 0.1,
    4.4, 3.0, 1.3, 0.2,
    5.1, 3.4, 1.5, 0.2,
    5.0, 3.5, 1.3, 0.3,
    4.5, 2.3, 1.3, 0.3,
    4.4, 3.2, 1.3, 0.2,
    5.0, 3.5, 1.6, 0.6,
    5.1, 3.8, 1.9, 0.4,
    4.8, 3.0, 1.4, 0.3,
    5.1, 3.8, 1.6, 0.2,
    4.6, 3.2, 1.4, 0.2,
    5.3, 3.7, 1.5, 0.2,
    5.0, 3.3, 1.4, 0.2,
    7.0, 3.2, 4.7, 1.4,
    6.4, 3.2, 4.5, 1.5,
    6.9, 3.1, 4.9, 1.5,
    5.5, 2.3, 4.0, 1.3,
    6.5, 2.8, 4.6, 1.5,
    5.7, 2.8, 4.5, 1.3,
    6.3, 3.3, 4.7, 1.6,
    4.9, 2.4, 3.3, 1.0,
    6.6, 2.9, 4.6, 1.3,
    5.2, 2.7, 3.9, 1.4,
    5.0, 2.0, 3.5, 1.0,
    5.9, 3.0, 4.2, 1.5,
    6.0, 2.2, 4.0, 1.0,
    6.1, 2.9, 4.7, 1.4,
    5.6, 2.9, 3.6, 1.3,
    6.7, 3.1, 4.4, 1.4,
    5.6, 3.0, 4.5, 1.5,
    5.8, 2.7, 4.1, 1.0,
    6.2, 2.2, 4.5, 1.5,
    5.6, 2.5, 3.9, 1.1,
    5.9, 3.2, 4.8, 1.8,
    6.1, 2.8, 4.0, 1.3,
    6.3, 2.5, 4.9, 1.5,
    6.1, 2.8, 4.7, 1.2,
    6.4, 2.9, 4.3, 1.3,
    6.6, 3.0, 4.4, 1.4,
    6.8, 2.8, 4.8, 1.4,
    6.7, 3.0, 5.0, 1.7,
    6.0, 2.9, 4.5, 1.5,
    5.7, 2.6, 3.5, 1.0,
    5.5, 2.4, 3.8, 1.1,
    5.5, 2.4, 3.7, 1.0,
    5.8, 2.7, 3.9, 1.2,
    6.0, 2.7, 5.1, 1.6,
    5.4, 3.0, 4.5, 1.5,
    6.0, 3.4, 4.5, 1.6,
    6.7, 3.1, 4.7, 1.5,
    6.3, 2.3, 4.4, 1.3,
    5.6, 3.0, 4.1, 1.3,
    5.5, 2.5, 4.0, 1.3,
    5.5, 2.6, 4.4, 1.2,
    6.1, 3.0, 4.6, 1.4,
    5.8, 2.6, 4.0, 1.2,
    5.0, 2.3, 3.3, 1.0,
    5.6, 2.7, 4.2, 1.3,
    5.7, 3.0, 4.2, 1.2,
    5.7, 2.9, 4.2, 1.3,
    6.2, 2.9, 4.3, 1.3,
    5.1, 2.5, 3.0, 1.1,
    5.7, 2.8, 4.1, 1.3,
    6.3, 3.3, 6.0, 2.5,
    5.8, 2.7, 5.1, 1.9,
    7.1, 3.0, 5.9, 2.1,
    6.3, 2.9, 5.6, 1.8,
    6.5, 3.0, 5.8, 2.2,
    7.6, 3.0, 6.6, 2.1,
    4.9, 2.5, 4.5, 1.7,
    7.3, 2.9, 6.3, 1.8,
    6.7, 2.5, 5.8, 1.8,
    7.2, 3.6, 6.1, 2.5,
    6.5, 3.2, 5.1, 2.0,
    6.4, 2.7, 5.3, 1.9,
    6.8, 3.0, 5.5, 2.1,
    5.7, 2.5, 5.0, 2.0,
    5.8, 2.8, 5.1, 2.4,
    6.4, 3.2, 5.3, 2.3,
    6.5, 3.0, 5.5, 1.8,
    7.7, 3.8, 6.7, 2.2,
    7.7, 2.6, 6.9, 2.3,
    6.0, 2.2, 5.0, 1.5,
    6.9, 3.2, 5.7, 2.3,
    5.6, 2.8, 4.9, 2.0,
    7.7, 2.8, 6.7, 2.0,
    6.3, 2.7, 4.9, 1.8,
    6.7, 3.3, 5.7, 2.1,
    7.2, 3.2, 6.0, 1.8,
    6.2, 2.8, 4.8, 1.8,
    6.1, 3.0, 4.9, 1.8,
    6.4, 2.8, 5.6, 2.1,
    7.2, 3.0, 5.8, 1.6,
    7.4, 2.8, 6.1, 1.9,
    7.9, 3.8, 6.4, 2.0,
    6.4, 2.8, 5.6, 2.2,
    6.3, 2.8, 5.1, 1.5,
    6.1, 2.6, 5.6, 1.4,
    7.7, 3.0, 6.1, 2.3,
    6.3, 3.4, 5.6, 2.4,
    6.4, 3.1, 5.5, 1.8,
    6.0, 3.0, 4.8, 1.8,
    6.9, 3.1, 5.4, 2.1,
    6.7, 3.1, 5.6, 2.4,
    6.9, 3.1, 5.1, 2.3,
    5.8, 2.7, 5.1, 1.9,
    6.8, 3.2, 5.9, 2.3,
    6.7, 3.3, 5.7, 2.5,
    6.7, 3.0, 5.2, 2.3,
    6.3, 2.5, 5.0, 1.9,
    6.5, 3.0, 5.2, 2.0,
    6.2, 3.4, 5.4, 2.3,
    5.9, 3.0, 5.1, 1.8,
};

inline constexpr std::array<std::string_view, 3> kIrisSpeciesNames = {
    "setosa", "versicolor", "virginica"};

inline constexpr std::array<unsigned char, kIrisRows> kIrisSpecies = {
    0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2};

inline Matrix iris() {
  return Matrix(kIrisRows, kIrisCols,
                std::vector<double>(kIrisData.begin(), kIrisData.end()));
}

inline std::vector<std::string> iris_labels() {
  std::vector<std::string> out;
  out.reserve(kIrisRows);
  for (unsigned char s : kIrisSpecies) out.emplace_back(kIrisSpeciesNames[s]);
  return out;
}

/// 8x8 grey-level glyph of a "3" (0..255), for desk-scale reconstruction.
inline Matrix digit() {
  return Matrix{{0, 40, 200, 255, 255, 200, 40, 0},
                {0, 180, 90, 0, 10, 120, 220, 0},
                {0, 0, 0, 0, 0, 110, 230, 0},
                {0, 0, 60, 190, 240, 210, 30, 0},
                {0, 0, 50, 170, 230, 220, 60, 0},
                {0, 0, 0, 0, 0, 100, 240, 10},
                {0, 170, 80, 0, 20, 150, 220, 0},
                {0, 50, 210, 255, 250, 190, 30, 0}};
}

inline constexpr std::array<std::string_view, 5> kFixtureNames = {
    "Xa", "Xb", "Xc", "iris", "digit"};

/// Fixture by name, or nullopt when unknown.
inline std::optional<Matrix> by_name(std::string_view name) {
  if (name == "Xa") return xa();
  if (name == "Xb") return xb();
  if (name == "Xc") return xc();
  if (name == "iris") return iris();
  if (name == "digit") return digit();
  return std::nullopt;
}

}  // namespace psvd::fixtures

#endif  // PSVD_FIXTURES_HPP
