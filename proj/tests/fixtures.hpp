#pragma once

// Polynomials and matrices shared by the test suites.

#include <string>
#include <vector>

#include "padepoly/padepoly.hpp"

namespace fixtures {

using namespace padepoly;

/// (x - 2)^2 (x + 1)^4.
inline Polynomial example1() { return Polynomial{4, 12, 9, -4, -6, 0, 1}; }

/// Characteristic polynomial of the 5x5 quadratic eigenvalue problem.
inline Polynomial example2() { return Polynomial{12221, 19366, 33492, 28079, 23637, 11574, 5699, 1631, 489, 68, 12}; }

/// Wilkinson's polynomial (x - 1)(x - 2)...(x - 10).
inline Polynomial wilkinson10() {
  return Polynomial{3628800, -10628640, 12753576, -8409500, 3416930, -902055, 157773, -18150, 1320, -55, 1};
}

/// (x + 2)(x + 1)^2 (x - 1)^2.
inline Polynomial example4_spectrum() { return Polynomial{2, 1, -4, -2, 2, 1}; }

/// 6 (x^2 + 1)^2 (x^2 + x + 1)^3.
inline Polynomial example5() { return Polynomial{6, 18, 48, 78, 114, 120, 114, 78, 48, 18, 6}; }

/// 3 (x - 1)(x - 2)(x - 3)(x - 4)(x - 5).
inline Polynomial example8() { return Polynomial{-360, 822, -675, 255, -45, 3}; }

/// Interpolation values of the Wilkinson list, as doubles.
inline std::vector<Complex> example3_sigma() {
  return {10.000000000328654, 8.999999998364443, 8.000000003420013, 6.999999996085851, 6.000000002669752,
          4.999999998898655,  4.000000000263102, 2.9999999999681695, 2.0000000000013447, 1.0};
}

inline PolynomialMatrix example2_matrix() {
  Matrix a0(5, 5), a1(5, 5), a2(5, 5);
  a0 << 5, -1, 0, 0, 0, -1, 9, -3, -2, 0, 0, -3, 6, -2, 0, 0, -2, -2, 12, -5, 0, 0, 0, -5, 8;
  a1 << 2, 0, 0, 0, 0, 0, 3, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, -1, 0, 0, 0, -1, 4;
  a2 << 3, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 4;
  return PolynomialMatrix({a0, a1, a2});
}

/// The pencil A - lambda I of the 5x5 matrix with a defective eigenvalue -1.
inline PolynomialMatrix example4_matrix() {
  Matrix a(5, 5);
  a << -1, 0, 1, 0, 0, 0, 0, 0, 1, 0, 1, 0, 0, 0, 1, 0, 1, 0, 0, 0, 0, 0, 0, 1, -1;
  return pencil(a, Matrix(Matrix::Identity(5, 5)));
}

inline PolynomialMatrix example7_matrix() {
  Matrix a0 = Matrix::Identity(2, 2), a1(2, 2), a2(2, 2), a3 = Matrix::Zero(2, 2), a4(2, 2);
  a1 << 1, 1, 1, 1;
  a2 << 2, 1, 0, 1;
  a4 << 0, 1, 0, 0;
  return PolynomialMatrix({a0, a1, a2, a3, a4});
}

inline std::string sample_path(const std::string& name) { return std::string(PADEPOLY_SAMPLES_DIR) + "/" + name; }

}  // namespace fixtures
