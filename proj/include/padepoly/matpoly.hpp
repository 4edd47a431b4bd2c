#pragma once

// Polynomial matrices F(x) = A_0 + A_1 x + ... + A_rho x^rho of order n.
// The characteristic polynomial det F(x) has nominal degree m = rho n and is
// recovered by sampling the determinant on a circle and interpolating. At an
// eigenvalue, Gauss elimination with complete pivoting exposes the rank
// deficiency r, and Jordan back-elimination turns the triangular factor into
// [D Z] so that the eigenvectors are the columns of [D^-1 Z; -I_r].

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "padepoly/explore.hpp"
#include "padepoly/polynomial.hpp"

namespace padepoly {

template <std::floating_point Real>
using BasicMatrix = Eigen::Matrix<BasicComplex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

using Matrix = BasicMatrix<double>;

template <std::floating_point Real>
Real inf_norm(const BasicMatrix<Real>& A) {
  Real mx = 0;
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    Real row = 0;
    for (Eigen::Index j = 0; j < A.cols(); ++j) row += std::abs(A(i, j));
    mx = std::max(mx, row);
  }
  return mx;
}

/// Determinant by Gauss elimination with partial (row) pivoting.
template <std::floating_point Real>
BasicComplex<Real> determinant(BasicMatrix<Real> A) {
  const Eigen::Index n = A.rows();
  if (n != A.cols()) throw Error(ErrorCode::InvalidArgument, "determinant of a non-square matrix");
  BasicComplex<Real> det(1);
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index p = k;
    for (Eigen::Index i = k + 1; i < n; ++i) {
      if (std::abs(A(i, k)) > std::abs(A(p, k))) p = i;
    }
    if (std::abs(A(p, k)) == Real(0)) return BasicComplex<Real>(0);
    if (p != k) {
      A.row(p).swap(A.row(k));
      det = -det;
    }
    det *= A(k, k);
    for (Eigen::Index i = k + 1; i < n; ++i) {
      const BasicComplex<Real> l = A(i, k) / A(k, k);
      for (Eigen::Index j = k + 1; j < n; ++j) A(i, j) -= l * A(k, j);
    }
  }
  return det;
}

template <std::floating_point Real>
class BasicPolynomialMatrix {
 public:
  explicit BasicPolynomialMatrix(std::vector<BasicMatrix<Real>> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.size() < 2) throw Error(ErrorCode::InvalidArgument, "a polynomial matrix needs degree >= 1");
    const Eigen::Index n = coeffs_.front().rows();
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "matrix order must be >= 1");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      const auto& A = coeffs_[i];
      if (A.rows() != n || A.cols() != n) {
        throw Error(ErrorCode::InvalidArgument, "coefficient matrix " + std::to_string(i) + " is " +
                                                    std::to_string(A.rows()) + "x" + std::to_string(A.cols()) +
                                                    ", expected " + std::to_string(n) + "x" + std::to_string(n));
      }
      for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) {
          if (!is_finite(A(r, c))) throw Error(ErrorCode::InvalidArgument, "non-finite matrix entry");
        }
      }
    }
    const auto& lead = coeffs_.back();
    const Real norm = inf_norm(lead);
    leading_regular_ =
        norm > 0 && std::abs(determinant(lead)) > Real(1e-12) * std::pow(norm, static_cast<Real>(n));
  }

  int order() const noexcept { return static_cast<int>(coeffs_.front().rows()); }
  int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  int nominal_degree() const noexcept { return order() * degree(); }
  bool leading_regular() const noexcept { return leading_regular_; }
  const std::vector<BasicMatrix<Real>>& coeffs() const noexcept { return coeffs_; }
  const BasicMatrix<Real>& operator[](std::size_t i) const { return coeffs_.at(i); }

  bool is_real() const {
    for (const auto& A : coeffs_) {
      if ((A.imag().array() != Real(0)).any()) return false;
    }
    return true;
  }

  /// The same problem for y^T F(x) = 0: every coefficient transposed.
  BasicPolynomialMatrix transposed() const {
    std::vector<BasicMatrix<Real>> t;
    for (const auto& A : coeffs_) t.push_back(A.transpose());
    return BasicPolynomialMatrix(std::move(t));
  }

  /// The scalar polynomial at entry (i, j).
  BasicPolynomial<Real> entry(int i, int j) const {
    std::vector<BasicComplex<Real>> c;
    for (const auto& A : coeffs_) c.push_back(A(i, j));
    return BasicPolynomial<Real>(std::move(c));
  }

  /// Residual scale sum_i ||A_i||_inf |x|^i.
  Real scale(const BasicComplex<Real>& x) const {
    Real s = 0, r = std::abs(x);
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) s = s * r + inf_norm(*it);
    return s;
  }

  friend bool operator==(const BasicPolynomialMatrix& a, const BasicPolynomialMatrix& b) {
    if (a.coeffs_.size() != b.coeffs_.size()) return false;
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
      if (a.coeffs_[i] != b.coeffs_[i]) return false;
    }
    return true;
  }

 private:
  std::vector<BasicMatrix<Real>> coeffs_;
  bool leading_regular_ = false;
};

using PolynomialMatrix = BasicPolynomialMatrix<double>;

/// The linear pencil A - x B.
template <std::floating_point Real>
BasicPolynomialMatrix<Real> pencil(const BasicMatrix<Real>& A, const BasicMatrix<Real>& B) {
  return BasicPolynomialMatrix<Real>({A, BasicMatrix<Real>(-B)});
}

/// F(x) by Horner's scheme on the coefficient matrices.
template <std::floating_point Real>
BasicMatrix<Real> eval_matrix(const BasicPolynomialMatrix<Real>& F, const BasicComplex<Real>& x) {
  const auto& A = F.coeffs();
  BasicMatrix<Real> M = A.back();
  for (int i = F.degree() - 1; i >= 0; --i) M = (M * x + A[static_cast<std::size_t>(i)]).eval();
  return M;
}

template <std::floating_point Real>
struct BasicCharacteristicPolynomial {
  BasicPolynomial<Real> poly;
  int nominal_degree = 0;
  int effective_degree = 0;
  Real sample_radius = 1;
};

using CharacteristicPolynomial = BasicCharacteristicPolynomial<double>;

/// det F(x) from m + 1 samples on a circle, interpolated by a discrete
/// Fourier transform. Coefficients below 1e-10 of the largest are trimmed
/// from the top; for real F the imaginary parts are dropped.
template <std::floating_point Real>
BasicCharacteristicPolynomial<Real> characteristic_polynomial(const BasicPolynomialMatrix<Real>& F,
                                                              Real trim_rel = Real(1e-10)) {
  using C = BasicComplex<Real>;
  const int m = F.nominal_degree();
  const int N = m + 1;
  const Real lead_norm = inf_norm(F.coeffs().back());
  const Real base_norm = inf_norm(F.coeffs().front());
  // Balances |A_0| against |A_rho| r^rho so the samples have comparable size.
  Real radius = Real(1);
  if (lead_norm > 0 && base_norm > 0 && F.leading_regular()) {
    radius = std::pow(base_norm / lead_norm, Real(1) / Real(F.degree()));
  }
  if (!(radius > 0) || !std::isfinite(radius)) radius = Real(1);

  const Real tau = Real(2) * std::numbers::pi_v<Real>;
  std::vector<C> samples(static_cast<std::size_t>(N));
  for (int s = 0; s < N; ++s) {
    const C z = std::polar(radius, tau * Real(s) / Real(N));
    samples[static_cast<std::size_t>(s)] = determinant(eval_matrix(F, z));
  }
  std::vector<C> c(static_cast<std::size_t>(N));
  for (int j = 0; j < N; ++j) {
    C acc(0);
    for (int s = 0; s < N; ++s) {
      // Exponent reduced mod N keeps the angle small and exact in integers.
      const int e = (j * s) % N;
      acc += samples[static_cast<std::size_t>(s)] * std::polar(Real(1), -tau * Real(e) / Real(N));
    }
    c[static_cast<std::size_t>(j)] = acc / (Real(N) * std::pow(radius, Real(j)));
  }
  if (F.is_real()) {
    for (auto& x : c) x = C(x.real(), 0);
  }
  // Conditioning check off the nodes, against the untrimmed interpolant.
  {
    const BasicPolynomial<Real> full(c);
    const C probe = std::polar(radius * Real(0.7), tau / Real(2 * N) + Real(0.1));
    const C direct = determinant(eval_matrix(F, probe));
    if (!full.is_zero()) {
      const C interp = value(full, probe);
      Real ref = magnitude_scale(full, probe);
      for (const auto& v : samples) ref = std::max(ref, std::abs(v));
      if (std::abs(interp - direct) > Real(1e-6) * ref) {
        throw Error(ErrorCode::IllConditioned, "determinant samples do not fit a degree-" + std::to_string(m) +
                                                   " polynomial; try a different sample radius");
      }
    }
  }
  Real mx = 0;
  for (const auto& x : c) mx = std::max(mx, std::abs(x));
  while (!c.empty() && std::abs(c.back()) <= trim_rel * mx) c.pop_back();
  BasicCharacteristicPolynomial<Real> out;
  out.poly = BasicPolynomial<Real>(std::move(c));
  out.nominal_degree = m;
  out.effective_degree = out.poly.degree();
  out.sample_radius = radius;
  return out;
}

template <std::floating_point Real>
struct BasicDiagonalSeeds {
  std::vector<BasicComplex<Real>> seeds;
  /// Rows whose diagonal entry has degree below rho.
  std::vector<int> degenerate_rows;
};

using DiagonalSeeds = BasicDiagonalSeeds<double>;

/// Roots of a polynomial of degree <= 2 in closed form, otherwise from the
/// simultaneous iteration.
template <std::floating_point Real>
std::vector<BasicComplex<Real>> small_roots(const BasicPolynomial<Real>& f) {
  using C = BasicComplex<Real>;
  const int d = f.degree();
  if (d < 1) return {};
  if (d == 1) return {-f[0] / f[1]};
  if (d == 2) {
    const C a = f[2], b = f[1], c = f[0];
    const C root = std::sqrt(b * b - Real(4) * a * c);
    return {(-b + root) / (Real(2) * a), (-b - root) / (Real(2) * a)};
  }
  return companion_seed_all(f).seeds;
}

/// Seeds from the diagonal entries: exact when F is diagonally dominant.
template <std::floating_point Real>
BasicDiagonalSeeds<Real> diagonal_seeds(const BasicPolynomialMatrix<Real>& F) {
  BasicDiagonalSeeds<Real> out;
  for (int j = 0; j < F.order(); ++j) {
    const auto fj = F.entry(j, j);
    if (fj.degree() < F.degree()) out.degenerate_rows.push_back(j);
    for (const auto& r : small_roots(fj)) out.seeds.push_back(r);
  }
  return out;
}

enum class Normalization {
  /// alpha = 1: the free coordinate of each vector carries -1.
  LastEntryMinusOne,
  /// Unit Euclidean norm.
  UnitNorm,
};

template <std::floating_point Real>
struct BasicEigenvectorBundle {
  BasicComplex<Real> eigenvalue;
  int rank_deficiency = 0;
  /// n x r; columns span the null space of F(eigenvalue).
  BasicMatrix<Real> right_vectors;
  /// n x r; columns y with y^T F(eigenvalue) = 0.
  BasicMatrix<Real> left_vectors;
  Normalization normalization = Normalization::LastEntryMinusOne;
  /// Pivot magnitudes of the elimination, in elimination order.
  std::vector<Real> pivots;
  /// max over vectors of ||F x||_inf (resp. ||y^T F||_inf).
  Real right_residual = 0;
  Real left_residual = 0;
  /// sum_i ||A_i||_inf |eigenvalue|^i.
  Real scale = 0;
  std::optional<int> algebraic_multiplicity;

  /// Fewer eigenvectors than the multiplicity: generalized vectors needed.
  bool defective() const noexcept { return algebraic_multiplicity && *algebraic_multiplicity > rank_deficiency; }
};

using EigenvectorBundle = BasicEigenvectorBundle<double>;

template <std::floating_point Real>
struct BasicNullSpace {
  BasicMatrix<Real> vectors;
  std::vector<Real> pivots;
};

/// Null space of a square matrix: Gauss with complete pivoting until the
/// remaining pivots fall to pivot_tol of the first, then Jordan
/// back-elimination of the triangular block.
template <std::floating_point Real>
BasicNullSpace<Real> null_space(BasicMatrix<Real> M, Real pivot_tol, Normalization norm) {
  using C = BasicComplex<Real>;
  const Eigen::Index n = M.rows();
  std::vector<Eigen::Index> col(static_cast<std::size_t>(n));
  std::iota(col.begin(), col.end(), Eigen::Index(0));
  BasicNullSpace<Real> out;
  Real largest = 0;
  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index pr = k, pc = k;
    Real best = -1;
    for (Eigen::Index j = k; j < n; ++j) {
      for (Eigen::Index i = k; i < n; ++i) {
        const Real a = std::abs(M(i, j));
        if (a > best) {
          best = a;
          pr = i;
          pc = j;
        }
      }
    }
    if (k == 0) largest = best;
    if (!(best > pivot_tol * largest) || best == Real(0)) break;
    out.pivots.push_back(best);
    if (pr != k) M.row(pr).swap(M.row(k));
    if (pc != k) {
      M.col(pc).swap(M.col(k));
      std::swap(col[static_cast<std::size_t>(pc)], col[static_cast<std::size_t>(k)]);
    }
    for (Eigen::Index i = k + 1; i < n; ++i) {
      const C l = M(i, k) / M(k, k);
      M(i, k) = C(0);
      for (Eigen::Index j = k + 1; j < n; ++j) M(i, j) -= l * M(k, j);
    }
    ++rank;
  }
  const Eigen::Index r = n - rank;
  if (r == 0) return out;
  // Jordan: clear the upper triangle column by column from the last pivot.
  for (Eigen::Index i = rank - 1; i >= 1; --i) {
    for (Eigen::Index l = 0; l < i; ++l) {
      const C f = M(l, i) / M(i, i);
      if (f == C(0)) continue;
      M(l, i) = C(0);
      for (Eigen::Index j = rank; j < n; ++j) M(l, j) -= f * M(i, j);
    }
  }
  BasicMatrix<Real> X(n, r);
  for (Eigen::Index q = 0; q < r; ++q) {
    for (Eigen::Index i = 0; i < rank; ++i) X(col[static_cast<std::size_t>(i)], q) = M(i, rank + q) / M(i, i);
    for (Eigen::Index i = rank; i < n; ++i) {
      X(col[static_cast<std::size_t>(i)], q) = (i - rank == q) ? C(-1) : C(0);
    }
  }
  if (norm == Normalization::UnitNorm) {
    for (Eigen::Index q = 0; q < r; ++q) X.col(q) /= X.col(q).norm();
  }
  out.vectors = std::move(X);
  return out;
}

namespace detail {

template <std::floating_point Real>
Real column_residual(const BasicMatrix<Real>& M, const BasicMatrix<Real>& X) {
  Real mx = 0;
  for (Eigen::Index q = 0; q < X.cols(); ++q) {
    const BasicMatrix<Real> r = M * X.col(q);
    mx = std::max(mx, r.cwiseAbs().maxCoeff());
  }
  return mx;
}

}  // namespace detail

template <std::floating_point Real>
BasicEigenvectorBundle<Real> extract_eigenvectors(const BasicPolynomialMatrix<Real>& F,
                                                  const BasicComplex<Real>& lambda, Real pivot_tol = Real(1e-10),
                                                  Normalization norm = Normalization::LastEntryMinusOne,
                                                  std::optional<int> algebraic_multiplicity = std::nullopt) {
  if (!(pivot_tol > 0)) throw Error(ErrorCode::InvalidArgument, "pivot_tol must be positive");
  const BasicMatrix<Real> M = eval_matrix(F, lambda);
  auto ns = null_space<Real>(M, pivot_tol, norm);
  if (ns.vectors.cols() == 0) throw Error(ErrorCode::NotAnEigenvalue, "no pivot below tolerance");
  BasicEigenvectorBundle<Real> b;
  b.eigenvalue = lambda;
  b.rank_deficiency = static_cast<int>(ns.vectors.cols());
  b.right_vectors = std::move(ns.vectors);
  b.pivots = std::move(ns.pivots);
  b.normalization = norm;
  b.right_residual = detail::column_residual<Real>(M, b.right_vectors);
  b.scale = F.scale(lambda);
  b.algebraic_multiplicity = algebraic_multiplicity;
  return b;
}

/// Left eigenvectors y^T F(lambda) = 0 via F^T (plain transpose).
template <std::floating_point Real>
BasicEigenvectorBundle<Real> left_eigenvectors(const BasicPolynomialMatrix<Real>& F, const BasicComplex<Real>& lambda,
                                               Real pivot_tol = Real(1e-10),
                                               Normalization norm = Normalization::LastEntryMinusOne,
                                               std::optional<int> algebraic_multiplicity = std::nullopt) {
  auto b = extract_eigenvectors(F.transposed(), lambda, pivot_tol, norm, algebraic_multiplicity);
  b.left_vectors = std::move(b.right_vectors);
  b.left_residual = b.right_residual;
  b.right_vectors = BasicMatrix<Real>();
  b.right_residual = 0;
  return b;
}

/// Both sides at once. The rank deficiency reported is the right one.
template <std::floating_point Real>
BasicEigenvectorBundle<Real> eigen_bundle(const BasicPolynomialMatrix<Real>& F, const BasicComplex<Real>& lambda,
                                          Real pivot_tol = Real(1e-10),
                                          Normalization norm = Normalization::LastEntryMinusOne,
                                          std::optional<int> algebraic_multiplicity = std::nullopt) {
  auto b = extract_eigenvectors(F, lambda, pivot_tol, norm, algebraic_multiplicity);
  auto l = left_eigenvectors(F, lambda, pivot_tol, norm, algebraic_multiplicity);
  b.left_vectors = std::move(l.left_vectors);
  b.left_residual = l.left_residual;
  return b;
}

}  // namespace padepoly
