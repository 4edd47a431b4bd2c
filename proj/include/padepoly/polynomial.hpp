#pragma once

// Dense complex polynomials in ascending coefficient order, plus the scalar
// functions the refinement iterations are built from: the Pade function
// p = f / (-f'), Halley's function h = p / (1 + p q), the test-polynomial
// transform a_j -> (1 - j)^k a_j, Horner deflation and the Taylor ladder.

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "padepoly/types.hpp"

namespace padepoly {

/// Coefficients at or below this magnitude are structurally zero and are
/// trimmed from the top. No relative trimming happens here.
template <std::floating_point Real>
constexpr Real structural_zero() noexcept {
  if constexpr (sizeof(Real) >= sizeof(double)) {
    return Real(1e-300);
  } else {
    return Real(0);
  }
}

template <std::floating_point Real>
class BasicPolynomial {
 public:
  using real_type = Real;
  using value_type = BasicComplex<Real>;

  /// The zero polynomial (empty coefficient list).
  BasicPolynomial() = default;

  explicit BasicPolynomial(std::vector<value_type> coeffs) : coeffs_(std::move(coeffs)) {
    for (const auto& c : coeffs_) {
      if (!is_finite(c)) throw Error(ErrorCode::InvalidArgument, "non-finite coefficient");
    }
    while (!coeffs_.empty() && std::abs(coeffs_.back()) <= structural_zero<Real>()) {
      coeffs_.pop_back();
    }
  }

  BasicPolynomial(std::initializer_list<Real> real_coeffs)
      : BasicPolynomial(std::vector<value_type>(real_coeffs.begin(), real_coeffs.end())) {}

  static BasicPolynomial from_real(std::span<const Real> real_coeffs) {
    return BasicPolynomial(std::vector<value_type>(real_coeffs.begin(), real_coeffs.end()));
  }

  /// Degree m, or -1 for the zero polynomial.
  int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const noexcept { return coeffs_.empty(); }
  std::size_t size() const noexcept { return coeffs_.size(); }

  std::span<const value_type> coeffs() const noexcept { return coeffs_; }
  const value_type& operator[](std::size_t j) const { return coeffs_.at(j); }
  const value_type& leading() const {
    if (coeffs_.empty()) throw Error(ErrorCode::ZeroPolynomial);
    return coeffs_.back();
  }

  bool is_real() const noexcept {
    return std::all_of(coeffs_.begin(), coeffs_.end(),
                       [](const value_type& c) { return c.imag() == Real(0); });
  }

  friend bool operator==(const BasicPolynomial&, const BasicPolynomial&) = default;

 private:
  std::vector<value_type> coeffs_;
};

using Polynomial = BasicPolynomial<double>;

namespace detail {

template <std::floating_point Real>
void require_nonzero(const BasicPolynomial<Real>& f) {
  if (f.is_zero()) throw Error(ErrorCode::ZeroPolynomial);
}

template <std::floating_point Real>
Real factorial(int k) {
  Real r(1);
  for (int i = 2; i <= k; ++i) r *= Real(i);
  return r;
}

}  // namespace detail

/// f(x), f'(x), ..., f^(order)(x) by Horner evaluation with derivative
/// propagation. Entry 0 is bitwise the plain Horner value.
template <std::floating_point Real>
std::vector<BasicComplex<Real>> evaluate(const BasicPolynomial<Real>& f, const BasicComplex<Real>& x,
                                         int order) {
  using C = BasicComplex<Real>;
  detail::require_nonzero(f);
  if (order < 0) throw Error(ErrorCode::InvalidArgument, "negative derivative order");
  const auto a = f.coeffs();
  const int m = f.degree();
  std::vector<C> pd(static_cast<std::size_t>(order) + 1, C(0));
  pd[0] = a[static_cast<std::size_t>(m)];
  for (int i = m - 1; i >= 0; --i) {
    const int top = std::min(order, m - i);
    for (int j = top; j >= 1; --j) pd[j] = pd[j] * x + pd[j - 1];
    pd[0] = pd[0] * x + a[static_cast<std::size_t>(i)];
  }
  for (int k = 2; k <= order; ++k) pd[k] *= detail::factorial<Real>(k);
  return pd;
}

template <std::floating_point Real>
BasicComplex<Real> value(const BasicPolynomial<Real>& f, const BasicComplex<Real>& x) {
  detail::require_nonzero(f);
  const auto a = f.coeffs();
  BasicComplex<Real> y = a.back();
  for (int i = f.degree() - 1; i >= 0; --i) y = y * x + a[static_cast<std::size_t>(i)];
  return y;
}

/// S_k = sum_j |a_j| j!/(j-k)! |x|^(j-k): the magnitude sum of the terms
/// entering f^(k)(x). Used as the scale of relative zero tests.
template <std::floating_point Real>
std::vector<Real> derivative_scales(const BasicPolynomial<Real>& f, const BasicComplex<Real>& x,
                                    int order) {
  detail::require_nonzero(f);
  const auto a = f.coeffs();
  const int m = f.degree();
  const Real r = std::abs(x);
  std::vector<Real> pd(static_cast<std::size_t>(order) + 1, Real(0));
  pd[0] = std::abs(a[static_cast<std::size_t>(m)]);
  for (int i = m - 1; i >= 0; --i) {
    const int top = std::min(order, m - i);
    for (int j = top; j >= 1; --j) pd[j] = pd[j] * r + pd[j - 1];
    pd[0] = pd[0] * r + std::abs(a[static_cast<std::size_t>(i)]);
  }
  for (int k = 2; k <= order; ++k) pd[k] *= detail::factorial<Real>(k);
  return pd;
}

/// Residual scale sum_j |a_j| |x|^j.
template <std::floating_point Real>
Real magnitude_scale(const BasicPolynomial<Real>& f, const BasicComplex<Real>& x) {
  return derivative_scales(f, x, 0)[0];
}

/// Cauchy bound 1 + max_{j<m} |a_j| / |a_m|; every root lies inside it.
template <std::floating_point Real>
Real cauchy_bound(const BasicPolynomial<Real>& f) {
  detail::require_nonzero(f);
  const auto a = f.coeffs();
  const Real lead = std::abs(a.back());
  Real mx(0);
  for (std::size_t j = 0; j + 1 < a.size(); ++j) mx = std::max(mx, std::abs(a[j]));
  return Real(1) + mx / lead;
}

template <std::floating_point Real>
BasicPolynomial<Real> derivative(const BasicPolynomial<Real>& f) {
  if (f.degree() < 1) return {};
  const auto a = f.coeffs();
  std::vector<BasicComplex<Real>> d(a.size() - 1);
  for (std::size_t j = 1; j < a.size(); ++j) d[j - 1] = a[j] * Real(j);
  return BasicPolynomial<Real>(std::move(d));
}

/// The co-polynomial f(-x): a_j -> (-1)^j a_j.
template <std::floating_point Real>
BasicPolynomial<Real> co_polynomial(const BasicPolynomial<Real>& f) {
  std::vector<BasicComplex<Real>> c(f.coeffs().begin(), f.coeffs().end());
  for (std::size_t j = 1; j < c.size(); j += 2) c[j] = -c[j];
  return BasicPolynomial<Real>(std::move(c));
}

/// Pade function p(x) = f(x) / (-f'(x)). With co = true the co-function
/// p(-x) = f(-x) / (-f'(-x)) is returned, which is minus the Pade function
/// of the co-polynomial; it sweeps negative roots from the positive axis.
template <std::floating_point Real>
BasicComplex<Real> pade_eval(const BasicPolynomial<Real>& f, const BasicComplex<Real>& x, bool co = false) {
  detail::require_nonzero(f);
  const BasicComplex<Real> at = co ? -x : x;
  const auto v = evaluate(f, at, 1);
  if (!(std::abs(v[1]) > underflow_floor<Real>())) {
    throw Error(ErrorCode::DerivativeVanishes, "stationary point, perturb the argument");
  }
  return v[0] / (-v[1]);
}

/// Halley's function h = p / (1 + p q) with q = f'' / f'.
template <std::floating_point Real>
BasicComplex<Real> halley_eval(const BasicPolynomial<Real>& f, const BasicComplex<Real>& x) {
  const auto v = evaluate(f, x, 2);
  if (!(std::abs(v[1]) > underflow_floor<Real>())) {
    throw Error(ErrorCode::DerivativeVanishes, "f' vanishes in Halley's function");
  }
  const BasicComplex<Real> p = v[0] / (-v[1]);
  const BasicComplex<Real> q = v[2] / v[1];
  const BasicComplex<Real> denom = Real(1) + p * q;
  if (!(std::abs(denom) > std::numeric_limits<Real>::epsilon())) {
    throw Error(ErrorCode::HalleyDenominatorVanishes, "1 + p q vanishes");
  }
  return p / denom;
}

/// Test polynomial f_k with coefficients (1 - j)^k a_j. The factor is applied
/// k times so that f_k is coefficient-exactly the k-fold transform of f_1.
template <std::floating_point Real>
BasicPolynomial<Real> test_polynomial(const BasicPolynomial<Real>& f, int k) {
  detail::require_nonzero(f);
  if (k < 0) throw Error(ErrorCode::InvalidArgument, "negative test-polynomial index");
  std::vector<BasicComplex<Real>> c(f.coeffs().begin(), f.coeffs().end());
  for (std::size_t j = 0; j < c.size(); ++j) {
    const Real factor = Real(1) - Real(j);
    for (int i = 0; i < k; ++i) c[j] *= factor;
  }
  return BasicPolynomial<Real>(std::move(c));
}

template <std::floating_point Real>
struct Deflation {
  BasicPolynomial<Real> quotient;
  BasicComplex<Real> remainder;
};

/// Synthetic division f(x) = (x - root) q(x) + r; r is bitwise f(root).
template <std::floating_point Real>
Deflation<Real> deflate_horner(const BasicPolynomial<Real>& f, const BasicComplex<Real>& root) {
  detail::require_nonzero(f);
  if (f.degree() < 1) throw Error(ErrorCode::InvalidArgument, "deflation needs degree >= 1");
  const auto a = f.coeffs();
  const int m = f.degree();
  std::vector<BasicComplex<Real>> q(static_cast<std::size_t>(m));
  BasicComplex<Real> acc = a[static_cast<std::size_t>(m)];
  for (int k = m - 1; k >= 0; --k) {
    q[static_cast<std::size_t>(k)] = acc;
    acc = acc * root + a[static_cast<std::size_t>(k)];
  }
  return {BasicPolynomial<Real>(std::move(q)), acc};
}

template <std::floating_point Real>
struct TaylorVerdict {
  int multiplicity = 0;
  /// |f^(k)(a)| for k = 0..multiplicity.
  std::vector<Real> derivative_magnitudes;
  /// Magnitude sums S_k the zero test is relative to.
  std::vector<Real> scales;
};

template <std::floating_point Real>
struct TaylorRejection {
  int failed_order = 0;
  /// True when f^(failed_order)(a) should have vanished but did not.
  bool expected_zero = true;
  Real magnitude = 0;
  Real scale = 0;
};

template <std::floating_point Real>
using TaylorOutcome = std::variant<TaylorVerdict<Real>, TaylorRejection<Real>>;

/// Taylor ladder: f(a) = ... = f^(nu-1)(a) = 0 and f^(nu)(a) != 0, each zero
/// test relative to the magnitude sum S_k of the k-th derivative evaluation.
template <std::floating_point Real>
TaylorOutcome<Real> taylor_multiplicity_test(const BasicPolynomial<Real>& f, const BasicComplex<Real>& a,
                                             int nu, Real tol = Real(1e-7)) {
  if (nu < 1) throw Error(ErrorCode::InvalidArgument, "multiplicity must be >= 1");
  if (!(tol > 0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
  const auto vals = evaluate(f, a, nu);
  const auto scales = derivative_scales(f, a, nu);
  TaylorVerdict<Real> verdict;
  verdict.multiplicity = nu;
  for (int k = 0; k <= nu; ++k) {
    const Real mag = std::abs(vals[k]);
    const bool is_zero = mag <= tol * scales[k];
    const bool want_zero = k < nu;
    if (is_zero != want_zero) return TaylorRejection<Real>{k, want_zero, mag, scales[k]};
    verdict.derivative_magnitudes.push_back(mag);
    verdict.scales.push_back(scales[k]);
  }
  return verdict;
}

}  // namespace padepoly
