#pragma once

// ECP representation of a degree-m polynomial through m pairwise distinct
// interpolation values s_k:
//
//   f(x) / a_m = prod_j (x - s_j) (1 - S_1(x)),   S_1(x) = sum_j d_j / (s_j - x)
//
// with defects d_k = f(s_k) / (a_m prod_{j != k} (s_k - s_j)) and main
// values H_k = s_k - d_k. The roots of f are the eigenvalues of
// E = Diag(s) - 1 d^T and the zeros of S_1 - 1. Evolution replaces s by H.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "padepoly/polynomial.hpp"
#include "padepoly/refine.hpp"

namespace padepoly {

template <std::floating_point Real>
struct EcpRow {
  BasicComplex<Real> sigma;
  BasicComplex<Real> defect;
  BasicComplex<Real> main_value;
};

template <std::floating_point Real>
struct BasicEcpList {
  std::vector<EcpRow<Real>> rows;
  BasicComplex<Real> leading;
  BasicComplex<Real> subleading;

  int degree() const noexcept { return static_cast<int>(rows.size()); }

  Real max_defect() const {
    Real mx = 0;
    for (const auto& r : rows) mx = std::max(mx, std::abs(r.defect));
    return mx;
  }

  std::vector<BasicComplex<Real>> sigmas() const {
    std::vector<BasicComplex<Real>> out;
    for (const auto& r : rows) out.push_back(r.sigma);
    return out;
  }

  std::vector<BasicComplex<Real>> main_values() const {
    std::vector<BasicComplex<Real>> out;
    for (const auto& r : rows) out.push_back(r.main_value);
    return out;
  }
};

using EcpList = BasicEcpList<double>;

template <std::floating_point Real>
using BasicEcpMatrix = Eigen::Matrix<BasicComplex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

using EcpMatrix = BasicEcpMatrix<double>;

/// Minimum pairwise distance of interpolation values: 1e-12 (1 + max |s|).
template <std::floating_point Real>
Real separation_threshold(const std::vector<BasicComplex<Real>>& sigma) {
  Real mx = 0;
  for (const auto& s : sigma) mx = std::max(mx, std::abs(s));
  return Real(1e-12) * (Real(1) + mx);
}

namespace detail {

template <std::floating_point Real>
void check_separation(const std::vector<BasicComplex<Real>>& sigma, ErrorCode code) {
  const Real tol = separation_threshold(sigma);
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    for (std::size_t j = i + 1; j < sigma.size(); ++j) {
      if (std::abs(sigma[i] - sigma[j]) <= tol) {
        throw Error(code, "values " + std::to_string(i + 1) + " and " + std::to_string(j + 1) + " coincide");
      }
    }
  }
}

}  // namespace detail

template <std::floating_point Real>
BasicEcpList<Real> build_ecp_list(const BasicPolynomial<Real>& f, const std::vector<BasicComplex<Real>>& sigma,
                                  ErrorCode collision = ErrorCode::CoincidentInterpolation) {
  const int m = f.degree();
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "ECP list needs degree >= 1");
  if (static_cast<int>(sigma.size()) != m) {
    throw Error(ErrorCode::InvalidArgument, "need exactly " + std::to_string(m) + " interpolation values, got " +
                                                std::to_string(sigma.size()));
  }
  for (const auto& s : sigma) {
    if (!is_finite(s)) throw Error(ErrorCode::InvalidArgument, "non-finite interpolation value");
  }
  detail::check_separation(sigma, collision);
  BasicEcpList<Real> list;
  list.leading = f.leading();
  list.subleading = f[static_cast<std::size_t>(m - 1)];
  for (int k = 0; k < m; ++k) {
    const auto& sk = sigma[static_cast<std::size_t>(k)];
    BasicComplex<Real> g(1);
    for (int j = 0; j < m; ++j) {
      if (j != k) g *= sk - sigma[static_cast<std::size_t>(j)];
    }
    const BasicComplex<Real> den = g * list.leading;
    if (!(std::abs(den) > underflow_floor<Real>()) || !is_finite(den)) {
      throw Error(ErrorCode::ClusteredInterpolation, "product of differences underflows at row " +
                                                         std::to_string(k + 1));
    }
    const BasicComplex<Real> d = value(f, sk) / den;
    list.rows.push_back({sk, d, sk - d});
  }
  return list;
}

template <std::floating_point Real>
struct SumControl {
  BasicComplex<Real> expected;
  BasicComplex<Real> actual;
  Real discrepancy = 0;
};

/// sum H_j against -a_(m-1) / a_m.
template <std::floating_point Real>
SumControl<Real> sum_control(const BasicEcpList<Real>& L) {
  SumControl<Real> out;
  out.expected = -L.subleading / L.leading;
  out.actual = BasicComplex<Real>(0);
  for (const auto& r : L.rows) out.actual += r.main_value;
  out.discrepancy = std::abs(out.actual - out.expected) / (Real(1) + std::abs(out.expected));
  return out;
}

template <std::floating_point Real>
BasicEcpMatrix<Real> ecp_matrix(const BasicEcpList<Real>& L) {
  const auto m = static_cast<Eigen::Index>(L.rows.size());
  BasicEcpMatrix<Real> E(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const auto& r = L.rows[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i < m; ++i) E(i, j) = -r.defect;
    E(j, j) = r.main_value;
  }
  return E;
}

template <std::floating_point Real>
struct EcpSums {
  BasicComplex<Real> s1{0};
  BasicComplex<Real> s2{0};
  BasicComplex<Real> s_sigma{0};
  /// sum |d_j / (s_j - x)|, the magnitude scale of S_1.
  Real scale = 0;
  /// Error magnitudes of S_1, S_2 and S_sigma in units of the rounding
  /// level. Each term is weighted by 1 + c_j per division by s_j - x, with
  /// c_j = (|s_j| + |x|) / |s_j - x| the cancellation in the difference.
  Real err1 = 0;
  Real err2 = 0;
  Real err_sigma = 0;
};

/// S_1, S_2 and S_sigma at x, summed in row order.
template <std::floating_point Real>
EcpSums<Real> ecp_sums(const BasicEcpList<Real>& L, const BasicComplex<Real>& x) {
  EcpSums<Real> s;
  for (std::size_t k = 0; k < L.rows.size(); ++k) {
    const auto& r = L.rows[k];
    const BasicComplex<Real> diff = r.sigma - x;
    if (!(std::abs(diff) > underflow_floor<Real>())) {
      throw Error(ErrorCode::InvalidArgument, "argument coincides with interpolation value " +
                                                  std::to_string(k + 1));
    }
    const BasicComplex<Real> t = r.defect / diff;
    s.s1 += t;
    s.s2 += t / diff;
    s.s_sigma += t * r.sigma / diff;
    s.scale += std::abs(t);
    const Real c = (std::abs(r.sigma) + std::abs(x)) / std::abs(diff);
    s.err1 += std::abs(t) * (Real(1) + c);
    s.err2 += std::abs(t / diff) * (Real(1) + Real(2) * c);
    s.err_sigma += std::abs(t * r.sigma / diff) * (Real(1) + Real(2) * c);
  }
  return s;
}

namespace detail {

template <std::floating_point Real>
auto ecp_residual(const BasicEcpList<Real>& L) {
  return [&L](const BasicComplex<Real>& x) {
    try {
      const auto s = ecp_sums(L, x);
      return std::pair<Real, Real>{std::abs(s.s1 - Real(1)), Real(1) + s.err1};
    } catch (const Error&) {
      return std::pair<Real, Real>{std::numeric_limits<Real>::infinity(), Real(1)};
    }
  };
}

template <std::floating_point Real>
Real ecp_radius(const BasicEcpList<Real>& L, const BasicIterationSettings<Real>& s) {
  Real mx = 0;
  for (const auto& r : L.rows) mx = std::max(mx, std::abs(r.sigma) + std::abs(r.defect) * Real(L.rows.size()));
  return s.divergence_factor * (Real(1) + mx);
}

/// Relative rounding level of the ECP sums.
template <std::floating_point Real>
Real ecp_noise(const BasicEcpList<Real>& L) {
  return Real(4) * Real(L.rows.size() + 1) * std::numeric_limits<Real>::epsilon();
}

template <std::floating_point Real>
BasicComplex<Real> checked_s2(const EcpSums<Real>& s) {
  if (!(std::abs(s.s2) > underflow_floor<Real>())) {
    throw Error(ErrorCode::RayleighDenominatorVanishes, "S_2 is zero at the iterate");
  }
  return s.s2;
}

}  // namespace detail

/// Rayleigh quotient iteration x <- R(x) with R = (S_sigma - S_1^2) / S_2.
/// R(x) is itself the new estimate, so each row stores step = R(x) - x.
template <std::floating_point Real>
BasicIterationTrace<Real> rayleigh_iterate(const BasicEcpList<Real>& L, const BasicComplex<Real>& seed,
                                           const BasicIterationSettings<Real>& s = {}) {
  if (L.rows.empty()) throw Error(ErrorCode::InvalidArgument, "empty ECP list");
  return detail::run_iteration<Real>(
      seed, s, detail::ecp_radius(L, s),
      [&L](const BasicComplex<Real>& x) {
        const auto sums = ecp_sums(L, x);
        const auto s2 = detail::checked_s2(sums);
        const BasicComplex<Real> r = (sums.s_sigma - sums.s1 * sums.s1) / s2;
        const Real noise = detail::ecp_noise(L) *
                           (sums.err_sigma + Real(2) * std::abs(sums.s1) * sums.err1 + std::abs(r) * sums.err2) /
                           std::abs(s2);
        return detail::StepEval<Real>{r - x, noise};
      },
      detail::ecp_residual(L));
}

/// Newton on the reduced equation S_1 - 1 = 0: x <- x + (S_1 - 1) / (-S_2).
template <std::floating_point Real>
BasicIterationTrace<Real> reduced_pade_iterate(const BasicEcpList<Real>& L, const BasicComplex<Real>& seed,
                                               const BasicIterationSettings<Real>& s = {}) {
  if (L.rows.empty()) throw Error(ErrorCode::InvalidArgument, "empty ECP list");
  return detail::run_iteration<Real>(
      seed, s, detail::ecp_radius(L, s),
      [&L](const BasicComplex<Real>& x) {
        const auto sums = ecp_sums(L, x);
        const auto s2 = detail::checked_s2(sums);
        const BasicComplex<Real> step = (sums.s1 - Real(1)) / (-s2);
        const Real noise = detail::ecp_noise(L) * (Real(1) + sums.err1 + std::abs(step) * sums.err2) / std::abs(s2);
        return detail::StepEval<Real>{step, noise};
      },
      detail::ecp_residual(L));
}

/// Rebuilds the list on the main values.
template <std::floating_point Real>
BasicEcpList<Real> evolve(const BasicEcpList<Real>& L, const BasicPolynomial<Real>& f) {
  return build_ecp_list(f, L.main_values(), ErrorCode::EvolutionCollision);
}

template <std::floating_point Real>
struct BasicEvolutionHistory {
  /// lists[0] is the starting list; each further entry is one evolution.
  std::vector<BasicEcpList<Real>> lists;
  bool reached_threshold = false;
  std::string stop_reason;
};

using EvolutionHistory = BasicEvolutionHistory<double>;

/// Evolves until max |d| <= 1e-12 (1 + max |H|) or max_evolutions is hit.
/// A collision stops the run and is recorded, keeping the lists so far.
template <std::floating_point Real>
BasicEvolutionHistory<Real> evolve_until(const BasicPolynomial<Real>& f, const std::vector<BasicComplex<Real>>& sigma,
                                         int max_evolutions = 20, Real rel_threshold = Real(1e-12)) {
  BasicEvolutionHistory<Real> h;
  h.lists.push_back(build_ecp_list(f, sigma));
  auto small = [&](const BasicEcpList<Real>& L) {
    Real mh = 0;
    for (const auto& r : L.rows) mh = std::max(mh, std::abs(r.main_value));
    return L.max_defect() <= rel_threshold * (Real(1) + mh);
  };
  for (int k = 0; k < max_evolutions; ++k) {
    if (small(h.lists.back())) {
      h.reached_threshold = true;
      h.stop_reason = "defects below threshold";
      return h;
    }
    try {
      h.lists.push_back(evolve(h.lists.back(), f));
    } catch (const Error& e) {
      h.stop_reason = e.what();
      return h;
    }
  }
  h.reached_threshold = small(h.lists.back());
  h.stop_reason = h.reached_threshold ? "defects below threshold" : "evolution budget exhausted";
  return h;
}

template <std::floating_point Real>
struct BasicGershgorinDisk {
  BasicComplex<Real> center;
  Real radius = 0;
  bool separated = false;
  /// True when the enclosed eigenvalue is known to be real.
  bool real_interval = false;
  /// Open enclosures for the real and imaginary parts (separated disks).
  Real re_lo = 0, re_hi = 0, im_lo = 0, im_hi = 0;

  bool contains(const BasicComplex<Real>& z, Real slack = Real(0)) const {
    return std::abs(z - center) <= radius + slack;
  }
};

using GershgorinDisk = BasicGershgorinDisk<double>;

/// Column disks of E: center H_k, radius (m - 1) |d_k|.
template <std::floating_point Real>
std::vector<BasicGershgorinDisk<Real>> gershgorin_enclosures(const BasicEcpList<Real>& L) {
  const std::size_t m = L.rows.size();
  std::vector<BasicGershgorinDisk<Real>> disks(m);
  bool all_real = true;
  for (const auto& r : L.rows) {
    if (r.defect.imag() != 0 || r.sigma.imag() != 0) all_real = false;
  }
  for (std::size_t k = 0; k < m; ++k) {
    disks[k].center = L.rows[k].main_value;
    disks[k].radius = Real(m - 1) * std::abs(L.rows[k].defect);
  }
  for (std::size_t k = 0; k < m; ++k) {
    auto& dk = disks[k];
    dk.separated = true;
    for (std::size_t j = 0; j < m; ++j) {
      if (j != k && std::abs(dk.center - disks[j].center) <= dk.radius + disks[j].radius) {
        dk.separated = false;
        break;
      }
    }
    if (!dk.separated) continue;
    dk.re_lo = dk.center.real() - dk.radius;
    dk.re_hi = dk.center.real() + dk.radius;
    // A real matrix has a conjugation-symmetric spectrum; a separated disk on
    // the real axis therefore holds a real eigenvalue.
    dk.real_interval = all_real && dk.center.imag() == 0;
    if (dk.real_interval) {
      dk.im_lo = dk.im_hi = 0;
    } else {
      dk.im_lo = dk.center.imag() - dk.radius;
      dk.im_hi = dk.center.imag() + dk.radius;
    }
  }
  return disks;
}

}  // namespace padepoly
