#pragma once

// Seed generation. On the real axis p = f / (-f') is sampled with step
// delta; a sign change brackets a zero of p (a root of f, or a pole of p at
// a stationary point of f). Brackets are sharpened by regula falsi or its
// accelerated three-point form. The co-function p(-x) sweeps negative roots
// from the positive axis. For complex spectra an Aberth-Ehrlich iteration
// supplies seeds.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "padepoly/polynomial.hpp"
#include "padepoly/refine.hpp"

namespace padepoly {

template <std::floating_point Real>
struct BasicBracket {
  Real lo = 0;
  Real hi = 0;
  Real p_lo = 0;
  Real p_hi = 0;

  /// p goes from positive to negative: the signature of a root of f on the
  /// plain sweep (near a simple zero of p its slope is -1/nu).
  bool falling() const noexcept { return p_lo > 0 && p_hi < 0; }

  void validate() const {
    if (!(lo < hi)) throw Error(ErrorCode::InvalidArgument, "bracket needs lo < hi");
    if (!std::isfinite(p_lo) || !std::isfinite(p_hi) || !(p_lo * p_hi < 0)) {
      throw Error(ErrorCode::InvalidArgument, "bracket endpoints must have p of opposite sign");
    }
  }
};

using Bracket = BasicBracket<double>;

enum class SeedSource { RegulaFalsi, Accelerated, Diagonal, Companion, External };

inline const char* to_string(SeedSource s) noexcept {
  switch (s) {
    case SeedSource::RegulaFalsi: return "regula_falsi";
    case SeedSource::Accelerated: return "accelerated";
    case SeedSource::Diagonal: return "diagonal";
    case SeedSource::Companion: return "companion";
    case SeedSource::External: return "external";
  }
  return "unknown";
}

template <std::floating_point Real>
struct BasicSeed {
  BasicComplex<Real> value;
  SeedSource source = SeedSource::External;
};

using Seed = BasicSeed<double>;

template <std::floating_point Real>
struct BasicSample {
  Real lambda = 0;
  /// Empty where the derivative guard fired.
  std::optional<Real> p;
};

template <std::floating_point Real>
struct BasicExplorationReport {
  std::vector<BasicSample<Real>> samples;
  std::vector<BasicBracket<Real>> brackets;
  std::vector<BasicSeed<Real>> seeds;
  std::vector<std::string> notes;
};

using ExplorationReport = BasicExplorationReport<double>;

namespace detail {

template <std::floating_point Real>
void require_real(const BasicPolynomial<Real>& f) {
  if (!f.is_real()) {
    throw Error(ErrorCode::ComplexCoefficients, "a real-axis scan needs real coefficients");
  }
}

template <std::floating_point Real>
Real real_pade(const BasicPolynomial<Real>& f, Real x, bool co) {
  return pade_eval(f, BasicComplex<Real>(x), co).real();
}

/// As real_pade, but an argument sitting on a multiple root (f and f' both
/// vanish) yields the limit p = 0 instead of an error.
template <std::floating_point Real>
Real real_pade_limit(const BasicPolynomial<Real>& f, Real x, bool co) {
  try {
    return real_pade(f, x, co);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DerivativeVanishes) throw;
    const BasicComplex<Real> at(co ? -x : x);
    if (std::abs(value(f, at)) <= Real(4) * std::numeric_limits<Real>::epsilon() * magnitude_scale(f, at)) {
      return Real(0);
    }
    throw;
  }
}

}  // namespace detail

/// Samples lambda_j = start + j delta for j = 0..max_steps and records every
/// consecutive pair of opposite sign, in either direction.
template <std::floating_point Real>
BasicExplorationReport<Real> scan_sign_changes(const BasicPolynomial<Real>& f, Real delta, Real start,
                                               int max_steps, bool co = false) {
  detail::require_real(f);
  if (!(delta > 0)) throw Error(ErrorCode::InvalidArgument, "scan step must be positive");
  if (max_steps < 0) throw Error(ErrorCode::InvalidArgument, "max_steps must be >= 0");
  if (f.degree() < 1) throw Error(ErrorCode::InvalidArgument, "scan needs degree >= 1");
  BasicExplorationReport<Real> rep;
  rep.samples.reserve(static_cast<std::size_t>(max_steps) + 1);
  for (int j = 0; j <= max_steps; ++j) {
    const Real x = start + Real(j) * delta;
    BasicSample<Real> s{x, std::nullopt};
    try {
      const Real p = detail::real_pade_limit(f, x, co);
      if (std::isfinite(p)) s.p = p;
    } catch (const Error&) {
    }
    if (!s.p) rep.notes.push_back("gap at lambda = " + std::to_string(x));
    if (s.p && *s.p == Real(0)) {
      // A sample on a root brackets nothing; it is its own secant root.
      rep.seeds.push_back({BasicComplex<Real>(co ? -x : x), SeedSource::RegulaFalsi});
      rep.notes.push_back("sample on a root at lambda = " + std::to_string(x));
    }
    rep.samples.push_back(s);
  }
  for (std::size_t j = 1; j < rep.samples.size(); ++j) {
    const auto& a = rep.samples[j - 1];
    const auto& b = rep.samples[j];
    if (a.p && b.p && (*a.p) * (*b.p) < 0) rep.brackets.push_back({a.lambda, b.lambda, *a.p, *b.p});
  }
  return rep;
}

/// lambda_3 = lambda_1 - p_1 / Delta_2 with the secant slope Delta_2.
template <std::floating_point Real>
Real regula_falsi_step(const BasicBracket<Real>& b) {
  b.validate();
  const Real slope = (b.p_hi - b.p_lo) / (b.hi - b.lo);
  if (slope == 0 || !std::isfinite(slope)) throw Error(ErrorCode::FlatSecant, "secant slope is zero");
  Real x = b.lo - b.p_lo / slope;
  // Opposite signs put the secant root inside; rounding can touch an end.
  x = std::clamp(x, b.lo, b.hi);
  return x;
}

/// Three-point accelerated regula falsi, started from lambda_1 = lo,
/// lambda_2 = hi. Rows hold lambda_3, lambda_4, ... with step to the next
/// iterate; the last row has step 0. Stops when |p| <= 10^-sigma.
template <std::floating_point Real>
BasicIterationTrace<Real> accelerated_regula_falsi(const BasicPolynomial<Real>& f, const BasicBracket<Real>& b,
                                                   int sigma = 5, int max_rounds = 60, bool co = false) {
  using C = BasicComplex<Real>;
  detail::require_real(f);
  b.validate();
  if (sigma < 1) throw Error(ErrorCode::InvalidArgument, "sigma must be >= 1");
  if (max_rounds < 1) throw Error(ErrorCode::InvalidArgument, "max_rounds must be >= 1");
  const Real threshold = std::pow(Real(10), Real(-sigma));
  BasicIterationTrace<Real> trace;

  Real l1 = b.lo, l2 = b.hi, p1 = b.p_lo, p2 = b.p_hi;
  Real l3 = regula_falsi_step(b);
  Real p3;
  try {
    p3 = detail::real_pade_limit(f, l3, co);
  } catch (const Error& e) {
    trace.status = IterationStatus::NumericalError;
    trace.notes.emplace_back(e.what());
    trace.rows.push_back({C(l3), C(0)});
    return trace;
  }

  for (int round = 0; round < max_rounds; ++round) {
    if (std::abs(p3) <= threshold) {
      trace.rows.push_back({C(l3), C(0)});
      trace.status = IterationStatus::Converged;
      trace.residual = std::abs(p3);
      return trace;
    }
    const Real d2 = (p2 - p1) / (l2 - l1);
    const Real d3 = (p3 - p1) / (l3 - l1);
    const Real q2 = p2 / p1;
    const Real q3 = p3 / p1;
    const Real den = q2 * d3 - q3 * d2;
    Real l4 = l1 - (p2 - p3) / den;
    if (!(std::isfinite(l4)) || den == 0) {
      // Secant on the two most recent points of opposite sign.
      Real a = l3, pa = p3, c = l2, pc = p2;
      if (!(p3 * p2 < 0)) {
        c = l1;
        pc = p1;
      }
      if (!(pa * pc < 0)) {
        trace.rows.push_back({C(l3), C(0)});
        trace.status = IterationStatus::NumericalError;
        trace.residual = std::abs(p3);
        trace.notes.emplace_back("accelerated denominator vanished and no sign change remains");
        return trace;
      }
      BasicBracket<Real> fb{std::min(a, c), std::max(a, c), a < c ? pa : pc, a < c ? pc : pa};
      if (!(fb.lo < fb.hi)) {
        trace.rows.push_back({C(l3), C(0)});
        trace.status = IterationStatus::NumericalError;
        trace.residual = std::abs(p3);
        trace.notes.emplace_back("bracket collapsed");
        return trace;
      }
      l4 = regula_falsi_step(fb);
      trace.notes.emplace_back("round " + std::to_string(round + 1) +
                               ": accelerated denominator vanished, plain regula falsi used");
    }
    trace.rows.push_back({C(l3), C(l4) - C(l3)});
    Real p4;
    try {
      p4 = detail::real_pade_limit(f, l4, co);
    } catch (const Error& e) {
      trace.rows.push_back({C(l4), C(0)});
      trace.status = IterationStatus::NumericalError;
      trace.notes.emplace_back(e.what());
      return trace;
    }
    l1 = l2;
    p1 = p2;
    l2 = l3;
    p2 = p3;
    l3 = l4;
    p3 = p4;
  }
  if (std::abs(p3) <= threshold) {
    trace.rows.push_back({C(l3), C(0)});
    trace.status = IterationStatus::Converged;
  } else {
    trace.rows.push_back({C(l3), C(0)});
    trace.status = IterationStatus::MaxIters;
  }
  trace.residual = std::abs(p3);
  return trace;
}

template <std::floating_point Real>
struct BasicExploreOptions {
  /// Scan step; 0 picks (Cauchy bound) / 200.
  Real delta = 0;
  Real start = 0;
  /// 0 extends the scan past the Cauchy bound.
  int max_steps = 0;
  /// Accelerated stop exponent; seeds are taken from the accelerated scheme
  /// when true, from a single regula falsi step otherwise.
  bool accelerate = true;
  int sigma = 5;
  int max_rounds = 60;
};

using ExploreOptions = BasicExploreOptions<double>;

/// Plain sweep plus co-sweep over [start, start + max_steps delta]. Only
/// brackets with the root orientation are turned into seeds (falling for
/// the plain sweep, rising for the co-sweep); co-sweep seeds are negated.
/// The co brackets are reported as found, on the positive axis.
template <std::floating_point Real>
BasicExplorationReport<Real> explore_real_axis(const BasicPolynomial<Real>& f,
                                               const BasicExploreOptions<Real>& opt = {}) {
  detail::require_real(f);
  const Real bound = cauchy_bound(f);
  const Real delta = opt.delta > 0 ? opt.delta : bound / Real(200);
  int steps = opt.max_steps;
  if (steps <= 0) {
    const Real reach = std::max(Real(0), bound - opt.start);
    steps = static_cast<int>(std::ceil(reach / delta)) + 1;
  }
  BasicExplorationReport<Real> out;
  for (bool co : {false, true}) {
    auto rep = scan_sign_changes(f, delta, opt.start, steps, co);
    const Real sign = co ? Real(-1) : Real(1);
    for (auto b : rep.brackets) {
      const bool root_like = co ? (b.p_lo < 0 && b.p_hi > 0) : b.falling();
      out.brackets.push_back(b);
      if (!root_like) continue;
      try {
        if (opt.accelerate) {
          auto t = accelerated_regula_falsi(f, b, opt.sigma, opt.max_rounds, co);
          if (!t.converged()) {
            out.notes.push_back("bracket (" + std::to_string(b.lo) + ", " + std::to_string(b.hi) +
                                ") dropped: accelerated scheme did not reach the stop rule");
            continue;
          }
          out.seeds.push_back({BasicComplex<Real>(sign * t.final_value().real()), SeedSource::Accelerated});
        } else {
          out.seeds.push_back({BasicComplex<Real>(sign * regula_falsi_step(b)), SeedSource::RegulaFalsi});
        }
      } catch (const Error& e) {
        out.notes.push_back(e.what());
      }
    }
    for (const auto& s : rep.seeds) out.seeds.push_back(s);
    for (auto& s : rep.samples) out.samples.push_back(co ? BasicSample<Real>{-s.lambda, s.p} : s);
    for (auto& n : rep.notes) out.notes.push_back(std::move(n));
  }
  // Roots at the origin show up in both sweeps.
  std::vector<BasicSeed<Real>> unique;
  for (const auto& s : out.seeds) {
    const bool dup = std::any_of(unique.begin(), unique.end(), [&](const BasicSeed<Real>& u) {
      return same_root(u.value, s.value, Real(1e-8)) || std::abs(u.value - s.value) <= delta * Real(1e-6);
    });
    if (!dup) unique.push_back(s);
  }
  out.seeds = std::move(unique);
  std::stable_sort(out.samples.begin(), out.samples.end(),
                   [](const BasicSample<Real>& a, const BasicSample<Real>& b) { return a.lambda < b.lambda; });
  return out;
}

template <std::floating_point Real>
struct BasicCompanionSeeds {
  std::vector<BasicComplex<Real>> seeds;
  bool low_confidence = false;
};

using CompanionSeeds = BasicCompanionSeeds<double>;

/// All m roots at once by the Aberth-Ehrlich iteration from a perturbed
/// circle of starting points (fixed angles, no randomness). Seeds only.
template <std::floating_point Real>
BasicCompanionSeeds<Real> companion_seed_all(const BasicPolynomial<Real>& f, int max_iters = 500) {
  using C = BasicComplex<Real>;
  if (f.degree() < 1) throw Error(ErrorCode::InvalidArgument, "companion seeds need degree >= 1");
  const int m = f.degree();
  const auto a = f.coeffs();
  BasicCompanionSeeds<Real> out;
  if (m == 1) {
    out.seeds.push_back(-a[0] / a[1]);
    return out;
  }
  // Radius: geometric mean of the root moduli when a_0 != 0, else the bound.
  Real radius;
  if (std::abs(a[0]) > 0) {
    radius = std::pow(std::abs(a[0]) / std::abs(a.back()), Real(1) / Real(m));
  } else {
    radius = cauchy_bound(f) / Real(2);
  }
  if (!(radius > 0) || !std::isfinite(radius)) radius = Real(1);
  const C centroid = -a[static_cast<std::size_t>(m - 1)] / (Real(m) * a.back());
  std::vector<C> z(static_cast<std::size_t>(m));
  const Real tau = Real(2) * std::numbers::pi_v<Real>;
  for (int k = 0; k < m; ++k) {
    const Real angle = tau * Real(k) / Real(m) + Real(0.4);
    const Real r = radius * (Real(1) + Real(0.05) * Real(k % 3));
    z[static_cast<std::size_t>(k)] = centroid + std::polar(r, angle);
  }
  std::vector<bool> done(static_cast<std::size_t>(m), false);
  const Real eps = std::numeric_limits<Real>::epsilon();
  for (int it = 0; it < max_iters; ++it) {
    bool all_done = true;
    for (int k = 0; k < m; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      if (done[ku]) continue;
      const auto v = evaluate(f, z[ku], 1);
      if (std::abs(v[0]) <= Real(4) * eps * magnitude_scale(f, z[ku])) {
        done[ku] = true;
        continue;
      }
      all_done = false;
      if (!(std::abs(v[1]) > underflow_floor<Real>())) {
        z[ku] += C(radius * Real(1e-3), radius * Real(1e-3));
        continue;
      }
      const C w = v[0] / v[1];
      C s(0);
      for (int j = 0; j < m; ++j) {
        if (j == k) continue;
        const C diff = z[ku] - z[static_cast<std::size_t>(j)];
        if (std::abs(diff) > 0) s += Real(1) / diff;
      }
      const C den = Real(1) - w * s;
      const C corr = std::abs(den) > 0 ? w / den : w;
      z[ku] -= corr;
      if (std::abs(corr) <= eps * (Real(1) + std::abs(z[ku]))) done[ku] = true;
    }
    if (all_done) break;
  }
  for (const auto& zk : z) {
    if (!(std::abs(value(f, zk)) <= Real(1e-8) * magnitude_scale(f, zk)) || !is_finite(zk)) {
      out.low_confidence = true;
    }
  }
  out.seeds = std::move(z);
  return out;
}

}  // namespace padepoly
