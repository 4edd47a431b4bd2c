#pragma once

// Fixed-point refinement: the Pade iteration L <- L + p(L), Halley's
// iteration L <- L + h(L), and the test-polynomial probes
// L <- L + P_nu(L) L with P_nu = f_(nu-1) / f_nu. A probe converges
// quadratically only when nu equals the multiplicity of the nearby root;
// detect_multiplicity runs nu = 1..nu_max from one seed and keeps the
// probe that converges and passes the Taylor ladder.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "padepoly/polynomial.hpp"

namespace padepoly {

template <std::floating_point Real>
struct BasicIterationSettings {
  int max_iters = 100;
  /// Relative step threshold: |step| <= step_tol (1 + |L|).
  Real step_tol = Real(1e-12);
  /// Residual threshold relative to the magnitude sum of f at L.
  Real residual_tol = Real(1e-10);
  /// Divergence when |L| > divergence_factor (1 + Cauchy bound); also the
  /// per-step contraction factor a converged probe must show.
  Real divergence_factor = Real(10);
  /// A run of this many steps each at least slow_ratio times the previous
  /// one is linear, not quadratic, contraction: no convergence.
  int slow_window = 20;
  Real slow_ratio = Real(0.4);

  void validate() const {
    if (max_iters < 1) throw Error(ErrorCode::InvalidArgument, "max_iters must be >= 1");
    if (!(step_tol > 0) || !(residual_tol > 0)) {
      throw Error(ErrorCode::InvalidArgument, "tolerances must be positive");
    }
    if (!(divergence_factor > 1)) throw Error(ErrorCode::InvalidArgument, "divergence_factor must exceed 1");
    if (slow_window < 1 || !(slow_ratio > 0)) throw Error(ErrorCode::InvalidArgument, "bad slow-contraction rule");
  }
};

using IterationSettings = BasicIterationSettings<double>;

enum class IterationStatus { Converged, MaxIters, Diverged, NumericalError };

inline const char* to_string(IterationStatus s) noexcept {
  switch (s) {
    case IterationStatus::Converged: return "converged";
    case IterationStatus::MaxIters: return "max_iters";
    case IterationStatus::Diverged: return "diverged";
    case IterationStatus::NumericalError: return "numerical_error";
  }
  return "unknown";
}

template <std::floating_point Real>
struct IterationRow {
  BasicComplex<Real> value;
  BasicComplex<Real> step;
  /// Rounding uncertainty of the step; 0 where none was estimated.
  Real noise = 0;
};

template <std::floating_point Real>
struct BasicIterationTrace {
  std::vector<IterationRow<Real>> rows;
  IterationStatus status = IterationStatus::MaxIters;
  /// Residual measure at the final iterate (method specific).
  Real residual = 0;
  /// Free-form diagnostics: why the run stopped, fallbacks taken.
  std::vector<std::string> notes;

  bool converged() const noexcept { return status == IterationStatus::Converged; }
  std::size_t size() const noexcept { return rows.size(); }

  /// The iterate after the last recorded step.
  BasicComplex<Real> final_value() const {
    if (rows.empty()) return {};
    return rows.back().value + rows.back().step;
  }
};

using IterationTrace = BasicIterationTrace<double>;

namespace detail {

template <std::floating_point Real>
bool step_is_small(const IterationRow<Real>& row, Real step_tol) {
  return std::abs(row.step) <= std::max(step_tol * (Real(1) + std::abs(row.value)), row.noise);
}

/// A step together with the rounding uncertainty of its evaluation. A step
/// below its own noise level cannot shrink further and counts as small.
template <std::floating_point Real>
struct StepEval {
  BasicComplex<Real> step;
  Real noise = 0;
};

/// Drives L_{j+1} = L_j + step(L_j). `step_fn` returns the step or a
/// StepEval; `residual_fn` maps an iterate to a (value, scale) pair and the
/// residual test is value <= residual_tol * scale.
template <std::floating_point Real, class StepFn, class ResidualFn>
BasicIterationTrace<Real> run_iteration(BasicComplex<Real> seed, const BasicIterationSettings<Real>& s,
                                        Real divergence_radius, StepFn&& step_fn,
                                        ResidualFn&& residual_fn) {
  using C = BasicComplex<Real>;
  s.validate();
  BasicIterationTrace<Real> trace;
  C x = seed;
  int slow_run = 0;
  int stagnant = 0;
  for (int j = 0; j < s.max_iters; ++j) {
    StepEval<Real> ev;
    try {
      if constexpr (std::is_same_v<std::decay_t<std::invoke_result_t<StepFn&, const C&>>, StepEval<Real>>) {
        ev = step_fn(x);
      } else {
        ev.step = step_fn(x);
      }
    } catch (const Error& e) {
      trace.status = IterationStatus::NumericalError;
      trace.notes.emplace_back(e.what());
      trace.rows.push_back({x, C(0)});
      trace.residual = residual_fn(x).first;
      return trace;
    }
    if (!is_finite(ev.step)) {
      trace.status = IterationStatus::NumericalError;
      trace.notes.emplace_back("non-finite step");
      trace.rows.push_back({x, C(0)});
      trace.residual = residual_fn(x).first;
      return trace;
    }
    trace.rows.push_back({x, ev.step, std::isfinite(ev.noise) ? ev.noise : Real(0)});
    const auto& cur = trace.rows.back();
    const C next = x + ev.step;
    const std::size_t n = trace.rows.size();

    if (n >= 2) {
      const auto& prev = trace.rows[n - 2];
      const bool cur_small = step_is_small(cur, s.step_tol);
      if (step_is_small(prev, s.step_tol) && cur_small) {
        const auto [res, scale] = residual_fn(next);
        trace.residual = res;
        if (res <= s.residual_tol * scale) {
          trace.status = IterationStatus::Converged;
          return trace;
        }
        // Steps at rounding level away from a root: a spurious fixed point.
        if (++stagnant >= 3) {
          trace.status = IterationStatus::MaxIters;
          trace.notes.emplace_back("stagnated: steps at rounding level but residual test fails");
          return trace;
        }
      } else {
        stagnant = 0;
      }
      const Real prev_mag = std::abs(prev.step);
      if (!cur_small && prev_mag > 0 && std::abs(ev.step) >= s.slow_ratio * prev_mag) {
        if (++slow_run >= s.slow_window) {
          trace.status = IterationStatus::MaxIters;
          trace.residual = residual_fn(next).first;
          trace.notes.emplace_back("linear contraction: no quadratic convergence");
          return trace;
        }
      } else {
        slow_run = 0;
      }
    }
    if (!is_finite(next) || std::abs(next) > divergence_radius) {
      trace.status = IterationStatus::Diverged;
      trace.residual = std::numeric_limits<Real>::infinity();
      return trace;
    }
    x = next;
  }
  trace.status = IterationStatus::MaxIters;
  trace.residual = residual_fn(trace.final_value()).first;
  return trace;
}

/// Rounding uncertainty of p = f / (-f') at x.
template <std::floating_point Real>
Real pade_noise(const BasicPolynomial<Real>& f, const BasicComplex<Real>& x, const BasicComplex<Real>& p) {
  const auto v = evaluate(f, x, 1);
  const auto sc = derivative_scales(f, x, 1);
  const Real eps = std::numeric_limits<Real>::epsilon();
  return Real(4) * Real(f.degree() + 1) * eps * (sc[0] + std::abs(p) * sc[1]) / std::abs(v[1]);
}

template <std::floating_point Real>
auto polynomial_residual(const BasicPolynomial<Real>& f) {
  return [&f](const BasicComplex<Real>& x) {
    return std::pair<Real, Real>{std::abs(value(f, x)), magnitude_scale(f, x)};
  };
}

template <std::floating_point Real>
Real divergence_radius(const BasicPolynomial<Real>& f, const BasicIterationSettings<Real>& s) {
  return s.divergence_factor * (Real(1) + cauchy_bound(f));
}

}  // namespace detail

/// L_{j+1} = L_j + p(L_j) with p = f / (-f').
template <std::floating_point Real>
BasicIterationTrace<Real> iterate_pade(const BasicPolynomial<Real>& f, const BasicComplex<Real>& seed,
                                       const BasicIterationSettings<Real>& s = {}) {
  if (f.degree() < 1) throw Error(ErrorCode::InvalidArgument, "Pade iteration needs degree >= 1");
  return detail::run_iteration<Real>(
      seed, s, detail::divergence_radius(f, s),
      [&f](const BasicComplex<Real>& x) {
        const auto p = pade_eval(f, x);
        return detail::StepEval<Real>{p, detail::pade_noise(f, x, p)};
      },
      detail::polynomial_residual(f));
}

/// L_{j+1} = L_j + h(L_j) with Halley's function h.
template <std::floating_point Real>
BasicIterationTrace<Real> iterate_halley(const BasicPolynomial<Real>& f, const BasicComplex<Real>& seed,
                                         const BasicIterationSettings<Real>& s = {}) {
  if (f.degree() < 1) throw Error(ErrorCode::InvalidArgument, "Halley iteration needs degree >= 1");
  if (f.degree() == 1) return iterate_pade(f, seed, s);  // h = p for linear f
  return detail::run_iteration<Real>(
      seed, s, detail::divergence_radius(f, s),
      [&f](const BasicComplex<Real>& x) {
        const auto h = halley_eval(f, x);
        return detail::StepEval<Real>{h, detail::pade_noise(f, x, h)};
      },
      detail::polynomial_residual(f));
}

enum class TestForm {
  /// L_{j+1} = L_j + p_nu(L_j), p_nu = P_nu L.
  Additive,
  /// L_{j+1} = (1 + P_nu(L_j)) L_j.
  Multiplicative,
};

/// |seed| at or below this is rejected by the test-polynomial probes: L = 0
/// is a spurious fixed point of L <- (1 + P_nu) L.
template <std::floating_point Real>
Real origin_guard(const BasicPolynomial<Real>& f) {
  return Real(1e-8) * (Real(1) + cauchy_bound(f));
}

/// Probe for a root of multiplicity nu via P_nu = f_(nu-1) / f_nu.
template <std::floating_point Real>
BasicIterationTrace<Real> iterate_test_nu(const BasicPolynomial<Real>& f, int nu, const BasicComplex<Real>& seed,
                                          const BasicIterationSettings<Real>& s = {},
                                          TestForm form = TestForm::Additive) {
  if (nu < 1) throw Error(ErrorCode::InvalidArgument, "nu must be >= 1");
  if (f.degree() < 1) throw Error(ErrorCode::InvalidArgument, "test-polynomial probe needs degree >= 1");
  const Real guard = origin_guard(f);
  if (std::abs(seed) <= guard) {
    throw Error(ErrorCode::SeedNearOrigin, "shift the polynomial by lambda -> lambda + c first");
  }
  const auto lower = test_polynomial(f, nu - 1);
  const auto upper = test_polynomial(f, nu);
  const Real eps = std::numeric_limits<Real>::epsilon();
  // P_nu at x and its rounding level from the magnitude sums of both factors.
  auto ratio = [&](const BasicComplex<Real>& x) {
    if (std::abs(x) <= guard) throw Error(ErrorCode::SeedNearOrigin, "iterate collapsed onto the origin");
    if (upper.is_zero()) throw Error(ErrorCode::TestPolynomialVanishes, "f_nu is identically zero");
    const BasicComplex<Real> den = value(upper, x);
    if (!(std::abs(den) > underflow_floor<Real>())) {
      throw Error(ErrorCode::TestPolynomialVanishes, "f_nu vanishes at the iterate");
    }
    const bool flat = lower.is_zero();
    const BasicComplex<Real> q = (flat ? BasicComplex<Real>(0) : value(lower, x)) / den;
    const Real mag = (flat ? Real(0) : magnitude_scale(lower, x)) + std::abs(q) * magnitude_scale(upper, x);
    return std::pair{q, Real(4) * Real(f.degree() + 1) * eps * mag / std::abs(den)};
  };
  if (form == TestForm::Additive) {
    return detail::run_iteration<Real>(
        seed, s, detail::divergence_radius(f, s),
        [&](const BasicComplex<Real>& x) {
          const auto [q, n] = ratio(x);
          return detail::StepEval<Real>{q * x, n * std::abs(x)};
        },
        detail::polynomial_residual(f));
  }
  return detail::run_iteration<Real>(
      seed, s, detail::divergence_radius(f, s),
      [&](const BasicComplex<Real>& x) {
        const auto [q, n] = ratio(x);
        return detail::StepEval<Real>{(Real(1) + q) * x - x, (n + eps) * std::abs(x)};
      },
      detail::polynomial_residual(f));
}

template <std::floating_point Real>
struct BasicMultiplicityVerdict {
  BasicComplex<Real> root;
  int multiplicity = 0;
  /// Probe trace for nu = 1..nu_max (index nu - 1).
  std::vector<BasicIterationTrace<Real>> probes;
  /// Whether each probe passed the convergence classification.
  std::vector<bool> probe_converged;
  TaylorVerdict<Real> taylor;
};

using MultiplicityVerdict = BasicMultiplicityVerdict<double>;

template <std::floating_point Real>
class AmbiguousMultiplicityError : public Error {
 public:
  AmbiguousMultiplicityError(std::vector<std::pair<int, BasicComplex<Real>>> candidates, const std::string& detail)
      : Error(ErrorCode::AmbiguousMultiplicity, detail), candidates_(std::move(candidates)) {}

  const std::vector<std::pair<int, BasicComplex<Real>>>& candidates() const noexcept { return candidates_; }

 private:
  std::vector<std::pair<int, BasicComplex<Real>>> candidates_;
};

/// Converged status plus quadratic-looking contraction. Only steps above
/// their floor (step tolerance or rounding level) are judged: up to three
/// consecutive pairs of them ending at the last one must each shrink by
/// 1/factor, and so must the drop into the floor when the last step is
/// clearly above it. A trace that never leaves the floor passes only if
/// the floor is tight. Linear contraction that happens to land on a root, or
/// drifts into the rounding floor, fails.
template <std::floating_point Real>
bool probe_contracts(const BasicIterationTrace<Real>& t, const BasicIterationSettings<Real>& s) {
  if (!t.converged()) return false;
  const auto& r = t.rows;
  auto floor_of = [&](const IterationRow<Real>& row) {
    return std::max(s.step_tol * (Real(1) + std::abs(row.value)), row.noise);
  };
  std::ptrdiff_t k = static_cast<std::ptrdiff_t>(r.size()) - 1;
  while (k >= 0 && detail::step_is_small(r[static_cast<std::size_t>(k)], s.step_tol)) --k;
  if (k < 0) {
    // Seeded on the root, provided the rounding floor itself is tight. A
    // floor at half precision or worse means the probe saw only noise.
    const Real tight = std::sqrt(std::numeric_limits<Real>::epsilon());
    return std::all_of(r.begin(), r.end(), [&](const IterationRow<Real>& row) {
      return row.noise <= tight * (Real(1) + std::abs(row.value));
    });
  }
  const auto last = static_cast<std::size_t>(k);
  for (std::size_t i = last, pairs = 0; i >= 1 && pairs < 3; --i, ++pairs) {
    if (detail::step_is_small(r[i - 1], s.step_tol)) break;
    if (std::abs(r[i].step) * s.divergence_factor > std::abs(r[i - 1].step)) return false;
  }
  const Real big = std::abs(r[last].step);
  if (last + 1 < r.size() && big > Real(10) * floor_of(r[last]) &&
      std::abs(r[last + 1].step) * s.divergence_factor > big) {
    return false;
  }
  return true;
}

/// Root identity used when probes (and seeds) land on the same root.
template <std::floating_point Real>
bool same_root(const BasicComplex<Real>& a, const BasicComplex<Real>& b, Real rel = Real(1e-8)) {
  return std::abs(a - b) <= rel * (Real(1) + std::max(std::abs(a), std::abs(b)));
}

/// Runs the nu-probes 1..nu_max from one seed and identifies the
/// multiplicity of the root they reach. Probes share no state.
template <std::floating_point Real>
BasicMultiplicityVerdict<Real> detect_multiplicity(const BasicPolynomial<Real>& f, const BasicComplex<Real>& seed,
                                                   int nu_max = 0, const BasicIterationSettings<Real>& s = {},
                                                   Real taylor_tol = Real(1e-7)) {
  if (f.degree() < 1) throw Error(ErrorCode::InvalidArgument, "multiplicity detection needs degree >= 1");
  if (nu_max <= 0) nu_max = f.degree();
  nu_max = std::min(nu_max, f.degree());

  BasicMultiplicityVerdict<Real> out;
  struct Candidate {
    int nu;
    BasicComplex<Real> root;
    TaylorVerdict<Real> taylor;
  };
  std::vector<Candidate> validated;
  std::vector<std::pair<int, BasicComplex<Real>>> converged_roots;
  for (int nu = 1; nu <= nu_max; ++nu) {
    out.probes.push_back(iterate_test_nu(f, nu, seed, s));
    const auto& trace = out.probes.back();
    const bool ok = probe_contracts(trace, s);
    out.probe_converged.push_back(ok);
    if (!ok) continue;
    const auto root = trace.final_value();
    converged_roots.emplace_back(nu, root);
    auto taylor = taylor_multiplicity_test(f, root, nu, taylor_tol);
    if (auto* v = std::get_if<TaylorVerdict<Real>>(&taylor)) validated.push_back({nu, root, *v});
  }

  auto describe = [](const std::vector<std::pair<int, BasicComplex<Real>>>& c) {
    std::ostringstream os;
    os.precision(16);
    for (const auto& [nu, r] : c) os << " nu=" << nu << " at " << r;
    return os.str();
  };
  if (converged_roots.empty()) throw Error(ErrorCode::NoMultiplicity, "no probe converged; improve the seed");
  if (validated.empty()) {
    throw Error(ErrorCode::TaylorRejected, "converged probes failed the Taylor ladder:" + describe(converged_roots));
  }
  for (const auto& c : validated) {
    if (!same_root(c.root, validated.front().root)) {
      std::vector<std::pair<int, BasicComplex<Real>>> cands;
      for (const auto& v : validated) cands.emplace_back(v.nu, v.root);
      throw AmbiguousMultiplicityError<Real>(cands, describe(cands));
    }
  }
  const auto& best = *std::max_element(validated.begin(), validated.end(),
                                       [](const Candidate& a, const Candidate& b) { return a.nu < b.nu; });
  out.root = best.root;
  out.multiplicity = best.nu;
  out.taylor = best.taylor;
  return out;
}

}  // namespace padepoly
