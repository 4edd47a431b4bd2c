#pragma once

#include <cmath>
#include <complex>
#include <concepts>
#include <stdexcept>
#include <string>
#include <utility>

namespace padepoly {

template <std::floating_point Real>
using BasicComplex = std::complex<Real>;

using Complex = BasicComplex<double>;

enum class ErrorCode {
  InvalidArgument,
  ZeroPolynomial,
  DerivativeVanishes,
  HalleyDenominatorVanishes,
  TestPolynomialVanishes,
  SeedNearOrigin,
  ComplexCoefficients,
  FlatSecant,
  CoincidentInterpolation,
  ClusteredInterpolation,
  EvolutionCollision,
  RayleighDenominatorVanishes,
  NoMultiplicity,
  AmbiguousMultiplicity,
  TaylorRejected,
  NotAnEigenvalue,
  IllConditioned,
  Parse,
  Io,
};

inline const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::ZeroPolynomial: return "zero polynomial";
    case ErrorCode::DerivativeVanishes: return "derivative vanishes";
    case ErrorCode::HalleyDenominatorVanishes: return "Halley denominator vanishes";
    case ErrorCode::TestPolynomialVanishes: return "test polynomial vanishes";
    case ErrorCode::SeedNearOrigin: return "seed too close to origin for p_nu";
    case ErrorCode::ComplexCoefficients: return "complex coefficients";
    case ErrorCode::FlatSecant: return "flat secant";
    case ErrorCode::CoincidentInterpolation: return "coincident interpolation values";
    case ErrorCode::ClusteredInterpolation: return "interpolation values too clustered";
    case ErrorCode::EvolutionCollision: return "evolution collision";
    case ErrorCode::RayleighDenominatorVanishes: return "Rayleigh denominator vanished";
    case ErrorCode::NoMultiplicity: return "no multiplicity identified";
    case ErrorCode::AmbiguousMultiplicity: return "ambiguous multiplicity";
    case ErrorCode::TaylorRejected: return "Taylor test rejected multiplicity";
    case ErrorCode::NotAnEigenvalue: return "lambda is not an eigenvalue at this tolerance";
    case ErrorCode::IllConditioned: return "ill-conditioned interpolation";
    case ErrorCode::Parse: return "parse error";
    case ErrorCode::Io: return "i/o error";
  }
  return "unknown error";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(detail.empty() ? std::string(to_string(code))
                                          : std::string(to_string(code)) + ": " + detail),
        code_(code) {}

  explicit Error(ErrorCode code) : Error(code, std::string{}) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

template <std::floating_point Real>
bool is_finite(const BasicComplex<Real>& z) noexcept {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

/// Guard used wherever a quotient would otherwise overflow.
template <std::floating_point Real>
constexpr Real underflow_floor() noexcept {
  if constexpr (sizeof(Real) >= sizeof(double)) {
    return Real(1e-290);
  } else {
    return Real(1e-35);
  }
}

}  // namespace padepoly
