#pragma once

#include <algorithm>
#include <cmath>
#include <complex>

#include "dirac_lab/common.hpp"

namespace dirac_lab {

/// A function of z of the form  plus * e^{ikz} + minus * e^{-ikz}.
///
/// Results built from a cos(kz) gauge profile can only contain the two
/// harmonics +-k, so they are carried exactly instead of sampled on a grid.
/// Commutator expectations of two Hermitian operators are purely imaginary;
/// for those, sigma() and tau() are real and
///     f(z) = i * (sigma * sin(kz) + tau * cos(kz)).
struct HarmonicCoefficient {
  Complex plus{};
  Complex minus{};
  double k = 0.0;

  Complex operator()(double z) const {
    return plus * std::exp(kI * (k * z)) + minus * std::exp(-kI * (k * z));
  }

  /// Coefficient of i*sin(kz).
  Complex sigma() const { return plus - minus; }
  /// Coefficient of i*cos(kz).
  Complex tau() const { return (plus + minus) / kI; }

  /// Coefficient of sin(kz) and cos(kz) when the function is real.
  Complex sin_amplitude() const { return kI * (plus - minus); }
  Complex cos_amplitude() const { return plus + minus; }

  /// Deviation from the real-valued form plus e^{ikz} + conj(plus) e^{-ikz}.
  double reality_defect() const { return std::abs(minus - std::conj(plus)); }
  /// Deviation from the purely imaginary form plus e^{ikz} - conj(plus) e^{-ikz}.
  double imaginarity_defect() const { return std::abs(minus + std::conj(plus)); }

  double magnitude() const { return std::max(std::abs(plus), std::abs(minus)); }

  /// The same function written with wavenumber -k.
  HarmonicCoefficient reflected() const { return {minus, plus, -k}; }

  HarmonicCoefficient& operator+=(const HarmonicCoefficient& o) {
    plus += o.plus;
    minus += o.minus;
    return *this;
  }
  friend HarmonicCoefficient operator+(HarmonicCoefficient a, const HarmonicCoefficient& b) {
    return a += b;
  }
  friend HarmonicCoefficient operator-(HarmonicCoefficient a, const HarmonicCoefficient& b) {
    a.plus -= b.plus;
    a.minus -= b.minus;
    return a;
  }
  friend HarmonicCoefficient operator*(Complex s, HarmonicCoefficient a) {
    a.plus *= s;
    a.minus *= s;
    return a;
  }

  /// f(z) - conj(f(z)): the "term minus its hermitian conjugate" pattern.
  HarmonicCoefficient minus_conjugate() const {
    return {plus - std::conj(minus), minus - std::conj(plus), k};
  }
};

}  // namespace dirac_lab
