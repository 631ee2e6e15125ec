#pragma once

// Continuum (L -> infinity) limits of the mode sums, in closed form.
//
// The discrete sums turn into integrals through the density of states L/2pi
// per momentum and the Kronecker selection rule L*delta_{q,k} -> 2pi*delta(q-k).
// Together with the two spin sectors and the 1/2L^2 pair element, a transition
// sum I picks up the prefactor V0/4pi:
//     I = (V0/4pi) * integral dp_m [pair factor at p_n = p_m +- k] e^{+-ikz}.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "dirac_lab/common.hpp"
#include "dirac_lab/harmonic.hpp"

namespace dirac_lab {

struct ContinuumParams {
  double mass = 1.0;
  /// Gauge wavenumber. Closed forms accept either sign so parity can be checked.
  double k = 1.0;
  double amplitude = 1.0;
  double charge = 1.0;
  /// Momentum cutoff r (band radius); +infinity selects the r -> infinity limit.
  double cutoff = std::numeric_limits<double>::infinity();

  bool finite_cutoff() const { return std::isfinite(cutoff); }

  void validate() const {
    if (!(mass >= 0.0)) throw ConfigError("mass must be >= 0");
    if (k == 0.0 || !std::isfinite(k)) throw ConfigError("wavenumber k must be finite and nonzero");
    if (!(cutoff > std::abs(k))) throw ConfigError("cutoff r must exceed |k|");
    if (!(charge > 0.0)) throw ConfigError("charge must be > 0");
  }
};

/// Prefactor of a continuum transition sum I per unit amplitude.
inline constexpr double kTransitionPrefactor = 1.0 / (4.0 * kPi);

namespace detail {
inline double shell_energy(double p, double mass) { return std::hypot(p, mass); }
inline double velocity(double p, double mass) {
  return p == 0.0 ? 0.0 : p / shell_energy(p, mass);
}
}  // namespace detail

/// Integrand p -> (p+k)/sqrt((p+k)^2+m^2) - p/sqrt(p^2+m^2).
/// Where both velocities share a sign the difference is rewritten as
/// m^2 k (2p+k) / (E E' ((p+k)E + pE')) so the tails keep full relative precision.
inline double cutoff_integrand(double p, double k, double mass) {
  const double q = p + k;
  if (p * q <= 0.0) return detail::velocity(q, mass) - detail::velocity(p, mass);
  const double e = detail::shell_energy(p, mass);
  const double eq = detail::shell_energy(q, mass);
  return mass * mass * k * (p + q) / (e * eq * (q * e + p * eq));
}

/// Exact value of the integral of cutoff_integrand over [-r, r]:
///     sqrt((r+k)^2 + m^2) - sqrt((r-k)^2 + m^2),
/// evaluated as 4rk / (sum of the roots) to avoid cancellation. Tends to 2k.
inline double cutoff_integral(double r, double k, double mass) {
  if (std::isinf(r)) return 2.0 * k;
  const double upper = detail::shell_energy(r + k, mass);
  const double lower = detail::shell_energy(r - k, mass);
  return 4.0 * r * k / (upper + lower);
}

inline double cutoff_integral(const ContinuumParams& p) {
  p.validate();
  return cutoff_integral(p.cutoff, p.k, p.mass);
}

/// r -> infinity limit of cutoff_integral.
inline double cutoff_integral_limit(double k) { return 2.0 * k; }

/// Adaptive Gauss-Kronrod (61-point) integral of f over [a, b], split at the
/// given interior breakpoints.
template <typename F>
double integrate_adaptive(F&& f, double a, double b, std::vector<double> breaks = {},
                          double tolerance = 1e-13, unsigned max_depth = 15) {
  if (a == b) return 0.0;
  breaks.push_back(a);
  breaks.push_back(b);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double lo = breaks[i];
    const double hi = breaks[i + 1];
    if (lo < a || hi > b || lo == hi) continue;
    double err = 0.0;
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, max_depth, tolerance,
                                                                           &err);
  }
  return total;
}

/// Quadrature of the same integral, as an independent cross-check of the
/// closed form. Breakpoints bracket the two velocity kinks (p = 0, p = -k) on
/// logarithmic scales so every panel sees a smooth integrand.
inline double cutoff_integral_quadrature(double r, double k, double mass) {
  std::vector<double> breaks;
  const double width = std::max(mass, 1e-3);
  for (double centre : {0.0, -k}) {
    breaks.push_back(centre);
    for (double scale = width; scale < 2.0 * r; scale *= 4.0) {
      breaks.push_back(centre + scale);
      breaks.push_back(centre - scale);
    }
  }
  std::vector<double> inside;
  for (double b : breaks) {
    if (b > -r && b < r) inside.push_back(b);
  }
  return integrate_adaptive([&](double p) { return cutoff_integrand(p, k, mass); }, -r, r, inside);
}

inline double cutoff_integral_quadrature(const ContinuumParams& p) {
  p.validate();
  if (!p.finite_cutoff()) throw ConfigError("quadrature needs a finite cutoff");
  return cutoff_integral_quadrature(p.cutoff, p.k, p.mass);
}

struct StandardSchwinger {
  /// Transition sum I (sea -> positive energy), without e^2.
  HarmonicCoefficient transition_sum;
  /// <0|[J(z), rho_w]|0> = e^2 (I - h.c.) = i sigma sin(kz).
  HarmonicCoefficient commutator;
  double sigma = 0.0;
};

/// Standard-vacuum result with sea momenta restricted to |p_m| <= r
/// (r = infinity for the unrestricted sea): sigma = e^2 V0 C(r) / pi,
/// which tends to 2 e^2 V0 k / pi.
inline StandardSchwinger schwinger_standard(const ContinuumParams& p) {
  p.validate();
  const double c = cutoff_integral(p.cutoff, p.k, p.mass);
  const double a = kTransitionPrefactor * p.amplitude * c;
  StandardSchwinger out;
  out.transition_sum = {a, -a, p.k};
  out.commutator = Complex(p.charge * p.charge) * out.transition_sum.minus_conjugate();
  out.commutator.k = p.k;
  out.sigma = out.commutator.sigma().real();
  return out;
}

/// delta J(z) = i <0|[J(z), rho_w]|0> = -sigma sin(kz); a real function.
inline HarmonicCoefficient delta_J_vac(const ContinuumParams& p) {
  auto s = schwinger_standard(p).commutator;
  return kI * s;
}

/// Interval of sea momenta p_m in [-r, r] whose partner p_m + shift lies
/// outside [-r, r] on the given side (+1: above r, -1: below -r).
/// Empty intervals are the vanishing delta-support cases.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
};

inline std::optional<Interval> delta_support(double r, double shift, int side) {
  Interval iv{-r, r};
  if (side > 0) iv.lo = std::max(iv.lo, r - shift);   // p_m + shift > r
  else iv.hi = std::min(iv.hi, -r - shift);           // p_m + shift < -r
  if (!(iv.hi > iv.lo)) return std::nullopt;
  return iv;
}

struct BandIntegrals {
  HarmonicCoefficient i_plus;   // band -> positive energy
  HarmonicCoefficient i_minus;  // band -> below the band
  /// Interval support for (harmonic +k, above), (+k, below), (-k, above), (-k, below).
  std::optional<Interval> support[4];
};

/// Band-vacuum transition sums with band radius r.
///
/// i_plus:  (V0/4pi) int_{-r}^{r} [v(p+-k) - v(p)] dp  = (V0/4pi) C(r, +-k)
/// i_minus: -(V0/4pi) int_{support} [v(p+-k) + v(p)] dp, the support being the
///          band momenta whose +-k partner lies outside the band.
inline BandIntegrals band_integrals(const ContinuumParams& p) {
  p.validate();
  if (!p.finite_cutoff()) throw ConfigError("band integrals need a finite band radius");
  const double r = p.cutoff;
  const double pre = kTransitionPrefactor * p.amplitude;
  const auto energy = [&](double q) { return detail::shell_energy(q, p.mass); };
  BandIntegrals out;
  out.i_plus.k = out.i_minus.k = p.k;
  int slot = 0;
  for (int dir : {+1, -1}) {
    const double shift = dir * p.k;
    Complex& plus_target = dir > 0 ? out.i_plus.plus : out.i_plus.minus;
    Complex& minus_target = dir > 0 ? out.i_minus.plus : out.i_minus.minus;
    plus_target = pre * cutoff_integral(r, shift, p.mass);
    double below = 0.0;
    for (int side : {+1, -1}) {
      const auto iv = delta_support(r, shift, side);
      out.support[slot++] = iv;
      if (!iv) continue;
      // antiderivative of v(q + shift) + v(q) is E(q + shift) + E(q)
      below += (energy(iv->hi + shift) + energy(iv->hi)) - (energy(iv->lo + shift) + energy(iv->lo));
    }
    minus_target = -pre * below;
  }
  return out;
}

/// <0,dE|[J(z), rho_w]|0,dE> in the continuum: e^2 (I+ + I- - h.c.).
inline HarmonicCoefficient band_schwinger(const ContinuumParams& p) {
  const auto b = band_integrals(p);
  auto s = Complex(p.charge * p.charge) * (b.i_plus + b.i_minus).minus_conjugate();
  s.k = p.k;
  return s;
}

}  // namespace dirac_lab
