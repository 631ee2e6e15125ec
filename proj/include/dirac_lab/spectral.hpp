#pragma once

// Mode-sum evaluators for vacuum expectation values, O(#modes) thanks to the
// +-k selection rule of the cos(kz) gauge profile. No Fock matrices are built.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "dirac_lab/common.hpp"
#include "dirac_lab/fock_space.hpp"
#include "dirac_lab/harmonic.hpp"
#include "dirac_lab/mode_basis.hpp"
#include "dirac_lab/summation.hpp"

namespace dirac_lab {

struct ModeSumConfig {
  ModeParams params;
  VacuumSpec vac;
  GaugeProfile chi;
  SpinFilter spins = SpinFilter::kBoth;
  /// Lattice steps required between the band edge and the momentum cutoff.
  /// Zero means "the gauge harmonic", the smallest value for which the band
  /// sums close.
  int required_margin = 0;
  unsigned workers = 1;

  int effective_margin_requirement() const { return std::max(required_margin, chi.harmonic); }

  /// Lattice steps between the band edge and n_max (band vacua only).
  int band_margin() const { return params.n_max - vac.band->edge_index(params); }

  void validate() const {
    params.validate();
    if (std::abs(chi.ring_length - params.ring_length) > 1e-12 * params.ring_length) {
      throw ConfigError("gauge profile and mode set use different ring lengths");
    }
    if (chi.harmonic < 1) throw ConfigError("gauge harmonic must be >= 1");
    if (vac.is_band()) {
      vac.band->validate();
      const int edge = vac.band->edge_index(params);
      if (edge < 0) throw ConfigError("band contains no lattice modes");
      const int margin = params.n_max - edge;
      const int need = effective_margin_requirement();
      if (margin < need) {
        throw ConfigError("band edge at n=" + std::to_string(edge) + " leaves a cutoff margin of " +
                          std::to_string(margin) + " lattice steps; " + std::to_string(need) +
                          " required (shortfall " + std::to_string(need - margin) + ")");
      }
    }
  }
};

inline Mode make_mode(const ModeParams& params, int n, int sign, int spin) {
  Mode m;
  m.n = n;
  m.p = params.momentum(n);
  m.energy = dirac_energy(m.p, params.mass);
  m.sign = sign;
  m.spin = spin;
  m.u = plane_wave_spinor(m.p, params.mass, sign, spin, params.ring_length);
  return m;
}

/// Transition classes for a from-mode in the occupied set.
struct ClassPartials {
  double to_positive = 0.0;   // occupied -> positive energy
  double to_below = 0.0;      // occupied -> empty negative energy (below the band)
  double within = 0.0;        // occupied -> occupied (F1-type, cancels pairwise)
  double abs_sum = 0.0;       // sum of |term|
  long long terms = 0;

  ClassPartials& operator+=(const ClassPartials& o) {
    to_positive += o.to_positive;
    to_below += o.to_below;
    within += o.within;
    abs_sum += o.abs_sum;
    terms += o.terms;
    return *this;
  }
  friend ClassPartials operator+(ClassPartials a, const ClassPartials& b) { return a += b; }
  double total() const { return to_positive + to_below + within; }
};

struct SpectralReport {
  double value = 0.0;
  ClassPartials partials;
  long long term_count = 0;
};

namespace detail {

inline std::vector<Mode> occupied_modes(const ModeSumConfig& cfg) {
  std::vector<Mode> out;
  for (int n = -cfg.params.n_max; n <= cfg.params.n_max; ++n) {
    for (int spin : {1, 2}) {
      if (!spin_selected(cfg.spins, spin)) continue;
      Mode m = make_mode(cfg.params, n, -1, spin);
      if (cfg.vac.occupied(m, cfg.params.mass)) out.push_back(m);
    }
  }
  return out;
}

// Visits every mode b with n_b = n_a +- j inside the cutoff and the same spin
// as a (other spins have zero overlap).
template <typename Visit>
void for_each_partner(const ModeSumConfig& cfg, const Mode& a, Visit&& visit) {
  for (int dir : {+1, -1}) {
    const int nb = a.n + dir * cfg.chi.harmonic;
    if (nb < -cfg.params.n_max || nb > cfg.params.n_max) continue;
    for (int sign : {+1, -1}) visit(make_mode(cfg.params, nb, sign, a.spin), dir);
  }
}

}  // namespace detail

/// <vac|rho_w H0 rho_w|vac> = e^2 sum_{a occ, b} |<b|chi|a>|^2 (E'_b - E'_a),
/// split by the class of b. For the standard vacuum only the to-positive class
/// exists; for the band vacuum the to-below class is negative term by term.
/// The within class is included (it vanishes by antisymmetry).
inline SpectralReport spectral_sum_rhoHrho(const ModeSumConfig& cfg) {
  cfg.validate();
  const auto from = detail::occupied_modes(cfg);
  const double e2 = cfg.params.charge * cfg.params.charge;
  const double mass = cfg.params.mass;
  const auto partials = deterministic_reduce<ClassPartials>(
      from.size(),
      [&](std::size_t i) {
        ClassPartials acc;
        const Mode& a = from[i];
        detail::for_each_partner(cfg, a, [&](const Mode& b, int) {
          const double weight = std::norm(chi_matrix_element(b, a, cfg.chi));
          if (weight == 0.0) return;
          const double term = e2 * weight * (b.signed_energy() - a.signed_energy());
          if (b.positive()) acc.to_positive += term;
          else if (cfg.vac.occupied(b, mass)) acc.within += term;
          else acc.to_below += term;
          acc.abs_sum += std::abs(term);
          ++acc.terms;
        });
        return acc;
      },
      cfg.workers);
  return {partials.total(), partials, partials.terms};
}

struct F1Result {
  double value = 0.0;     // F1 itself
  double abs_sum = 0.0;   // sum of |terms|
  long long terms = 0;
};

/// F1 = sum_{a,b in band} e^2 |<b|chi|a>|^2 (E_a - E_b); zero by relabelling a <-> b.
inline F1Result f1_antisymmetry_check(const ModeSumConfig& cfg) {
  if (!cfg.vac.is_band()) throw ConfigError("F1 check needs a band vacuum");
  cfg.validate();
  const auto from = detail::occupied_modes(cfg);
  const double e2 = cfg.params.charge * cfg.params.charge;
  std::vector<double> terms;
  for (const auto& a : from) {
    detail::for_each_partner(cfg, a, [&](const Mode& b, int) {
      if (!cfg.vac.occupied(b, cfg.params.mass)) return;
      const double weight = std::norm(chi_matrix_element(b, a, cfg.chi));
      if (weight == 0.0) return;
      terms.push_back(e2 * weight * (a.energy - b.energy));
    });
  }
  F1Result out;
  out.value = pairwise_sum(terms);
  for (double t : terms) out.abs_sum += std::abs(t);
  out.terms = static_cast<long long>(terms.size());
  return out;
}

struct SchwingerSpectral {
  /// <vac|[J(z), rho_w]|vac> = e^2 (I - h.c.)
  HarmonicCoefficient total;
  /// Raw transition sums I (without e^2): band/sea -> positive, band -> below band.
  HarmonicCoefficient i_plus;
  HarmonicCoefficient i_minus;
  long long term_count = 0;

  /// Scale of the class partials, for relative comparisons of a vanishing total.
  double partial_scale(double e2) const {
    return e2 * (i_plus.minus_conjugate().magnitude() + i_minus.minus_conjugate().magnitude());
  }
};

namespace detail {
struct HarmonicPair {
  HarmonicCoefficient plus_class;
  HarmonicCoefficient minus_class;
  long long terms = 0;
  HarmonicPair& operator+=(const HarmonicPair& o) {
    plus_class += o.plus_class;
    minus_class += o.minus_class;
    terms += o.terms;
    return *this;
  }
  friend HarmonicPair operator+(HarmonicPair a, const HarmonicPair& b) { return a += b; }
};
}  // namespace detail

/// I = sum_{a occ, b empty} (u_a^dag alpha_z u_b)(u_b^dag u_a) e^{i(p_b-p_a)z}
///     * integral chi e^{-i(p_b-p_a)z} dz,
/// using the closed-form pair element (p_a/E'_a + p_b/E'_b)/2L^2 for equal spins.
inline SchwingerSpectral schwinger_mode_sum(const ModeSumConfig& cfg) {
  cfg.validate();
  const auto from = detail::occupied_modes(cfg);
  const double mass = cfg.params.mass;
  const double length = cfg.params.ring_length;
  const double chi_integral = 0.5 * cfg.chi.amplitude * length;
  const auto sums = deterministic_reduce<detail::HarmonicPair>(
      from.size(),
      [&](std::size_t i) {
        detail::HarmonicPair acc;
        const Mode& a = from[i];
        detail::for_each_partner(cfg, a, [&](const Mode& b, int dir) {
          if (cfg.vac.occupied(b, mass)) return;
          const double x = current_pair_element(b, a, length) * chi_integral;
          auto& target = b.positive() ? acc.plus_class : acc.minus_class;
          if (dir > 0) target.plus += x;
          else target.minus += x;
          ++acc.terms;
        });
        return acc;
      },
      cfg.workers);
  const double e2 = cfg.params.charge * cfg.params.charge;
  SchwingerSpectral out;
  out.i_plus = sums.plus_class;
  out.i_minus = sums.minus_class;
  out.i_plus.k = out.i_minus.k = cfg.chi.k();
  out.total = Complex(e2) * (out.i_plus + out.i_minus).minus_conjugate();
  out.total.k = cfg.chi.k();
  out.term_count = sums.terms;
  return out;
}

struct OracleComparison {
  DoubleCommutatorResult fock_double_commutator;
  SchwingerFockResult fock_schwinger;
  SpectralReport spectral_rho_h_rho;
  SchwingerSpectral spectral_schwinger;
  double rho_h_rho_deviation = 0.0;
  double half_double_commutator_deviation = 0.0;
  double schwinger_deviation = 0.0;
  double max_deviation = 0.0;
};

/// |a - b| / max(|a|, |b|, scale), so vanishing pairs compare on the scale of
/// the sums they cancel from.
inline double relative_deviation(double a, double b, double scale) {
  const double denom = std::max({std::abs(a), std::abs(b), std::abs(scale)});
  return denom == 0.0 ? 0.0 : std::abs(a - b) / denom;
}

/// Runs the exact Fock computation and the mode sums on the same configuration.
inline OracleComparison oracle_crosscheck(const ModeSumConfig& cfg) {
  cfg.validate();
  const auto basis = FockBasis::from_params(cfg.params, cfg.spins);
  OracleComparison out;
  out.fock_double_commutator = double_commutator_expectation(cfg.vac, cfg.chi, basis);
  out.fock_schwinger = schwinger_expectation(cfg.vac, cfg.chi, basis);
  out.spectral_rho_h_rho = spectral_sum_rhoHrho(cfg);
  out.spectral_schwinger = schwinger_mode_sum(cfg);

  const auto& p = out.spectral_rho_h_rho.partials;
  const double rhr_scale = std::abs(p.to_positive) + std::abs(p.to_below) + std::abs(p.within);
  out.rho_h_rho_deviation = relative_deviation(out.fock_double_commutator.rho_h_rho,
                                               out.spectral_rho_h_rho.value, rhr_scale);
  out.half_double_commutator_deviation = relative_deviation(
      out.fock_double_commutator.half_double_commutator, out.spectral_rho_h_rho.value, rhr_scale);

  const double e2 = cfg.params.charge * cfg.params.charge;
  const auto& fs = out.fock_schwinger.coefficient;
  const auto& ss = out.spectral_schwinger.total;
  const double s_scale = out.spectral_schwinger.partial_scale(e2);
  const double s_denom = std::max({fs.magnitude(), ss.magnitude(), s_scale});
  out.schwinger_deviation =
      s_denom == 0.0 ? 0.0
                     : std::max(std::abs(fs.plus - ss.plus), std::abs(fs.minus - ss.minus)) / s_denom;
  out.max_deviation = std::max(
      {out.rho_h_rho_deviation, out.half_double_commutator_deviation, out.schwinger_deviation});
  return out;
}

}  // namespace dirac_lab
