#pragma once

// Single-particle plane-wave modes of the free Dirac Hamiltonian
// H = alpha_z p + beta m on a periodic ring of length L (natural units).

#include <Eigen/Dense>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <vector>

#include "dirac_lab/common.hpp"

namespace dirac_lab {

using Spinor = Eigen::Vector4cd;

inline double dirac_energy(double p, double mass) { return std::sqrt(p * p + mass * mass); }

struct ModeParams {
  double mass = 1.0;
  double ring_length = 2.0 * kPi;
  int n_max = 1;
  double charge = 1.0;

  double momentum(int n) const { return 2.0 * kPi * n / ring_length; }
  /// Momentum lattice spacing 2pi/L.
  double momentum_step() const { return 2.0 * kPi / ring_length; }

  void validate() const {
    if (!(mass > 0.0)) throw ConfigError("mass must be > 0");
    if (!(ring_length > 0.0)) throw ConfigError("ring_length must be > 0");
    if (n_max < 1) throw ConfigError("n_max must be >= 1");
    if (!(charge > 0.0)) throw ConfigError("charge must be > 0 (only e^2 enters)");
  }
};

struct Mode {
  int n = 0;           // momentum index, p = 2 pi n / L
  double p = 0.0;
  double energy = 0.0;  // E = +sqrt(p^2 + m^2)
  int sign = +1;       // +1 positive-energy branch, -1 negative-energy branch
  int spin = 1;        // 1 or 2
  Spinor u = Spinor::Zero();

  double signed_energy() const { return sign * energy; }
  bool positive() const { return sign > 0; }
};

/// chi(z) = amplitude * cos(k z) with k = 2 pi harmonic / L.
struct GaugeProfile {
  double amplitude = 1.0;
  int harmonic = 1;
  double ring_length = 2.0 * kPi;

  double k() const { return 2.0 * kPi * harmonic / ring_length; }

  /// Builds a profile from a physical wavenumber, which must sit on the ring's
  /// momentum lattice.
  static GaugeProfile lattice(double amplitude, double k, double ring_length) {
    if (!(ring_length > 0.0)) throw ConfigError("ring_length must be > 0");
    if (!(k > 0.0)) throw ConfigError("gauge wavenumber k must be > 0");
    const double step = 2.0 * kPi / ring_length;
    const double ratio = k / step;
    const double nearest = std::round(ratio);
    if (std::abs(ratio - nearest) > 1e-9 * std::max(1.0, ratio) || nearest < 1.0) {
      const double lo = std::max(1.0, std::floor(ratio)) * step;
      const double hi = std::max(1.0, std::ceil(ratio)) * step;
      std::ostringstream os;
      os.precision(12);
      os << "gauge wavenumber k=" << k << " is not a lattice wavenumber 2*pi*j/L of a ring with L="
         << ring_length << "; nearest lattice wavenumbers: " << lo;
      if (hi != lo) os << " and " << hi;
      throw ConfigError(os.str());
    }
    return {amplitude, static_cast<int>(nearest), ring_length};
  }
};

/// Occupied band of negative-energy states with energies in [-(m + depth), -m].
struct BandSpec {
  double depth = 1.0;

  /// Momentum radius r with sqrt(r^2 + m^2) = m + depth.
  double radius(double mass) const { return std::sqrt(depth * (depth + 2.0 * mass)); }

  // Closed boundary; the relative slack admits an edge placed exactly on a
  // lattice energy.
  bool contains(const Mode& mode, double mass) const {
    return mode.sign < 0 && mode.energy <= (mass + depth) * (1.0 + 1e-12);
  }

  /// Band whose outermost occupied shell is the lattice momentum index
  /// n_edge. The depth sits midway between that shell and the next one.
  static BandSpec from_edge_index(const ModeParams& params, int n_edge) {
    const double inner = dirac_energy(params.momentum(n_edge), params.mass);
    const double outer = dirac_energy(params.momentum(n_edge + 1), params.mass);
    return {0.5 * (inner + outer) - params.mass};
  }

  void validate() const {
    if (!(depth > 0.0)) throw ConfigError("band depth must be > 0");
  }

  /// Largest |n| of a band member on the given lattice, or -1 when empty.
  int edge_index(const ModeParams& params) const {
    int edge = -1;
    for (int n = 0; n <= params.n_max; ++n) {
      Mode probe;
      probe.sign = -1;
      probe.energy = dirac_energy(params.momentum(n), params.mass);
      if (contains(probe, params.mass)) edge = n;
    }
    return edge;
  }
};

inline Eigen::Matrix4cd alpha_z() {
  Eigen::Matrix4cd a = Eigen::Matrix4cd::Zero();
  a(0, 2) = 1.0;
  a(1, 3) = -1.0;
  a(2, 0) = 1.0;
  a(3, 1) = -1.0;
  return a;
}

inline Eigen::Matrix4cd beta() {
  Eigen::Matrix4cd b = Eigen::Matrix4cd::Zero();
  b.diagonal() << 1.0, 1.0, -1.0, -1.0;
  return b;
}

/// First-quantized Hamiltonian alpha_z p + beta m at fixed momentum.
inline Eigen::Matrix4cd dirac_hamiltonian(double p, double mass) {
  return alpha_z() * p + beta() * mass;
}

/// Normalized plane-wave spinor, u^dag u = 1/L.
///
/// Positive branch: sqrt((E+m)/2EL) (1, 0, p/(E+m), 0) for spin 1 and
/// (0, 1, 0, -p/(E+m)) for spin 2. On the negative branch the textbook form
/// is 0/0 at p = 0; the equal expression sign(p) (p, 0, -(E+m), 0)/sqrt(2EL(E+m))
/// is used instead, with sign(0) = +1.
inline Spinor plane_wave_spinor(double p, double mass, int sign, int spin, double ring_length) {
  const double e = dirac_energy(p, mass);
  Spinor u = Spinor::Zero();
  if (sign > 0) {
    const double norm = std::sqrt((e + mass) / (2.0 * e * ring_length));
    const double lower = p / (e + mass);
    if (spin == 1) {
      u << 1.0, 0.0, lower, 0.0;
    } else {
      u << 0.0, 1.0, 0.0, -lower;
    }
    return norm * u;
  }
  const double phase = p < 0.0 ? -1.0 : 1.0;
  const double norm = phase / std::sqrt(2.0 * e * ring_length * (e + mass));
  if (spin == 1) {
    u << p, 0.0, -(e + mass), 0.0;
  } else {
    u << 0.0, p, 0.0, e + mass;
  }
  return norm * u;
}

/// All modes with |n| <= n_max, ordered by (n ascending, sign +1 then -1,
/// spin 1 then 2). Count is 4 (2 n_max + 1).
inline std::vector<Mode> build_modes(const ModeParams& params) {
  params.validate();
  std::vector<Mode> modes;
  modes.reserve(4 * (2 * params.n_max + 1));
  for (int n = -params.n_max; n <= params.n_max; ++n) {
    const double p = params.momentum(n);
    for (int sign : {+1, -1}) {
      for (int spin : {1, 2}) {
        Mode mode;
        mode.n = n;
        mode.p = p;
        mode.energy = dirac_energy(p, params.mass);
        mode.sign = sign;
        mode.spin = spin;
        mode.u = plane_wave_spinor(p, params.mass, sign, spin, params.ring_length);
        modes.push_back(mode);
      }
    }
  }
  return modes;
}

/// max |sum_{sign,spin} u u^dag - I/L| at the given momentum.
inline double completeness_residual(double p, double mass, double ring_length) {
  Eigen::Matrix4cd sum = Eigen::Matrix4cd::Zero();
  for (int sign : {+1, -1}) {
    for (int spin : {1, 2}) {
      const Spinor u = plane_wave_spinor(p, mass, sign, spin, ring_length);
      sum += u * u.adjoint();
    }
  }
  sum -= Eigen::Matrix4cd::Identity() / ring_length;
  return sum.cwiseAbs().maxCoeff();
}

inline Complex spinor_overlap(const Mode& a, const Mode& b) { return a.u.dot(b.u); }

inline Complex alpha_z_element(const Mode& a, const Mode& b) {
  return a.u.dot(alpha_z() * b.u);
}

/// Integral over the ring of phi_a^dag chi phi_b. Nonzero only when
/// p_a - p_b = +-k.
inline Complex chi_matrix_element(const Mode& a, const Mode& b, const GaugeProfile& chi) {
  const int gap = a.n - b.n;
  if (gap != chi.harmonic && gap != -chi.harmonic) return {};
  return 0.5 * chi.amplitude * chi.ring_length * spinor_overlap(a, b);
}

/// Integral over the ring of phi_a^dag (-i alpha_z dchi/dz) phi_b.
inline Complex gradient_matrix_element(const Mode& a, const Mode& b, const GaugeProfile& chi) {
  const int gap = a.n - b.n;
  double weight = 0.0;
  if (gap == chi.harmonic) weight = 1.0;
  else if (gap == -chi.harmonic) weight = -1.0;
  else return {};
  return weight * 0.5 * chi.amplitude * chi.k() * chi.ring_length * alpha_z_element(a, b);
}

/// (u_b^dag alpha_z u_a)(u_a^dag u_b) in closed form:
/// (p_a/(sign_a E_a) + p_b/(sign_b E_b)) / 2L^2 for equal spins, else 0.
inline double current_pair_element(const Mode& a, const Mode& b, double ring_length) {
  if (a.spin != b.spin) return 0.0;
  return (a.p / a.signed_energy() + b.p / b.signed_energy()) / (2.0 * ring_length * ring_length);
}

/// (E_a' - E_b') <a|chi|b> - <a|-i alpha_z chi'|b>, with E' the signed energy.
/// Vanishes identically because [H, chi] = -i alpha_z chi'.
inline Complex first_quantized_commutator_check(const Mode& a, const Mode& b,
                                                const GaugeProfile& chi) {
  return (a.signed_energy() - b.signed_energy()) * chi_matrix_element(a, b, chi) -
         gradient_matrix_element(a, b, chi);
}

}  // namespace dirac_lab
