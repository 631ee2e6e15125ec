#pragma once

// Exact second-quantized algebra on a truncated mode set.
//
// Basis states are occupation bitstrings over the basis modes; bit i is mode i
// in enumeration order. Creation/annihilation operators carry the
// Jordan-Wigner sign (-1)^(occupied modes with lower index).

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "dirac_lab/common.hpp"
#include "dirac_lab/harmonic.hpp"
#include "dirac_lab/mode_basis.hpp"

namespace dirac_lab {

using SparseMatrix = Eigen::SparseMatrix<Complex>;
using DenseMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;
using Occupation = std::uint32_t;

/// Which spin sectors a truncation keeps. Sectors decouple in every operator
/// built here, so single-sector bases reach larger momentum cutoffs.
enum class SpinFilter { kBoth, kSpin1, kSpin2 };

inline bool spin_selected(SpinFilter filter, int spin) {
  switch (filter) {
    case SpinFilter::kBoth: return true;
    case SpinFilter::kSpin1: return spin == 1;
    case SpinFilter::kSpin2: return spin == 2;
  }
  return true;
}

namespace detail {
// Enumeration order key: n ascending, sign +1 before -1, spin 1 before 2.
inline std::tuple<int, int, int> order_key(const Mode& m) { return {m.n, -m.sign, m.spin}; }
}  // namespace detail

class FockBasis {
 public:
  static constexpr int kMaxModes = 14;

  FockBasis(ModeParams params, std::vector<Mode> modes)
      : params_(params), modes_(std::move(modes)) {
    params_.validate();
    if (modes_.empty()) throw ConfigError("Fock basis needs at least one mode");
    if (static_cast<int>(modes_.size()) > kMaxModes) {
      throw ConfigError("Fock basis limited to " + std::to_string(kMaxModes) + " modes, got " +
                        std::to_string(modes_.size()));
    }
    for (std::size_t i = 1; i < modes_.size(); ++i) {
      if (!(detail::order_key(modes_[i - 1]) < detail::order_key(modes_[i]))) {
        throw ConfigError("Fock basis modes must be distinct and in enumeration order");
      }
    }
  }

  static FockBasis from_params(const ModeParams& params, SpinFilter filter = SpinFilter::kBoth) {
    std::vector<Mode> kept;
    for (const auto& m : build_modes(params)) {
      if (spin_selected(filter, m.spin)) kept.push_back(m);
    }
    return FockBasis(params, std::move(kept));
  }

  const ModeParams& params() const { return params_; }
  int mode_count() const { return static_cast<int>(modes_.size()); }
  std::size_t dimension() const { return std::size_t{1} << modes_.size(); }
  const Mode& mode(int i) const { return modes_.at(static_cast<std::size_t>(i)); }
  std::span<const Mode> modes() const { return modes_; }

  int index_of(int n, int sign, int spin) const {
    for (int i = 0; i < mode_count(); ++i) {
      const auto& m = modes_[static_cast<std::size_t>(i)];
      if (m.n == n && m.sign == sign && m.spin == spin) return i;
    }
    throw std::out_of_range("mode (n=" + std::to_string(n) + ", sign=" + std::to_string(sign) +
                            ", spin=" + std::to_string(spin) + ") not in basis");
  }

 private:
  ModeParams params_;
  std::vector<Mode> modes_;
};

struct FockOperator {
  SparseMatrix matrix;
  std::string label;

  FockOperator adjoint() const {
    SparseMatrix adj = matrix.adjoint();
    return {adj, label + "^dag"};
  }
  DenseMatrix dense() const { return DenseMatrix(matrix); }
  /// Frobenius norm of (A - A^dag).
  double hermiticity_defect() const {
    SparseMatrix d = matrix - SparseMatrix(matrix.adjoint());
    return d.norm();
  }
  std::size_t dimension() const { return static_cast<std::size_t>(matrix.rows()); }
};

inline SparseMatrix sparse_identity(std::size_t dim) {
  SparseMatrix id(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  id.setIdentity();
  return id;
}

inline SparseMatrix commutator(const SparseMatrix& a, const SparseMatrix& b) {
  return SparseMatrix(a * b) - SparseMatrix(b * a);
}

inline SparseMatrix anticommutator(const SparseMatrix& a, const SparseMatrix& b) {
  return SparseMatrix(a * b) + SparseMatrix(b * a);
}

inline DenseMatrix commutator(const DenseMatrix& a, const DenseMatrix& b) { return a * b - b * a; }
inline DenseMatrix anticommutator(const DenseMatrix& a, const DenseMatrix& b) {
  return a * b + b * a;
}

enum class Ladder { kCreate, kDestroy };

namespace detail {
inline double jordan_wigner_sign(Occupation state, int mode) {
  const Occupation below = state & ((Occupation{1} << mode) - 1);
  return (std::popcount(below) % 2 == 0) ? 1.0 : -1.0;
}
}  // namespace detail

/// a_i^dag or a_i on the full occupation basis.
inline FockOperator ladder(const FockBasis& basis, int mode, Ladder kind) {
  if (mode < 0 || mode >= basis.mode_count()) {
    throw std::out_of_range("ladder: unknown mode index " + std::to_string(mode));
  }
  const auto dim = basis.dimension();
  const Occupation bit = Occupation{1} << mode;
  std::vector<Eigen::Triplet<Complex>> entries;
  entries.reserve(dim / 2);
  for (Occupation s = 0; s < dim; ++s) {
    const bool occupied = (s & bit) != 0;
    if (kind == Ladder::kCreate && !occupied) {
      entries.emplace_back(static_cast<int>(s | bit), static_cast<int>(s),
                           detail::jordan_wigner_sign(s, mode));
    } else if (kind == Ladder::kDestroy && occupied) {
      entries.emplace_back(static_cast<int>(s & ~bit), static_cast<int>(s),
                           detail::jordan_wigner_sign(s, mode));
    }
  }
  SparseMatrix m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  m.setFromTriplets(entries.begin(), entries.end());
  const std::string name = "a_" + std::to_string(mode);
  return {m, kind == Ladder::kCreate ? name + "^dag" : name};
}

/// sum_ab coeff(a,b) a_a^dag a_b + shift * I, built directly on bitstrings.
inline SparseMatrix one_body_operator(const FockBasis& basis, const DenseMatrix& coeff,
                                      Complex shift = {}) {
  const int modes = basis.mode_count();
  const auto dim = basis.dimension();
  std::vector<std::tuple<int, int, Complex>> terms;
  for (int a = 0; a < modes; ++a) {
    for (int b = 0; b < modes; ++b) {
      if (coeff(a, b) != Complex{}) terms.emplace_back(a, b, coeff(a, b));
    }
  }
  std::vector<Eigen::Triplet<Complex>> entries;
  entries.reserve(dim * (terms.size() / 2 + 1));
  for (Occupation s = 0; s < dim; ++s) {
    if (shift != Complex{}) entries.emplace_back(static_cast<int>(s), static_cast<int>(s), shift);
    for (const auto& [a, b, c] : terms) {
      const Occupation bit_b = Occupation{1} << b;
      if ((s & bit_b) == 0) continue;
      const Occupation mid = s & ~bit_b;
      const Occupation bit_a = Occupation{1} << a;
      if ((mid & bit_a) != 0) continue;
      const double sign = detail::jordan_wigner_sign(s, b) * detail::jordan_wigner_sign(mid, a);
      entries.emplace_back(static_cast<int>(mid | bit_a), static_cast<int>(s), sign * c);
    }
  }
  SparseMatrix m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  m.setFromTriplets(entries.begin(), entries.end());
  return m;
}

// ---------------------------------------------------------------------------
// Vacua

struct VacuumSpec {
  enum class Kind { kStandard, kBand };
  Kind kind = Kind::kStandard;
  std::optional<BandSpec> band;

  static VacuumSpec standard() { return {}; }
  static VacuumSpec banded(BandSpec spec) {
    spec.validate();
    return {Kind::kBand, spec};
  }

  bool is_band() const { return kind == Kind::kBand; }

  bool occupied(const Mode& mode, double mass) const {
    if (mode.sign > 0) return false;
    return kind == Kind::kStandard || band->contains(mode, mass);
  }

  std::string name() const { return is_band() ? "band" : "standard"; }
};

inline Occupation vacuum_occupation(const VacuumSpec& vac, const FockBasis& basis) {
  Occupation occ = 0;
  for (int i = 0; i < basis.mode_count(); ++i) {
    if (vac.occupied(basis.mode(i), basis.params().mass)) occ |= Occupation{1} << i;
  }
  return occ;
}

/// Largest norm among the vector zeros that define the vacuum:
///   a_n |vac> = 0 for n > 0,  a_n^dag |vac> = 0 for occupied n,
///   a_n |vac> = 0 for negative-energy n outside the band.
inline double vacuum_defect(const VacuumSpec& vac, const FockBasis& basis,
                            const StateVector& state) {
  double worst = 0.0;
  for (int i = 0; i < basis.mode_count(); ++i) {
    const bool occ = vac.occupied(basis.mode(i), basis.params().mass);
    const auto op = ladder(basis, i, occ ? Ladder::kCreate : Ladder::kDestroy);
    worst = std::max(worst, (op.matrix * state).norm());
  }
  return worst;
}

inline StateVector build_vacuum(const VacuumSpec& vac, const FockBasis& basis) {
  if (vac.is_band()) {
    bool any = false;
    for (const auto& m : basis.modes()) any = any || vac.band->contains(m, basis.params().mass);
    if (!any) throw ConfigError("band vacuum: no negative-energy mode of the basis lies in the band");
  }
  StateVector v = StateVector::Zero(static_cast<Eigen::Index>(basis.dimension()));
  v(static_cast<Eigen::Index>(vacuum_occupation(vac, basis))) = 1.0;
  if (vacuum_defect(vac, basis, v) != 0.0) {
    throw std::logic_error("vacuum does not satisfy its defining annihilation conditions");
  }
  return v;
}

// ---------------------------------------------------------------------------
// Operators

/// xi_R: the c-number that sets the energy of the given vacuum to zero.
inline double renormalization_constant(const FockBasis& basis, const VacuumSpec& vac) {
  double xi = 0.0;
  for (const auto& m : basis.modes()) {
    if (vac.occupied(m, basis.params().mass)) xi += m.signed_energy();
  }
  return xi;
}

/// H0 = sum_n sign_n E_n a_n^dag a_n - xi_R. The symmetrized-field form differs
/// from this by a c-number, which xi_R absorbs.
inline FockOperator build_H0(const FockBasis& basis, const VacuumSpec& vac) {
  const auto dim = basis.dimension();
  const double xi = renormalization_constant(basis, vac);
  std::vector<Eigen::Triplet<Complex>> entries;
  entries.reserve(dim);
  for (Occupation s = 0; s < dim; ++s) {
    double e = -xi;
    for (int i = 0; i < basis.mode_count(); ++i) {
      if (s & (Occupation{1} << i)) e += basis.mode(i).signed_energy();
    }
    entries.emplace_back(static_cast<int>(s), static_cast<int>(s), e);
  }
  SparseMatrix m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  m.setFromTriplets(entries.begin(), entries.end());
  return {m, "H0"};
}

/// First-quantized matrix <a|chi|b> over the basis modes.
inline DenseMatrix chi_matrix(const FockBasis& basis, const GaugeProfile& chi) {
  const int n = basis.mode_count();
  DenseMatrix x = DenseMatrix::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) x(a, b) = chi_matrix_element(basis.mode(a), basis.mode(b), chi);
  }
  return x;
}

/// rho_w = e sum_ab <a|chi|b> (a_a^dag a_b - delta_ab / 2).
inline FockOperator build_rho_w(const FockBasis& basis, const GaugeProfile& chi) {
  const double e = basis.params().charge;
  const DenseMatrix x = chi_matrix(basis, chi);
  return {one_body_operator(basis, e * x, -0.5 * e * x.trace()), "rho_w"};
}

/// Coefficients of J(z) grouped by phase: J(z) = sum_q J_q e^{i 2pi q z / L},
/// q = n_b - n_a for the term a_a^dag a_b. The -delta/2 constant sits in q = 0.
inline std::map<int, FockOperator> current_harmonics(const FockBasis& basis) {
  const double e = basis.params().charge;
  const int n = basis.mode_count();
  std::map<int, DenseMatrix> grouped;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const Complex c = alpha_z_element(basis.mode(a), basis.mode(b));
      if (c == Complex{}) continue;
      const int q = basis.mode(b).n - basis.mode(a).n;
      auto [it, inserted] = grouped.try_emplace(q, DenseMatrix::Zero(n, n));
      it->second(a, b) = e * c;
    }
  }
  std::map<int, FockOperator> out;
  for (const auto& [q, coeff] : grouped) {
    const Complex shift = q == 0 ? Complex(-0.5 * coeff.trace()) : Complex{};
    out.emplace(q, FockOperator{one_body_operator(basis, coeff, shift), "J_q" + std::to_string(q)});
  }
  return out;
}

/// J(z) = e sum_ab (phi_a^dag alpha_z phi_b)(z) (a_a^dag a_b - delta_ab / 2).
inline FockOperator build_current(const FockBasis& basis, double z) {
  const double step = basis.params().momentum_step();
  const auto dim = static_cast<Eigen::Index>(basis.dimension());
  SparseMatrix total(dim, dim);
  for (const auto& [q, op] : current_harmonics(basis)) {
    total += std::exp(kI * (step * q * z)) * op.matrix;
  }
  return {total, "J(z)"};
}

/// K = integral J(z) dchi/dz dz, the flux term of the continuity equation.
inline FockOperator build_gradient_flux(const FockBasis& basis, const GaugeProfile& chi) {
  const double e = basis.params().charge;
  const int n = basis.mode_count();
  DenseMatrix k = DenseMatrix::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      k(a, b) = kI * gradient_matrix_element(basis.mode(a), basis.mode(b), chi);
    }
  }
  return {one_body_operator(basis, e * k, -0.5 * e * k.trace()), "K"};
}

// ---------------------------------------------------------------------------
// Expectation values

inline Complex expectation(const SparseMatrix& op, const StateVector& v) { return v.dot(op * v); }

/// <v|[A,B]|v> from matrix-vector products.
inline Complex commutator_expectation(const SparseMatrix& a, const SparseMatrix& b,
                                      const StateVector& v) {
  const StateVector av = a * v;
  const StateVector bv = b * v;
  return v.dot(a * bv) - v.dot(b * av);
}

struct DoubleCommutatorResult {
  double half_double_commutator = 0.0;  // (1/2) <v|[rho,[H,rho]]|v>
  double rho_h_rho = 0.0;               // <v|rho H rho|v>
  double vacuum_energy = 0.0;           // <v|H|v>, zero after renormalization
  double renormalization = 0.0;         // xi_R
  double rho_vacuum = 0.0;              // <v|rho_w|v>
};

/// (1/2)<v|[rho,[H,rho]]|v> and <v|rho H rho|v> for explicit operators.
inline DoubleCommutatorResult double_commutator_expectation(const SparseMatrix& h,
                                                            const SparseMatrix& rho,
                                                            const StateVector& v) {
  const StateVector rv = rho * v;
  const StateVector hv = h * v;
  const StateVector hrv = h * rv;
  // [H,rho] v and [H,rho] rho v
  const StateVector cv = hrv - rho * hv;
  const StateVector rrv = rho * rv;
  const StateVector crv = h * rrv - rho * hrv;
  DoubleCommutatorResult r;
  r.half_double_commutator = 0.5 * (v.dot(rho * cv) - v.dot(crv)).real();
  r.rho_h_rho = rv.dot(hrv).real();
  r.vacuum_energy = v.dot(hv).real();
  r.rho_vacuum = v.dot(rv).real();
  return r;
}

inline DoubleCommutatorResult double_commutator_expectation(const VacuumSpec& vac,
                                                            const GaugeProfile& chi,
                                                            const FockBasis& basis) {
  const auto v = build_vacuum(vac, basis);
  const auto h = build_H0(basis, vac);
  const auto rho = build_rho_w(basis, chi);
  auto r = double_commutator_expectation(h.matrix, rho.matrix, v);
  r.renormalization = renormalization_constant(basis, vac);
  return r;
}

struct SchwingerFockResult {
  /// <v|[J(z), rho_w]|v> as a function of z.
  HarmonicCoefficient coefficient;
  /// Largest |<v|[J_q, rho_w]|v>| over phases other than +-k (selection rule: 0).
  double off_harmonic = 0.0;
  double current_vacuum = 0.0;  // <v|J(z)|v>, z-independent
};

inline SchwingerFockResult schwinger_expectation(const VacuumSpec& vac, const GaugeProfile& chi,
                                                 const FockBasis& basis) {
  const auto v = build_vacuum(vac, basis);
  const auto rho = build_rho_w(basis, chi);
  SchwingerFockResult out;
  out.coefficient.k = chi.k();
  for (const auto& [q, jq] : current_harmonics(basis)) {
    const Complex value = commutator_expectation(jq.matrix, rho.matrix, v);
    if (q == chi.harmonic) {
      out.coefficient.plus += value;
    } else if (q == -chi.harmonic) {
      out.coefficient.minus += value;
    } else {
      out.off_harmonic = std::max(out.off_harmonic, std::abs(value));
    }
    if (q == 0) out.current_vacuum = expectation(jq.matrix, v).real();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Operator identities

namespace detail {
// Distance of a square matrix from the nearest multiple of the identity.
inline double scalar_defect(const DenseMatrix& m) {
  const Complex c = m.trace() / static_cast<double>(m.rows());
  return (m - c * DenseMatrix::Identity(m.rows(), m.cols())).norm();
}
}  // namespace detail

/// || [[A,B],[C,D]] - 2[A,D]{B,C} + 2[B,D]{A,C} + 2[A,C]{B,D} - 2[B,C]{A,D} ||_F
/// Requires {A,C}, {A,D}, {B,C}, {B,D} to be c-numbers.
inline double commutator_expansion_check(const DenseMatrix& a, const DenseMatrix& b,
                                        const DenseMatrix& c, const DenseMatrix& d,
                                        double scalar_tolerance = 1e-12) {
  const DenseMatrix ac = anticommutator(a, c);
  const DenseMatrix ad = anticommutator(a, d);
  const DenseMatrix bc = anticommutator(b, c);
  const DenseMatrix bd = anticommutator(b, d);
  const std::pair<const char*, const DenseMatrix*> premises[] = {
      {"{A,C}", &ac}, {"{A,D}", &ad}, {"{B,C}", &bc}, {"{B,D}", &bd}};
  for (const auto& [name, m] : premises) {
    const double defect = detail::scalar_defect(*m);
    if (defect > scalar_tolerance) {
      throw PreconditionError(std::string("anticommutator ") + name + " is not a c-number", defect);
    }
  }
  const DenseMatrix lhs = commutator(commutator(a, b), commutator(c, d));
  const DenseMatrix rhs = 2.0 * commutator(a, d) * bc - 2.0 * commutator(b, d) * ac -
                          2.0 * commutator(a, c) * bd + 2.0 * commutator(b, c) * ad;
  return (lhs - rhs).norm();
}

inline double commutator_expansion_check(const FockOperator& a, const FockOperator& b,
                                        const FockOperator& c, const FockOperator& d,
                                        double scalar_tolerance = 1e-12) {
  return commutator_expansion_check(a.dense(), b.dense(), c.dense(), d.dense(), scalar_tolerance);
}

/// Dense matrix exponential (Pade scaling-and-squaring).
inline DenseMatrix matrix_exponential(const DenseMatrix& m) { return m.exp(); }

struct ExponentialPremises {
  double continuity = 0.0;  // ||[H,rho] + iK||_F
  double flux = 0.0;        // ||[rho,K]||_F
};

inline ExponentialPremises exponential_premises(const DenseMatrix& h, const DenseMatrix& rho,
                                             const DenseMatrix& k) {
  return {(commutator(h, rho) + kI * k).norm(), commutator(rho, k).norm()};
}

/// Premise residuals that do not fit the PreconditionError's single deviation.
class ExponentialPremiseError : public PreconditionError {
 public:
  explicit ExponentialPremiseError(ExponentialPremises p)
      : PreconditionError("exponential identity premises not met: ||[H,rho]+iK|| = " +
                              std::to_string(p.continuity) +
                              ", ||[rho,K]|| = " + std::to_string(p.flux),
                          std::max(p.continuity, p.flux)),
        premises_(p) {}
  const ExponentialPremises& premises() const { return premises_; }

 private:
  ExponentialPremises premises_;
};

/// || [H, exp(-i rho)] + exp(-i rho) K ||_F under [H,rho] = -iK and [rho,K] = 0.
inline double exponential_identity_check(const DenseMatrix& h, const DenseMatrix& rho,
                                        const DenseMatrix& k, double premise_tolerance = 1e-12) {
  if (h.rows() > 1024) throw ConfigError("exponential identity check limited to 10 modes");
  const auto premises = exponential_premises(h, rho, k);
  if (premises.continuity > premise_tolerance || premises.flux > premise_tolerance) {
    throw ExponentialPremiseError(premises);
  }
  const DenseMatrix u = matrix_exponential(-kI * rho);
  return (commutator(h, u) + u * k).norm();
}

inline double exponential_identity_check(const FockOperator& h, const FockOperator& rho,
                                        const FockOperator& k, double premise_tolerance = 1e-12) {
  return exponential_identity_check(h.dense(), rho.dense(), k.dense(), premise_tolerance);
}

struct OperatorTriple {
  DenseMatrix h;
  DenseMatrix rho;
  DenseMatrix k;
};

struct Hop {
  int to = 0;
  int from = 0;
  Complex weight{1.0, 0.0};
};

/// H = H0 (standard vacuum), rho = sum w a_to^dag a_from over hops sharing one
/// energy gap Delta, K = i Delta rho. Then [H,rho] = Delta rho = -iK and
/// [rho,K] = 0, so the exponential identity applies with K != 0.
inline OperatorTriple equal_gap_triple(const FockBasis& basis, std::span<const Hop> hops) {
  if (hops.empty()) throw ConfigError("equal-gap triple needs at least one hop");
  const double gap = basis.mode(hops.front().to).signed_energy() -
                     basis.mode(hops.front().from).signed_energy();
  const int n = basis.mode_count();
  DenseMatrix coeff = DenseMatrix::Zero(n, n);
  for (const auto& hop : hops) {
    const double g = basis.mode(hop.to).signed_energy() - basis.mode(hop.from).signed_energy();
    if (std::abs(g - gap) > 1e-12 * std::max(1.0, std::abs(gap))) {
      throw ConfigError("hops of an equal-gap triple must share one energy gap");
    }
    coeff(hop.to, hop.from) += hop.weight;
  }
  OperatorTriple t;
  t.h = DenseMatrix(build_H0(basis, VacuumSpec::standard()).matrix);
  t.rho = DenseMatrix(one_body_operator(basis, coeff));
  t.k = kI * gap * t.rho;
  return t;
}

/// Premise residuals of the physical pair (H0, rho_w) with K the gradient flux.
/// The continuity premise holds exactly; the flux premise fails in any
/// truncation because the truncated chi and alpha_z chi' matrices do not commute.
inline ExponentialPremises physical_premises(const FockBasis& basis, const VacuumSpec& vac,
                                           const GaugeProfile& chi) {
  const auto h = build_H0(basis, vac).matrix;
  const auto rho = build_rho_w(basis, chi).matrix;
  const auto k = build_gradient_flux(basis, chi).matrix;
  ExponentialPremises p;
  p.continuity = SparseMatrix(commutator(h, rho) + kI * k).norm();
  p.flux = commutator(rho, k).norm();
  return p;
}

}  // namespace dirac_lab
