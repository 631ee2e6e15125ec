#pragma once

// CLI subcommands. Each builds a Report; ConfigError escapes to the caller
// (exit code 2), check failures are recorded in the report (exit code 1).

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "dirac_lab/config.hpp"
#include "dirac_lab/continuum.hpp"
#include "dirac_lab/fit.hpp"
#include "dirac_lab/fock_space.hpp"
#include "dirac_lab/mode_basis.hpp"
#include "dirac_lab/report.hpp"
#include "dirac_lab/spectral.hpp"

namespace dirac_lab {

struct RunContext {
  unsigned workers = 1;
  std::uint64_t seed = 20240611;
};

// Tolerances
inline constexpr double kExactTol = 1e-12;
inline constexpr double kCompletenessTol = 1e-14;
inline constexpr double kQuadratureTol = 1e-10;
inline constexpr double kExponentialTol = 1e-10;
inline constexpr double kContinuumRatioTol = 0.02;
inline constexpr double kConvergedCutoff = 50.0;   // in units of |k|
inline constexpr double kCancellationMinCutoff = 10.0;  // in units of |k|

namespace rel {
inline const char* const kEnumeration = "mode enumeration: 4 (2 n_max + 1) plane-wave modes";
inline const char* const kNormalization = "spinor normalization u^dag u = 1/L";
inline const char* const kEigen = "Dirac eigen-equation (alpha_z p + beta m) u = lambda E u";
inline const char* const kOrthogonality = "orthogonality of the four spinors at fixed momentum";
inline const char* const kCompleteness = "spinor completeness sum u u^dag = I/L";
inline const char* const kFirstQuantized = "first-quantized commutator [H, chi] = -i alpha_z chi'";
inline const char* const kChiHermitian = "Hermiticity of <a|chi|b>";
inline const char* const kCar = "canonical anticommutation relations";
inline const char* const kVacuum = "vacuum defining annihilation conditions";
inline const char* const kRenormalized = "renormalized vacuum energy <vac|H0|vac> = 0";
inline const char* const kHermitian = "Hermiticity of H0, rho_w, J(z), K";
inline const char* const kContinuity = "continuity [H0, rho_w] = -i K";
inline const char* const kDoubleCommutator =
    "(1/2)<vac|[rho_w,[H0,rho_w]]|vac> = <vac|rho_w H0 rho_w|vac> for an H0 eigenstate";
inline const char* const kPositive =
    "standard-vacuum double commutator > 0 (contradicts the operator-algebra zero)";
inline const char* const kBandZero = "band-vacuum double commutator vanishes";
inline const char* const kSelection = "cos(kz) selection rule: only e^{+-ikz} harmonics";
inline const char* const kSinForm = "Schwinger term is i sigma sin(kz)";
inline const char* const kBandSchwinger = "band-vacuum Schwinger term vanishes";
inline const char* const kShift = "commutators invariant under c-number shifts";
inline const char* const kCommutatorExpansion = "[[A,B],[C,D]] expansion for c-number anticommutators";
inline const char* const kExponential =
    "[H, e^{-i rho}] = -e^{-i rho} K given [H,rho] = -iK and [rho,K] = 0";
inline const char* const kOracle = "Fock-matrix values equal mode-sum evaluators";
inline const char* const kF1 = "F1 antisymmetry: band-to-band terms cancel";
inline const char* const kWithin = "occupied-to-occupied terms cancel";
inline const char* const kQuadrature = "closed-form cutoff integral equals its quadrature";
inline const char* const kParity = "coefficients odd under k -> -k";
inline const char* const kDeltaJ = "delta J_vac is real and proportional to -sin(kz)";
inline const char* const kDeltaSupport = "delta-constraint support intervals";
inline const char* const kCancellation = "continuum band cancellation |I+ + I-| / |I+| <= 3k/r";
inline const char* const kContinuumLimit = "discrete Schwinger coefficient converges to continuum";
inline const char* const kZeroAmplitude = "V0 = 0: every commutator quantity vanishes";
inline const char* const kSlope = "log-log decay exponent of the cutoff integral";
}  // namespace rel

namespace detail {

inline Json harmonic_json(const HarmonicCoefficient& h) {
  Json j;
  j["sigma"] = h.sigma().real();
  j["tau"] = h.tau().real();
  j["plus"] = {h.plus.real(), h.plus.imag()};
  j["minus"] = {h.minus.real(), h.minus.imag()};
  return j;
}

inline double max_abs(const SparseMatrix& m) {
  double worst = 0.0;
  for (int c = 0; c < m.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(m, c); it; ++it) worst = std::max(worst, std::abs(it.value()));
  }
  return worst;
}

/// Ratio guarded against a zero scale: 0/0 -> 0.
inline double scaled(double residual, double scale) {
  if (scale == 0.0) return residual == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return residual / scale;
}

/// Sum of |terms| of <rho H rho> and of the Schwinger transition sum over a
/// truncated basis; the scale a vanishing total is compared against.
struct TruncationScales {
  double rho_h_rho = 0.0;
  double schwinger = 0.0;
};

inline TruncationScales truncation_scales(const FockBasis& basis, const VacuumSpec& vac,
                                          const GaugeProfile& chi) {
  const double e2 = basis.params().charge * basis.params().charge;
  const double mass = basis.params().mass;
  const double length = basis.params().ring_length;
  TruncationScales s;
  for (const auto& a : basis.modes()) {
    if (!vac.occupied(a, mass)) continue;
    for (const auto& b : basis.modes()) {
      const double w = std::norm(chi_matrix_element(b, a, chi));
      s.rho_h_rho += e2 * w * std::abs(b.signed_energy() - a.signed_energy());
      if (!vac.occupied(b, mass) && std::abs(b.n - a.n) == chi.harmonic) {
        s.schwinger += e2 * std::abs(current_pair_element(b, a, length)) * 0.5 *
                       std::abs(chi.amplitude) * length;
      }
    }
  }
  // minus_conjugate doubles each transition
  s.schwinger *= 2.0;
  return s;
}

struct BandPlan {
  std::optional<VacuumSpec> vac;
  std::string unusable;     // no band vacuum at all
  std::string inadmissible; // band exists but the margin is short
  int edge = -1;
  int margin = 0;
  int need = 0;
};

inline BandPlan plan_band(const RunConfig& cfg) {
  BandPlan plan;
  plan.need = cfg.required_margin();
  const auto band = cfg.band();
  if (!band) {
    plan.unusable = "no band fits the lattice: n_max " + std::to_string(cfg.n_max) +
                    " is below the required margin " + std::to_string(plan.need);
    return plan;
  }
  plan.edge = band->edge_index(cfg.mode_params());
  if (plan.edge < 0) {
    plan.unusable = "band of depth " + cell(band->depth) + " contains no lattice mode";
    return plan;
  }
  plan.vac = VacuumSpec::banded(*band);
  plan.margin = cfg.n_max - plan.edge;
  if (plan.margin < plan.need) {
    plan.inadmissible = "band margin " + std::to_string(plan.margin) + " < required " +
                        std::to_string(plan.need) + " lattice steps (band edge n=" +
                        std::to_string(plan.edge) + ", n_max=" + std::to_string(cfg.n_max) + ")";
  }
  return plan;
}

inline Json band_json(const BandPlan& plan, double mass) {
  Json j;
  if (!plan.vac) return Json{{"available", false}, {"reason", plan.unusable}};
  j["available"] = true;
  j["depth"] = plan.vac->band->depth;
  j["radius"] = plan.vac->band->radius(mass);
  j["edge_index"] = plan.edge;
  j["margin"] = plan.margin;
  j["required_margin"] = plan.need;
  return j;
}

/// f(i) for i in [0, count) on up to `workers` threads; results in index order.
template <typename T, typename F>
std::vector<T> parallel_map(std::size_t count, unsigned workers, F&& f) {
  std::vector<std::optional<T>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  const auto run = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        slots[i] = f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(count)));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < n; ++w) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  std::vector<T> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    out.push_back(std::move(*slots[i]));
  }
  return out;
}

inline Complex random_complex(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double re = u(rng);
  return {re, u(rng)};
}

/// Basis of the given modes of `params` (kept in enumeration order).
template <typename Pred>
FockBasis sub_basis(const ModeParams& params, SpinFilter spins, Pred&& keep) {
  std::vector<Mode> modes;
  for (const auto& m : build_modes(params)) {
    if (spin_selected(spins, m.spin) && keep(m)) modes.push_back(m);
  }
  return FockBasis(params, std::move(modes));
}

/// Reference value printed for the continuum standard-vacuum coefficient,
/// e^2 V0 k / 2 pi^2; reported next to the computed value.
inline double reference_coefficient(const ContinuumParams& c) {
  return c.charge * c.charge * c.amplitude * c.k / (2.0 * kPi * kPi);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// modes

inline Report cmd_modes(const RunConfig& cfg, const RunContext&) {
  Report report("modes");
  report.config() = config_echo(cfg);
  const auto params = cfg.mode_params();
  const auto chi = cfg.gauge();
  const auto modes = build_modes(params);
  const double length = params.ring_length;

  Table table;
  table.header = {"index", "n", "p", "energy", "sign", "spin", "signed_energy"};
  for (int c = 1; c <= 4; ++c) {
    table.header.push_back("u" + std::to_string(c) + "_re");
    table.header.push_back("u" + std::to_string(c) + "_im");
  }
  for (const char* h : {"norm_residual", "eigen_residual", "completeness_residual"}) {
    table.header.push_back(h);
  }

  double worst_norm = 0.0, worst_eigen = 0.0, worst_complete = 0.0, worst_orth = 0.0;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const auto& m = modes[i];
    const double norm = std::abs(length * m.u.squaredNorm() - 1.0);
    const double eigen = (dirac_hamiltonian(m.p, params.mass) * m.u - m.signed_energy() * m.u).norm() /
                         (m.energy * m.u.norm());
    // scale-free: |L sum u u^dag - I|
    const double complete = length * completeness_residual(m.p, params.mass, length);
    worst_norm = std::max(worst_norm, norm);
    worst_eigen = std::max(worst_eigen, eigen);
    worst_complete = std::max(worst_complete, complete);
    for (const auto& o : modes) {
      if (o.n != m.n || (o.sign == m.sign && o.spin == m.spin)) continue;
      worst_orth = std::max(worst_orth, length * std::abs(spinor_overlap(m, o)));
    }
    std::vector<std::string> row = {cell(static_cast<int>(i)), cell(m.n), cell(m.p), cell(m.energy),
                                    cell(m.sign), cell(m.spin), cell(m.signed_energy())};
    for (int c = 0; c < 4; ++c) {
      row.push_back(cell(m.u(c).real()));
      row.push_back(cell(m.u(c).imag()));
    }
    row.push_back(cell(norm));
    row.push_back(cell(eigen));
    row.push_back(cell(complete));
    table.rows.push_back(std::move(row));
  }
  report.tables()["modes"] = std::move(table);

  const long long expected = 4LL * (2LL * params.n_max + 1);
  report.check_true("mode_count", static_cast<long long>(modes.size()) == expected,
                    rel::kEnumeration, static_cast<long long>(modes.size()));
  report.check_within("normalization", worst_norm, kExactTol, rel::kNormalization);
  report.check_within("eigen_equation", worst_eigen, kExactTol, rel::kEigen);
  report.check_within("orthogonality", worst_orth, kExactTol, rel::kOrthogonality);
  report.check_within("completeness", worst_complete, kCompletenessTol, rel::kCompleteness);

  double worst_fq = 0.0, fq_scale = 0.0, worst_herm = 0.0, chi_scale = 0.0;
  for (const auto& a : modes) {
    for (const auto& b : modes) {
      worst_fq = std::max(worst_fq, std::abs(first_quantized_commutator_check(a, b, chi)));
      fq_scale = std::max(fq_scale, std::abs(gradient_matrix_element(a, b, chi)));
      const Complex ab = chi_matrix_element(a, b, chi);
      worst_herm = std::max(worst_herm, std::abs(ab - std::conj(chi_matrix_element(b, a, chi))));
      chi_scale = std::max(chi_scale, std::abs(ab));
    }
  }
  report.check_within("first_quantized_identity", detail::scaled(worst_fq, std::max(fq_scale, 1.0)),
                      kExactTol, rel::kFirstQuantized);
  report.check_within("chi_hermitian", detail::scaled(worst_herm, std::max(chi_scale, 1.0)), kExactTol,
                      rel::kChiHermitian);

  auto& r = report.results();
  r["mode_count"] = modes.size();
  r["momentum_step"] = params.momentum_step();
  r["momentum_cutoff"] = params.momentum(params.n_max);
  r["harmonic"] = chi.harmonic;
  r["k"] = chi.k();
  return report;
}

// ---------------------------------------------------------------------------
// fock-check

inline Report cmd_fock_check(const RunConfig& cfg, const RunContext& ctx) {
  Report report("fock-check");
  report.config() = config_echo(cfg);
  const auto params = cfg.mode_params();
  const auto chi = cfg.gauge();
  const auto basis = FockBasis::from_params(params, cfg.spins);
  const int modes = basis.mode_count();
  const auto dim = basis.dimension();
  const auto plan = detail::plan_band(cfg);
  std::mt19937_64 rng(ctx.seed);

  // canonical anticommutation relations
  std::vector<FockOperator> create, destroy;
  for (int i = 0; i < modes; ++i) {
    create.push_back(ladder(basis, i, Ladder::kCreate));
    destroy.push_back(ladder(basis, i, Ladder::kDestroy));
  }
  const SparseMatrix id = sparse_identity(dim);
  double car = 0.0;
  for (int i = 0; i < modes; ++i) {
    for (int j = 0; j < modes; ++j) {
      SparseMatrix mixed = anticommutator(destroy[i].matrix, create[j].matrix);
      if (i == j) mixed -= id;
      car = std::max(car, detail::max_abs(mixed));
      if (j >= i) car = std::max(car, detail::max_abs(anticommutator(destroy[i].matrix, destroy[j].matrix)));
    }
  }
  report.check_within("car", car, kExactTol, rel::kCar);

  // vacua, H0, rho_w, K
  struct VacuumRun {
    std::string name;
    VacuumSpec vac;
    StateVector state;
    FockOperator h;
    DoubleCommutatorResult dc;
    SchwingerFockResult sw;
    detail::TruncationScales scale;
    double min_energy = 0.0;
  };
  std::vector<VacuumRun> runs;
  const auto rho = build_rho_w(basis, chi);
  const auto flux = build_gradient_flux(basis, chi);
  std::vector<VacuumSpec> vacua = {VacuumSpec::standard()};
  if (plan.vac) vacua.push_back(*plan.vac);
  for (const auto& vac : vacua) {
    VacuumRun run{vac.name(), vac, build_vacuum(vac, basis), build_H0(basis, vac), {}, {}, {}, 0.0};
    run.dc = double_commutator_expectation(run.h.matrix, rho.matrix, run.state);
    run.dc.renormalization = renormalization_constant(basis, vac);
    run.sw = schwinger_expectation(vac, chi, basis);
    run.scale = detail::truncation_scales(basis, vac, chi);
    run.min_energy = run.h.matrix.diagonal().real().minCoeff();
    runs.push_back(std::move(run));
  }

  for (const auto& run : runs) {
    report.check_within("vacuum_definition_" + run.name, vacuum_defect(run.vac, basis, run.state),
                        kExactTol, rel::kVacuum);
    report.check_within("vacuum_energy_" + run.name,
                        std::abs(run.dc.vacuum_energy) / std::max(1.0, std::abs(run.dc.renormalization)),
                        kExactTol, rel::kRenormalized, run.dc.vacuum_energy);
  }
  if (!plan.vac) report.skip("vacuum_definition_band", plan.unusable, rel::kVacuum);

  double herm = std::max({runs[0].h.hermiticity_defect(), rho.hermiticity_defect(),
                          flux.hermiticity_defect()});
  for (double frac : {0.0, 0.37}) {
    herm = std::max(herm, build_current(basis, frac * params.ring_length).hermiticity_defect());
  }
  report.check_within("hermiticity", herm, kExactTol, rel::kHermitian);

  const double continuity =
      SparseMatrix(commutator(runs[0].h.matrix, rho.matrix) + kI * flux.matrix).norm();
  report.check_within("continuity", detail::scaled(continuity, std::max(1.0, flux.matrix.norm())),
                      kExactTol, rel::kContinuity);

  for (const auto& run : runs) {
    const double scale = std::max({std::abs(run.dc.half_double_commutator), std::abs(run.dc.rho_h_rho),
                                   run.scale.rho_h_rho});
    report.check_within(
        "double_commutator_equality_" + run.name,
        detail::scaled(std::abs(run.dc.half_double_commutator - run.dc.rho_h_rho), scale), kExactTol,
        rel::kDoubleCommutator,
        Json{{"half_double_commutator", run.dc.half_double_commutator},
             {"rho_h_rho", run.dc.rho_h_rho}});
  }

  const bool connected = cfg.amplitude != 0.0 && params.n_max >= chi.harmonic;
  if (connected) {
    report.check_true("standard_double_commutator_positive", runs[0].dc.half_double_commutator > 0.0,
                      rel::kPositive, runs[0].dc.half_double_commutator);
  } else {
    report.skip("standard_double_commutator_positive",
                cfg.amplitude == 0.0 ? "amplitude V0 = 0: no chi-connected pair"
                                     : "n_max below the gauge harmonic: no chi-connected pair",
                rel::kPositive);
  }

  if (cfg.amplitude == 0.0) {
    double worst = 0.0;
    for (const auto& run : runs) {
      worst = std::max({worst, std::abs(run.dc.half_double_commutator), std::abs(run.dc.rho_h_rho),
                        run.sw.coefficient.magnitude(), run.sw.off_harmonic});
    }
    report.check_within("zero_amplitude_commutators", worst, 0.0, rel::kZeroAmplitude);
  }

  const std::string band_reason = plan.vac ? plan.inadmissible : plan.unusable;
  if (band_reason.empty()) {
    const auto& b = runs[1];
    report.check_within("band_double_commutator_zero",
                        detail::scaled(std::abs(b.dc.half_double_commutator), b.scale.rho_h_rho),
                        kExactTol, rel::kBandZero, b.dc.half_double_commutator);
    report.check_within("band_rho_h_rho_zero", detail::scaled(std::abs(b.dc.rho_h_rho), b.scale.rho_h_rho),
                        kExactTol, rel::kBandZero, b.dc.rho_h_rho);
    report.check_within("band_schwinger_zero", detail::scaled(b.sw.coefficient.magnitude(), b.scale.schwinger),
                        kExactTol, rel::kBandSchwinger, detail::harmonic_json(b.sw.coefficient));
  } else {
    report.skip("band_double_commutator_zero", band_reason, rel::kBandZero);
    report.skip("band_rho_h_rho_zero", band_reason, rel::kBandZero);
    report.skip("band_schwinger_zero", band_reason, rel::kBandSchwinger);
  }

  for (const auto& run : runs) {
    const double s = std::max(run.scale.schwinger, run.sw.coefficient.magnitude());
    report.check_within("schwinger_selection_rule_" + run.name, detail::scaled(run.sw.off_harmonic, s),
                        kExactTol, rel::kSelection);
    const double sin_defect =
        std::max(run.sw.coefficient.imaginarity_defect(), std::abs(run.sw.coefficient.tau()));
    report.check_within("schwinger_sin_form_" + run.name, detail::scaled(sin_defect, s), kExactTol,
                        rel::kSinForm, detail::harmonic_json(run.sw.coefficient));
  }

  // c-number shifts
  {
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    const double ch = u(rng), cr = u(rng), cj = u(rng);
    double worst = 0.0;
    for (const auto& run : runs) {
      const SparseMatrix h2 = run.h.matrix + Complex(ch) * id;
      const SparseMatrix r2 = rho.matrix + Complex(cr) * id;
      const auto dc2 = double_commutator_expectation(h2, r2, run.state);
      // scale of the terms that cancel once the shifts are in
      const double r2v = (r2 * run.state).norm();
      const double h2_max = h2.diagonal().cwiseAbs().maxCoeff();
      const double s1 = std::max({std::abs(run.dc.half_double_commutator), run.scale.rho_h_rho,
                                  r2v * r2v * h2_max});
      worst = std::max(worst, detail::scaled(std::abs(dc2.half_double_commutator - run.dc.half_double_commutator), s1));
      const double z = 0.23 * params.ring_length;
      const SparseMatrix j1 = build_current(basis, z).matrix;
      const SparseMatrix j2 = j1 + Complex(cj) * id;
      const Complex c1 = commutator_expectation(j1, rho.matrix, run.state);
      const Complex c2 = commutator_expectation(j2, r2, run.state);
      const double s2 = std::max({std::abs(c1), run.scale.schwinger, (j2 * run.state).norm() * r2v});
      worst = std::max(worst, detail::scaled(std::abs(c2 - c1), s2));
    }
    report.check_within("c_number_shift_invariance", worst, kExactTol, rel::kShift,
                        Json{{"h_shift", ch}, {"rho_shift", cr}, {"current_shift", cj}});
  }

  // [[A,B],[C,D]] over every ladder quadruple of a four-mode sub-basis, plus
  // random linear combinations.
  {
    std::vector<Mode> first(basis.modes().begin(), basis.modes().begin() + std::min(4, modes));
    const FockBasis small(params, first);
    std::vector<DenseMatrix> ops;
    for (int i = 0; i < small.mode_count(); ++i) {
      ops.push_back(ladder(small, i, Ladder::kCreate).dense());
      ops.push_back(ladder(small, i, Ladder::kDestroy).dense());
    }
    double worst = 0.0;
    long long cases = 0;
    for (const auto& a : ops)
      for (const auto& b : ops)
        for (const auto& c : ops)
          for (const auto& d : ops) {
            worst = std::max(worst, commutator_expansion_check(a, b, c, d));
            ++cases;
          }
    for (int trial = 0; trial < 64; ++trial) {
      DenseMatrix q[4];
      double norm = 1.0;
      for (auto& m : q) {
        m = DenseMatrix::Zero(ops[0].rows(), ops[0].cols());
        for (const auto& op : ops) m += detail::random_complex(rng) * op;
        norm *= std::max(1.0, m.norm());
      }
      worst = std::max(worst, commutator_expansion_check(q[0], q[1], q[2], q[3]) / norm);
      ++cases;
    }
    report.check_within("commutator_expansion_identity", worst, kExactTol, rel::kCommutatorExpansion,
                        Json{{"modes", small.mode_count()}, {"cases", cases}});
  }

  // exponential identity on synthetic premise-satisfying triples
  {
    const int spin = cfg.spins == SpinFilter::kSpin2 ? 2 : 1;
    const auto small = detail::sub_basis(params, SpinFilter::kBoth, [&](const Mode& m) {
      return std::abs(m.n) <= 1 && m.spin == spin;
    });
    std::vector<std::vector<Hop>> triples;
    triples.push_back({{small.index_of(0, +1, spin), small.index_of(0, -1, spin),
                        detail::random_complex(rng)}});
    triples.push_back({
        {small.index_of(1, +1, spin), small.index_of(1, -1, spin), detail::random_complex(rng)},
        {small.index_of(-1, +1, spin), small.index_of(-1, -1, spin), detail::random_complex(rng)},
        {small.index_of(1, +1, spin), small.index_of(-1, -1, spin), detail::random_complex(rng)},
        {small.index_of(-1, +1, spin), small.index_of(1, -1, spin), detail::random_complex(rng)},
    });
    double worst = 0.0;
    for (const auto& hops : triples) {
      const auto t = equal_gap_triple(small, hops);
      worst = std::max(worst, exponential_identity_check(t.h, t.rho, t.k) / std::max(1.0, t.k.norm()));
    }
    // K = 0: rho a real function of the occupation numbers
    {
      const int n = small.mode_count();
      DenseMatrix diag = DenseMatrix::Zero(n, n);
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      for (int i = 0; i < n; ++i) diag(i, i) = u(rng);
      const DenseMatrix h = DenseMatrix(build_H0(small, VacuumSpec::standard()).matrix);
      const DenseMatrix r = DenseMatrix(one_body_operator(small, diag));
      worst = std::max(worst, exponential_identity_check(h, r, DenseMatrix::Zero(h.rows(), h.cols())));
    }
    report.check_within("exponential_identity_synthetic", worst, kExponentialTol, rel::kExponential,
                        Json{{"triples", triples.size() + 1}, {"modes", small.mode_count()}});
  }
  const auto physical = physical_premises(basis, VacuumSpec::standard(), chi);
  const bool premises_hold =
      physical.continuity <= kExactTol * std::max(1.0, flux.matrix.norm()) && physical.flux <= kExactTol;
  if (premises_hold && dim > 1024) {
    report.skip("exponential_identity_physical",
                "dense exponential limited to 10 modes, basis has " + std::to_string(modes), rel::kExponential);
  } else if (premises_hold) {
    report.check_within("exponential_identity_physical",
                        exponential_identity_check(runs[0].h, rho, flux), kExponentialTol,
                        rel::kExponential);
  } else {
    report.skip("exponential_identity_physical",
                "premise [rho_w, K] = 0 does not hold in the truncation (||[rho_w,K]|| = " +
                    cell(physical.flux) + ")",
                rel::kExponential);
  }

  // Fock matrices against the mode sums
  for (const auto& run : runs) {
    if (run.vac.is_band() && !plan.inadmissible.empty()) {
      report.skip("oracle_" + run.name, plan.inadmissible, rel::kOracle);
      continue;
    }
    const auto o = oracle_crosscheck(cfg.mode_sum(run.vac, ctx.workers));
    report.check_within("oracle_" + run.name, o.max_deviation, kExactTol, rel::kOracle,
                        Json{{"rho_h_rho", o.rho_h_rho_deviation},
                             {"half_double_commutator", o.half_double_commutator_deviation},
                             {"schwinger", o.schwinger_deviation}});
  }
  if (!plan.vac) report.skip("oracle_band", plan.unusable, rel::kOracle);

  auto& r = report.results();
  r["mode_count"] = modes;
  r["dimension"] = dim;
  r["band"] = detail::band_json(plan, params.mass);
  for (const auto& run : runs) {
    Json v;
    v["half_double_commutator"] = run.dc.half_double_commutator;
    v["rho_h_rho"] = run.dc.rho_h_rho;
    v["renormalization"] = run.dc.renormalization;
    v["vacuum_energy"] = run.dc.vacuum_energy;
    v["lowest_energy"] = run.min_energy;
    v["rho_vacuum"] = run.dc.rho_vacuum;
    v["current_vacuum"] = run.sw.current_vacuum;
    v["schwinger"] = detail::harmonic_json(run.sw.coefficient);
    v["rho_h_rho_scale"] = run.scale.rho_h_rho;
    v["schwinger_scale"] = run.scale.schwinger;
    r["vacua"][run.name] = v;
  }
  r["physical_exponential_premises"] = {{"continuity", physical.continuity}, {"flux", physical.flux}};
  return report;
}

// ---------------------------------------------------------------------------
// spectral

inline Report cmd_spectral(const RunConfig& cfg, const RunContext& ctx) {
  Report report("spectral");
  report.config() = config_echo(cfg);
  const auto plan = detail::plan_band(cfg);
  const double mass = cfg.mass;

  const auto partials_json = [](const SpectralReport& s) {
    return Json{{"value", s.value},
                {"to_positive", s.partials.to_positive},
                {"to_below", s.partials.to_below},
                {"within", s.partials.within},
                {"abs_sum", s.partials.abs_sum},
                {"terms", s.partials.terms}};
  };
  const auto schwinger_json = [](const SchwingerSpectral& s, double e2) {
    Json j = detail::harmonic_json(s.total);
    j["i_plus"] = detail::harmonic_json(s.i_plus);
    j["i_minus"] = detail::harmonic_json(s.i_minus);
    j["partial_scale"] = s.partial_scale(e2);
    j["terms"] = s.term_count;
    return j;
  };
  const double e2 = cfg.charge * cfg.charge;

  const auto std_cfg = cfg.mode_sum(VacuumSpec::standard(), ctx.workers);
  const auto std_rhr = spectral_sum_rhoHrho(std_cfg);
  const auto std_sw = schwinger_mode_sum(std_cfg);
  if (cfg.amplitude != 0.0 && cfg.n_max >= std_cfg.chi.harmonic) {
    report.check_true("standard_rho_h_rho_positive", std_rhr.value > 0.0, rel::kPositive, std_rhr.value);
  } else {
    report.skip("standard_rho_h_rho_positive", "no chi-connected occupied-to-empty pair", rel::kPositive);
  }
  report.check_within("standard_within_class_cancels",
                      detail::scaled(std::abs(std_rhr.partials.within), std_rhr.partials.abs_sum),
                      kExactTol, rel::kWithin, std_rhr.partials.within);
  const double std_scale = std::max(std_sw.partial_scale(e2), std_sw.total.magnitude());
  report.check_within(
      "standard_schwinger_sin_form",
      detail::scaled(std::max(std_sw.total.imaginarity_defect(), std::abs(std_sw.total.tau())), std_scale),
      kExactTol, rel::kSinForm, std_sw.total.sigma().real());

  auto& r = report.results();
  r["standard"] = {{"rho_h_rho", partials_json(std_rhr)}, {"schwinger", schwinger_json(std_sw, e2)}};
  r["band"] = detail::band_json(plan, mass);

  const std::string band_reason = plan.vac ? plan.inadmissible : plan.unusable;
  if (band_reason.empty()) {
    const auto band_cfg = cfg.mode_sum(*plan.vac, ctx.workers);
    const auto rhr = spectral_sum_rhoHrho(band_cfg);
    const auto f1 = f1_antisymmetry_check(band_cfg);
    const auto sw = schwinger_mode_sum(band_cfg);
    report.check_within("band_f1_zero", detail::scaled(std::abs(f1.value), f1.abs_sum), kExactTol, rel::kF1,
                        f1.value);
    report.check_within("band_rho_h_rho_zero", detail::scaled(std::abs(rhr.value), rhr.partials.abs_sum),
                        kExactTol, rel::kBandZero, rhr.value);
    report.check_within("band_schwinger_zero", detail::scaled(sw.total.magnitude(), sw.partial_scale(e2)),
                        kExactTol, rel::kBandSchwinger, sw.total.sigma().real());
    r["band"]["rho_h_rho"] = partials_json(rhr);
    r["band"]["f1"] = {{"value", f1.value}, {"abs_sum", f1.abs_sum}, {"terms", f1.terms}};
    r["band"]["schwinger"] = schwinger_json(sw, e2);
  } else {
    report.skip("band_f1_zero", band_reason, rel::kF1);
    report.skip("band_rho_h_rho_zero", band_reason, rel::kBandZero);
    report.skip("band_schwinger_zero", band_reason, rel::kBandSchwinger);
  }
  return report;
}

// ---------------------------------------------------------------------------
// continuum helpers shared by schwinger / continuum / scan

namespace detail {

inline void add_cancellation_check(Report& report, const std::string& name, const ContinuumParams& c) {
  const double r = c.cutoff;
  const double bound = 3.0 * std::abs(c.k) / r;
  if (!(r >= kCancellationMinCutoff * std::abs(c.k))) {
    report.skip(name, "cutoff r = " + cell(r) + " below 10|k|", rel::kCancellation);
    return;
  }
  const auto b = band_integrals(c);
  const double ratio = scaled((b.i_plus + b.i_minus).magnitude(), b.i_plus.magnitude());
  report.check_within(name, ratio, bound, rel::kCancellation);
}

inline double parity_defect(const ContinuumParams& c) {
  auto flipped = c;
  flipped.k = -c.k;
  double worst = 0.0;
  const auto rel_diff = [](double a, double b) {
    const double s = std::max(std::abs(a), std::abs(b));
    return s == 0.0 ? 0.0 : std::abs(a + b) / s;
  };
  worst = std::max(worst, rel_diff(cutoff_integral(c), cutoff_integral(flipped)));
  worst = std::max(worst, rel_diff(schwinger_standard(c).sigma, schwinger_standard(flipped).sigma));
  if (c.finite_cutoff()) {
    const auto a = band_integrals(c);
    const auto b = band_integrals(flipped);
    worst = std::max(worst, rel_diff(a.i_plus.sigma().real(), b.i_plus.sigma().real()));
    worst = std::max(worst, rel_diff(a.i_minus.sigma().real(), b.i_minus.sigma().real()));
  }
  return worst;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// schwinger

inline Report cmd_schwinger(const RunConfig& cfg, const RunContext& ctx) {
  Report report("schwinger");
  report.config() = config_echo(cfg);
  auto& r = report.results();
  const double e2 = cfg.charge * cfg.charge;

  const auto cont = cfg.continuum();
  cont.validate();
  auto unlimited = cont;
  unlimited.cutoff = std::numeric_limits<double>::infinity();
  const auto c_inf = schwinger_standard(unlimited);
  const auto c_fin = schwinger_standard(cont);
  const double reference = detail::reference_coefficient(cont);
  r["continuum"] = {
      {"k", cont.k},
      {"cutoff", cont.cutoff},
      {"standard_sigma", c_inf.sigma},
      {"standard_sigma_at_cutoff", c_fin.sigma},
      {"delta_J_sin_amplitude", delta_J_vac(unlimited).sin_amplitude().real()},
      {"reference_coefficient", reference},
      {"correspondence_factor", reference == 0.0 ? Json(nullptr) : Json(c_inf.sigma / reference)},
  };
  const auto band = band_integrals(cont);
  r["continuum"]["band"] = {{"i_plus", detail::harmonic_json(band.i_plus)},
                            {"i_minus", detail::harmonic_json(band.i_minus)},
                            {"schwinger", detail::harmonic_json(band_schwinger(cont))}};
  detail::add_cancellation_check(report, "continuum_band_cancellation", cont);
  report.check_within("continuum_parity", detail::parity_defect(cont), kExactTol, rel::kParity);

  if (!cfg.has_lattice) {
    r["lattice"] = nullptr;
    return report;
  }

  const auto std_cfg = cfg.mode_sum(VacuumSpec::standard(), ctx.workers);
  const auto sw = schwinger_mode_sum(std_cfg);
  const double sigma_d = sw.total.sigma().real();
  const double p_max = cfg.mode_params().momentum(cfg.n_max);
  Json lat;
  lat["momentum_cutoff"] = p_max;
  lat["standard"] = detail::harmonic_json(sw.total);
  lat["standard"]["partial_scale"] = sw.partial_scale(e2);
  lat["ratio_to_continuum"] = c_inf.sigma == 0.0 ? Json(nullptr) : Json(sigma_d / c_inf.sigma);
  if (p_max > std::abs(cont.k)) {
    auto at_cut = cont;
    at_cut.cutoff = p_max;
    const double sigma_cut = schwinger_standard(at_cut).sigma;
    lat["continuum_sigma_at_lattice_cutoff"] = sigma_cut;
    lat["ratio_to_continuum_at_lattice_cutoff"] = sigma_cut == 0.0 ? Json(nullptr) : Json(sigma_d / sigma_cut);
  }

  if (!(p_max >= kConvergedCutoff * std::abs(cont.k))) {
    report.skip("discrete_matches_continuum",
                "lattice cutoff " + cell(p_max) + " below 50|k| = " + cell(kConvergedCutoff * std::abs(cont.k)),
                rel::kContinuumLimit);
  } else {
    report.check_within("discrete_matches_continuum",
                        detail::scaled(std::abs(sigma_d - c_inf.sigma), std::abs(c_inf.sigma)),
                        kContinuumRatioTol, rel::kContinuumLimit, sigma_d);
  }

  const auto plan = detail::plan_band(cfg);
  lat["band"] = detail::band_json(plan, cfg.mass);
  const std::string band_reason = plan.vac ? plan.inadmissible : plan.unusable;
  if (band_reason.empty()) {
    const auto bsw = schwinger_mode_sum(cfg.mode_sum(*plan.vac, ctx.workers));
    lat["band"]["schwinger"] = detail::harmonic_json(bsw.total);
    lat["band"]["partial_scale"] = bsw.partial_scale(e2);
    report.check_within("band_schwinger_zero", detail::scaled(bsw.total.magnitude(), bsw.partial_scale(e2)),
                        kExactTol, rel::kBandSchwinger, bsw.total.sigma().real());
  } else {
    report.skip("band_schwinger_zero", band_reason, rel::kBandSchwinger);
  }
  r["lattice"] = lat;
  return report;
}

// ---------------------------------------------------------------------------
// continuum

inline Report cmd_continuum(const RunConfig& cfg, const RunContext& ctx) {
  Report report("continuum");
  report.config() = config_echo(cfg);
  const auto c = cfg.continuum();
  c.validate();
  if (!c.finite_cutoff()) throw ConfigError("continuum command needs a finite cutoff");

  const double closed = cutoff_integral(c);
  const double quad = cutoff_integral_quadrature(c);
  report.check_within("closed_form_vs_quadrature", std::abs(closed - quad), kQuadratureTol, rel::kQuadrature,
                      Json{{"closed_form", closed}, {"quadrature", quad}});

  {
    std::mt19937_64 rng(ctx.seed);
    std::uniform_real_distribution<double> um(0.1, 10.0), uk(0.1, 5.0), ur(0.0, 1.0);
    double worst = 0.0;
    const int points = 100;
    for (int i = 0; i < points; ++i) {
      const double m = um(rng);
      const double k = uk(rng);
      const double lo = std::log(2.0 * k), hi = std::log(1e4);
      const double r = std::exp(lo + (hi - lo) * ur(rng));
      worst = std::max(worst, std::abs(cutoff_integral(r, k, m) - cutoff_integral_quadrature(r, k, m)));
    }
    report.check_within("closed_form_vs_quadrature_grid", worst, kQuadratureTol, rel::kQuadrature,
                        Json{{"points", points}});
  }

  report.check_within("parity", detail::parity_defect(c), kExactTol, rel::kParity);

  auto unlimited = c;
  unlimited.cutoff = std::numeric_limits<double>::infinity();
  const auto dj = delta_J_vac(unlimited);
  const double sin_amp = dj.sin_amplitude().real();
  const double expected_sign = (c.amplitude * c.k > 0.0) ? -1.0 : (c.amplitude * c.k < 0.0 ? 1.0 : 0.0);
  const bool sign_ok = expected_sign == 0.0 ? sin_amp == 0.0 : sin_amp * expected_sign > 0.0;
  report.check_true("delta_J_form",
                    sign_ok && dj.reality_defect() <= kExactTol * std::max(1e-300, dj.magnitude()) &&
                        std::abs(dj.cos_amplitude()) <= kExactTol * std::max(1e-300, dj.magnitude()),
                    rel::kDeltaJ, sin_amp);

  const auto bi = band_integrals(c);
  {
    bool ok = true;
    Json cases = Json::array();
    int slot = 0;
    for (int dir : {+1, -1}) {
      for (int side : {+1, -1}) {
        const double shift = dir * c.k;
        const bool empty_expected = (shift > 0 && side < 0) || (shift < 0 && side > 0);
        const auto& iv = bi.support[slot++];
        const bool good = empty_expected ? !iv.has_value()
                                         : iv && std::abs(iv->length() - std::abs(c.k)) <=
                                                     1e-12 * std::max(1.0, c.cutoff);
        ok = ok && good;
        cases.push_back({{"harmonic", dir > 0 ? "+k" : "-k"},
                         {"side", side > 0 ? "above" : "below"},
                         {"empty", !iv.has_value()},
                         {"length", iv ? iv->length() : 0.0}});
      }
    }
    report.check_true("delta_support_cases", ok, rel::kDeltaSupport, cases);
  }
  detail::add_cancellation_check(report, "band_cancellation", c);

  const auto std_fin = schwinger_standard(c);
  const auto std_inf = schwinger_standard(unlimited);
  const double reference = detail::reference_coefficient(c);
  auto& r = report.results();
  r["cutoff_integral"] = closed;
  r["quadrature"] = quad;
  r["limit"] = cutoff_integral_limit(c.k);
  r["limit_deviation"] = std::abs(closed - cutoff_integral_limit(c.k));
  r["standard_sigma"] = std_inf.sigma;
  r["standard_sigma_at_cutoff"] = std_fin.sigma;
  r["transition_sum"] = detail::harmonic_json(std_inf.transition_sum);
  r["delta_J_sin_amplitude"] = sin_amp;
  r["band"] = {{"i_plus", detail::harmonic_json(bi.i_plus)},
               {"i_minus", detail::harmonic_json(bi.i_minus)},
               {"schwinger", detail::harmonic_json(band_schwinger(c))}};
  r["reference_coefficient"] = reference;
  r["correspondence_factor"] = reference == 0.0 ? Json(nullptr) : Json(std_inf.sigma / reference);
  return report;
}

// ---------------------------------------------------------------------------
// scan

inline Report cmd_scan(const RunConfig& cfg, const RunContext& ctx) {
  Report report("scan");
  report.config() = config_echo(cfg);
  const auto& s = cfg.scan;
  if (s.empty()) {
    throw ConfigError("scan needs at least one non-empty range: scan.cutoffs, scan.ring_lengths, "
                      "scan.band_edges or scan.band_depths");
  }
  auto& results = report.results();
  const double e2 = cfg.charge * cfg.charge;

  if (!s.cutoffs.empty()) {
    const auto base = cfg.continuum();
    for (double r : s.cutoffs) {
      auto c = base;
      c.cutoff = r;
      c.validate();
    }
    struct Row {
      double r, closed, quad, deviation, residual, sigma;
      HarmonicCoefficient ip, im;
    };
    const auto rows = detail::parallel_map<Row>(s.cutoffs.size(), ctx.workers, [&](std::size_t i) {
      auto c = base;
      c.cutoff = s.cutoffs[i];
      Row row{};
      row.r = c.cutoff;
      row.closed = cutoff_integral(c);
      row.quad = cutoff_integral_quadrature(c);
      row.deviation = std::abs(row.closed - cutoff_integral_limit(c.k));
      const auto b = band_integrals(c);
      row.ip = b.i_plus;
      row.im = b.i_minus;
      row.residual = detail::scaled((b.i_plus + b.i_minus).magnitude(), b.i_plus.magnitude());
      row.sigma = schwinger_standard(c).sigma;
      return row;
    });
    Table t;
    t.header = {"index", "cutoff", "cutoff_integral", "quadrature", "limit_deviation",
                "i_plus_sigma", "i_minus_sigma", "band_residual", "sigma_standard"};
    double worst_quad = 0.0;
    std::vector<double> xs, dev, res;
    bool cancellation_ok = true;
    int cancellation_rows = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& row = rows[i];
      t.rows.push_back({cell(static_cast<int>(i)), cell(row.r), cell(row.closed), cell(row.quad),
                        cell(row.deviation), cell(row.ip.sigma().real()), cell(row.im.sigma().real()),
                        cell(row.residual), cell(row.sigma)});
      worst_quad = std::max(worst_quad, std::abs(row.closed - row.quad));
      xs.push_back(row.r);
      dev.push_back(row.deviation);
      res.push_back(row.residual);
      if (row.r >= kCancellationMinCutoff * std::abs(base.k)) {
        ++cancellation_rows;
        cancellation_ok = cancellation_ok && row.residual <= 3.0 * std::abs(base.k) / row.r;
      }
    }
    report.tables()["scan_cutoff"] = std::move(t);
    report.check_within("cutoff_scan_quadrature", worst_quad, kQuadratureTol, rel::kQuadrature);
    if (cancellation_rows > 0) {
      report.check_true("cutoff_scan_band_cancellation", cancellation_ok, rel::kCancellation,
                        cancellation_rows, "a row exceeds 3k/r");
    } else {
      report.skip("cutoff_scan_band_cancellation", "no cutoff >= 10|k|", rel::kCancellation);
    }
    const auto fit_json = [](const std::optional<PowerLawFit>& f, const std::string& why) {
      if (!f) return Json{{"status", "N/A"}, {"reason", why}};
      return Json{{"status", "fitted"}, {"slope", f->slope}, {"intercept", f->intercept},
                  {"points", f->points}};
    };
    const auto dev_fit = fit_power_law(xs, dev);
    // a residual at rounding level has no decay law to fit
    // I- is a difference of energies of order r, so its floor grows like eps r/|k|
    bool res_rounding = true;
    for (std::size_t i = 0; i < res.size(); ++i) {
      const double floor = 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + xs[i] / std::abs(base.k));
      res_rounding = res_rounding && res[i] <= floor;
    }
    const auto res_fit = res_rounding ? std::nullopt : fit_power_law(xs, res);
    const std::string degenerate = "fewer than two usable points";
    results["cutoff_scan"] = {
        {"limit", cutoff_integral_limit(base.k)},
        {"limit_deviation_fit", fit_json(dev_fit, degenerate)},
        {"band_residual_fit",
         fit_json(res_fit, res_rounding ? "residual at rounding level (<= 64 eps (1 + r/|k|)) at every point" : degenerate)}};
    if (s.expected_slope) {
      if (dev_fit) {
        report.check_within("limit_deviation_slope", std::abs(dev_fit->slope - *s.expected_slope),
                            s.slope_tolerance, rel::kSlope, dev_fit->slope);
      } else {
        report.skip("limit_deviation_slope", "degenerate fit (fewer than two usable points)", rel::kSlope);
      }
    }
  }

  if (!s.ring_lengths.empty()) {
    const double k = cfg.wavenumber();
    const double p_cut = s.momentum_cutoff.value_or(kConvergedCutoff * std::abs(k));
    struct Point {
      double length;
      int n_max;
      GaugeProfile chi;
    };
    std::vector<Point> points;
    for (double length : s.ring_lengths) {
      if (!(length > 0.0)) throw ConfigError("scan.ring_lengths entries must be > 0");
      const auto chi = cfg.gauge_for(length);
      const int n_max = static_cast<int>(std::floor(p_cut * length / (2.0 * kPi) + 1e-9));
      if (n_max < 1) throw ConfigError("momentum_cutoff too small for ring_length " + cell(length));
      points.push_back({length, n_max, chi});
    }
    struct Row {
      double sigma_d, p_max;
    };
    const auto rows = detail::parallel_map<Row>(points.size(), ctx.workers, [&](std::size_t i) {
      ModeParams params{cfg.mass, points[i].length, points[i].n_max, cfg.charge};
      ModeSumConfig mc{params, VacuumSpec::standard(), points[i].chi, cfg.spins, 0, 1};
      return Row{schwinger_mode_sum(mc).total.sigma().real(), params.momentum(params.n_max)};
    });
    ContinuumParams c = cfg.continuum();
    c.cutoff = std::numeric_limits<double>::infinity();
    const double sigma_inf = schwinger_standard(c).sigma;
    Table t;
    t.header = {"index", "ring_length", "n_max", "momentum_cutoff", "harmonic",
                "sigma_discrete", "sigma_continuum", "sigma_continuum_at_cutoff", "ratio", "ratio_at_cutoff"};
    double worst = 0.0;
    int eligible = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      auto cc = c;
      cc.cutoff = rows[i].p_max;
      const double sigma_r = rows[i].p_max > std::abs(k) ? schwinger_standard(cc).sigma
                                                         : std::numeric_limits<double>::quiet_NaN();
      const double ratio = rows[i].sigma_d / sigma_inf;
      t.rows.push_back({cell(static_cast<int>(i)), cell(points[i].length), cell(points[i].n_max),
                        cell(rows[i].p_max), cell(points[i].chi.harmonic), cell(rows[i].sigma_d),
                        cell(sigma_inf), cell(sigma_r), cell(ratio), cell(rows[i].sigma_d / sigma_r)});
      if (rows[i].p_max >= kConvergedCutoff * std::abs(k)) {
        ++eligible;
        worst = std::max(worst, std::abs(ratio - 1.0));
      }
    }
    report.tables()["scan_length"] = std::move(t);
    if (eligible > 0) {
      report.check_within("length_scan_continuum_limit", worst, kContinuumRatioTol, rel::kContinuumLimit,
                          eligible);
    } else {
      report.skip("length_scan_continuum_limit", "no point with lattice cutoff >= 50|k|",
                  rel::kContinuumLimit);
    }
    results["length_scan"] = {{"momentum_cutoff", p_cut}, {"sigma_continuum", sigma_inf}};
  }

  if (!s.band_edges.empty() || !s.band_depths.empty()) {
    const int margin = cfg.required_margin();
    const auto chi = cfg.gauge();
    struct Point {
      std::string kind;
      int edge;
      BandSpec band;
    };
    std::vector<Point> points;
    const ModeParams base = cfg.mode_params();
    for (int edge : s.band_edges) {
      if (edge < 0) throw ConfigError("scan.band_edges entries must be >= 0");
      points.push_back({"edge", edge, BandSpec::from_edge_index(base, edge)});
    }
    for (double depth : s.band_depths) {
      BandSpec b{depth};
      b.validate();
      ModeParams probe = base;
      probe.n_max = static_cast<int>(std::ceil(b.radius(base.mass) * base.ring_length / (2.0 * kPi))) + 1;
      const int edge = b.edge_index(probe);
      if (edge < 0) throw ConfigError("band depth " + cell(depth) + " holds no lattice mode");
      points.push_back({"depth", edge, b});
    }
    struct Row {
      SchwingerSpectral sw;
      SpectralReport rhr;
      int n_max;
    };
    const auto rows = detail::parallel_map<Row>(points.size(), ctx.workers, [&](std::size_t i) {
      ModeParams params = base;
      params.n_max = points[i].edge + margin;
      ModeSumConfig mc{params, VacuumSpec::banded(points[i].band), chi, cfg.spins, margin, 1};
      return Row{schwinger_mode_sum(mc), spectral_sum_rhoHrho(mc), params.n_max};
    });
    Table t;
    t.header = {"index", "kind", "band_edge_index", "band_depth", "band_radius", "n_max",
                "sigma_band", "tau_band", "partial_scale", "relative_residual",
                "rho_h_rho", "rho_h_rho_scale"};
    double worst = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& row = rows[i];
      const double scale = row.sw.partial_scale(e2);
      const double relative = detail::scaled(row.sw.total.magnitude(), scale);
      const double rhr_rel = detail::scaled(std::abs(row.rhr.value), row.rhr.partials.abs_sum);
      worst = std::max({worst, relative, rhr_rel});
      t.rows.push_back({cell(static_cast<int>(i)), points[i].kind, cell(points[i].edge),
                        cell(points[i].band.depth), cell(points[i].band.radius(cfg.mass)), cell(row.n_max),
                        cell(row.sw.total.sigma().real()), cell(row.sw.total.tau().real()), cell(scale),
                        cell(relative), cell(row.rhr.value), cell(row.rhr.partials.abs_sum)});
    }
    report.tables()["scan_band"] = std::move(t);
    report.check_within("band_scan_flat_zero", worst, kExactTol, rel::kBandSchwinger,
                        static_cast<long long>(rows.size()));
    results["band_scan"] = {{"margin", margin}, {"points", rows.size()}};
  }
  return report;
}

}  // namespace dirac_lab
