// Acceptance gate. One PASS/FAIL line per criterion; tolerances and runtime
// budgets are pinned below. Usage: acceptance [--criterion N]

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dirac_lab/continuum.hpp"
#include "dirac_lab/fit.hpp"
#include "dirac_lab/fock_space.hpp"
#include "dirac_lab/spectral.hpp"

using namespace dirac_lab;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  double budget_seconds;
  std::function<Outcome()> run;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

ModeSumConfig lattice(double mass, double length, int n_max, int j, double amp, double charge,
                      SpinFilter spins, std::optional<int> band_edge) {
  ModeSumConfig c;
  c.params = {mass, length, n_max, charge};
  c.chi = {amp, j, length};
  c.spins = spins;
  if (band_edge) c.vac = VacuumSpec::banded(BandSpec::from_edge_index(c.params, *band_edge));
  return c;
}

double relative(double a, double b) {
  const double d = std::max(std::abs(a), std::abs(b));
  return d == 0.0 ? 0.0 : std::abs(a - b) / d;
}

// closed form vs quadrature on a seeded random grid
Outcome criterion1() {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> um(0.1, 10.0), uk(0.1, 5.0), ur(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double m = um(rng), k = uk(rng);
    const double r = 2.0 * k * std::pow(1e4 / (2.0 * k), ur(rng));
    worst = std::max(worst, std::abs(cutoff_integral_quadrature(r, k, m) - cutoff_integral(r, k, m)));
  }
  return {worst < 1e-10, "max |quadrature - closed form| = " + sci(worst) + " over 100 points (tol 1e-10)"};
}

// decay exponent of the cutoff integral towards its limit
Outcome criterion2() {
  std::vector<double> r, from_limit, from_k;
  for (int i = 0; i <= 20; ++i) {
    const double x = std::pow(10.0, 2.0 + 0.1 * i);
    const double c = cutoff_integral(x, 1.0, 1.0);
    r.push_back(x);
    from_limit.push_back(c - cutoff_integral_limit(1.0));
    from_k.push_back(c - 1.0);
  }
  const auto fit = fit_power_law(r, from_limit);
  const auto literal = fit_power_law(r, from_k);
  const double slope = fit ? fit->slope : std::numeric_limits<double>::quiet_NaN();
  const double literal_slope = literal ? literal->slope : std::numeric_limits<double>::quiet_NaN();
  std::ostringstream os;
  os.precision(8);
  os << "slope of |C(r) - lim C| = " << slope << " (want -1 +- 0.05); C(r) -> 2k, and |C(r) - k| has slope "
     << literal_slope << "; the deviation is even in 1/r, so it falls as 1/r^2";
  return {std::abs(slope + 1.0) <= 0.05, os.str()};
}

// standard-vacuum Schwinger coefficient, continuum and L = 200 pi lattice
Outcome criterion3() {
  ContinuumParams c;  // m = k = V0 = e = 1
  const double sigma_c = schwinger_standard(c).sigma;
  const double reference = c.charge * c.charge * c.amplitude * c.k / (2.0 * kPi * kPi);
  const double dev_reference = relative(sigma_c, reference);
  const bool clause1 = dev_reference <= 1e-12;

  // r = p_max = 2 pi n_max / L = 50 k
  const auto cfg = lattice(1.0, 200.0 * kPi, 5000, 100, 1.0, 1.0, SpinFilter::kBoth, std::nullopt);
  const double sigma_d = schwinger_mode_sum(cfg).total.sigma().real();
  const double dev_discrete = relative(sigma_d, sigma_c);
  const bool clause2 = dev_discrete <= 0.02;

  std::ostringstream os;
  os.precision(8);
  os << "continuum sigma = " << sigma_c << " vs e^2 V0 k / 2 pi^2 = " << reference << " (ratio "
     << sigma_c / reference << ", " << (clause1 ? "ok" : "MISS")
     << "); discrete sigma(L=200pi, r=50k) = " << sigma_d << ", relative deviation from continuum "
     << dev_discrete << " (tol 0.02, " << (clause2 ? "ok" : "MISS") << "), from e^2 V0 k / 2 pi^2 "
     << relative(sigma_d, reference);
  return {clause1 && clause2, os.str()};
}

// band-vacuum cancellation, continuum bound and discrete exact zero
Outcome criterion4() {
  double worst_margin = std::numeric_limits<double>::infinity();  // 3k/r - ratio
  double worst_ratio_bound = 0.0;
  for (double m : {0.1, 1.0, 5.0}) {
    for (double k : {0.5, 1.0, 3.0}) {
      for (double rk : {10.0, 20.0, 50.0, 100.0, 1e3, 1e4}) {
        ContinuumParams p;
        p.mass = m;
        p.k = k;
        p.cutoff = rk * k;
        const auto b = band_integrals(p);
        const double ratio = (b.i_plus + b.i_minus).magnitude() / b.i_plus.magnitude();
        const double bound = 3.0 * k / p.cutoff;
        worst_margin = std::min(worst_margin, bound - ratio);
        worst_ratio_bound = std::max(worst_ratio_bound, ratio / bound);
      }
    }
  }
  const bool continuum_ok = worst_margin >= 0.0;

  const std::vector<ModeSumConfig> discrete = {
      lattice(1.0, 200.0 * kPi, 5000, 100, 1.0, 1.0, SpinFilter::kBoth, 4900),
      lattice(1.0, 200.0 * kPi, 5000, 100, 1.0, 1.0, SpinFilter::kBoth, 1000),
      lattice(0.3, 20.0 * kPi, 200, 3, 0.7, 1.4, SpinFilter::kBoth, 197),
      lattice(4.0, 10.0, 50, 2, 2.0, 0.5, SpinFilter::kSpin1, 10),
      lattice(1.0, 2.0 * kPi, 1, 1, 1.0, 1.0, SpinFilter::kBoth, 0),
  };
  double worst = 0.0;
  for (const auto& cfg : discrete) {
    const auto s = schwinger_mode_sum(cfg);
    const double e2 = cfg.params.charge * cfg.params.charge;
    worst = std::max(worst, s.total.magnitude() / s.partial_scale(e2));
  }
  const bool discrete_ok = worst < 1e-12;
  return {continuum_ok && discrete_ok,
          "continuum max |I+ + I-|/|I+| / (3k/r) = " + sci(worst_ratio_bound) +
              " over 54 points with r >= 10k; discrete max |A| / class partials = " + sci(worst) +
              " over 5 lattices (tol 1e-12)"};
}

std::vector<ModeSumConfig> oracle_suite() {
  using S = SpinFilter;
  const double tp = 2.0 * kPi;
  return {
      lattice(1.0, tp, 1, 1, 1.0, 1.0, S::kBoth, std::nullopt),
      lattice(1.0, tp, 1, 1, 1.0, 1.0, S::kBoth, 0),
      lattice(0.3, 5.0, 1, 1, 0.7, 1.5, S::kBoth, std::nullopt),
      lattice(0.3, 5.0, 1, 1, 0.7, 1.5, S::kBoth, 0),
      lattice(3.0, 20.0, 1, 1, 2.0, 0.5, S::kBoth, std::nullopt),
      lattice(3.0, 20.0, 1, 1, 2.0, 0.5, S::kBoth, 0),
      lattice(1.0, tp, 2, 1, 1.0, 1.0, S::kSpin1, std::nullopt),
      lattice(1.0, tp, 2, 1, 1.0, 1.0, S::kSpin1, 0),
      lattice(1.0, tp, 2, 1, 1.0, 1.0, S::kSpin1, 1),
      lattice(0.5, 7.0, 2, 2, 0.9, 1.0, S::kSpin2, std::nullopt),
      lattice(0.5, 7.0, 2, 2, 0.9, 1.0, S::kSpin2, 0),
      lattice(2.0, 3.0, 2, 1, 1.2, 0.8, S::kSpin1, std::nullopt),
      lattice(2.0, 3.0, 2, 1, 1.2, 0.8, S::kSpin1, 1),
      lattice(1.0, 4.0, 1, 1, 1.0, 1.0, S::kSpin2, std::nullopt),
      lattice(1.0, 4.0, 1, 1, 1.0, 1.0, S::kSpin2, 0),
      lattice(1.0, tp, 1, 1, 0.0, 1.0, S::kBoth, std::nullopt),
      lattice(1.0, tp, 1, 1, 0.0, 1.0, S::kBoth, 0),
      lattice(0.1, 50.0, 2, 2, 1.0, 1.0, S::kSpin1, std::nullopt),
      lattice(0.1, 50.0, 2, 2, 1.0, 1.0, S::kSpin1, 0),
      lattice(8.0, 1.0, 2, 1, 0.6, 2.0, S::kSpin2, 1),
  };
}

// exact Fock values vs mode sums on a 20-config suite with M <= 12
Outcome criterion5() {
  double worst = 0.0;
  int count = 0;
  for (const auto& cfg : oracle_suite()) {
    worst = std::max(worst, oracle_crosscheck(cfg).max_deviation);
    ++count;
  }
  return {worst <= 1e-12,
          "max relative deviation = " + sci(worst) + " over " + std::to_string(count) + " configs (tol 1e-12)"};
}

// exact double commutator: positive on the standard vacuum, zero on the band vacuum
Outcome criterion6() {
  double worst_equal = 0.0, least_positive = std::numeric_limits<double>::infinity(), worst_band = 0.0;
  for (const auto& cfg : oracle_suite()) {
    if (cfg.chi.amplitude == 0.0) continue;
    const auto basis = FockBasis::from_params(cfg.params, cfg.spins);
    const auto r = double_commutator_expectation(cfg.vac, cfg.chi, basis);
    if (cfg.vac.is_band()) {
      worst_band = std::max({worst_band, std::abs(r.half_double_commutator), std::abs(r.rho_h_rho)});
    } else {
      least_positive = std::min(least_positive, r.half_double_commutator);
      worst_equal = std::max(worst_equal, relative(r.half_double_commutator, r.rho_h_rho));
    }
  }
  const bool ok = least_positive > 0.0 && worst_equal <= 1e-12 && worst_band <= 1e-12;
  return {ok, "standard: min (1/2)<[rho,[H,rho]]> = " + sci(least_positive) +
                  ", max relative gap to <rho H rho> = " + sci(worst_equal) +
                  "; band: max |value| = " + sci(worst_band) + " (tol 1e-12)"};
}

// algebraic identities
Outcome criterion7() {
  std::ostringstream os;
  bool ok = true;
  const auto note = [&](const std::string& name, double residual, double tol) {
    ok = ok && residual <= tol;
    os << name << " " << sci(residual) << (residual <= tol ? "" : " MISS") << "; ";
  };

  const auto basis = FockBasis::from_params({1.0, 2.0 * kPi, 1, 1.0});
  double car = 0.0;
  const auto id = sparse_identity(basis.dimension());
  for (int i = 0; i < basis.mode_count(); ++i) {
    const SparseMatrix ai = ladder(basis, i, Ladder::kDestroy).matrix;
    for (int j = 0; j < basis.mode_count(); ++j) {
      const SparseMatrix aj = ladder(basis, j, Ladder::kDestroy).matrix;
      SparseMatrix mixed = anticommutator(ai, SparseMatrix(aj.adjoint()));
      if (i == j) mixed -= id;
      car = std::max({car, mixed.norm(), anticommutator(ai, aj).norm()});
    }
  }
  note("CAR", car, 1e-12);

  double vac = 0.0;
  const auto band = VacuumSpec::banded(BandSpec::from_edge_index(basis.params(), 0));
  for (const auto& v : {VacuumSpec::standard(), band}) {
    vac = std::max(vac, vacuum_defect(v, basis, build_vacuum(v, basis)));
  }
  note("vacuum", vac, 1e-12);

  double f1 = 0.0;
  for (const auto& cfg : {lattice(1.0, 20.0 * kPi, 200, 3, 1.0, 1.0, SpinFilter::kBoth, 150),
                          lattice(0.2, 5.0, 30, 1, 2.0, 1.0, SpinFilter::kSpin1, 29)}) {
    const auto r = f1_antisymmetry_check(cfg);
    f1 = std::max(f1, std::abs(r.value) / std::max(1.0, r.abs_sum));
  }
  note("F1", f1, 1e-12);

  double first = 0.0;
  for (double mass : {0.1, 1.0, 7.0}) {
    const ModeParams p{mass, 9.0, 4, 1.0};
    const auto modes = build_modes(p);
    for (int j : {1, 3}) {
      const GaugeProfile chi{1.3, j, p.ring_length};
      for (const auto& a : modes)
        for (const auto& b : modes) first = std::max(first, std::abs(first_quantized_commutator_check(a, b, chi)));
    }
  }
  note("first-quantized", first, 1e-12);

  double complete = 0.0;
  for (double mass : {0.01, 1.0, 50.0})
    for (double p : {-300.0, -1.0, 0.0, 1e-8, 2.5, 1e4})
      complete = std::max(complete, completeness_residual(p, mass, 1.0));
  note("completeness", complete, 1e-12);

  double expansion = 0.0;
  const auto single = FockBasis::from_params({1.0, 2.0 * kPi, 1, 1.0}, SpinFilter::kSpin1);
  for (int count = 1; count <= 4; ++count) {
    const FockBasis sub(single.params(),
                        std::vector<Mode>(single.modes().begin(), single.modes().begin() + count));
    std::vector<DenseMatrix> ops;
    for (int i = 0; i < count; ++i) {
      ops.push_back(ladder(sub, i, Ladder::kCreate).dense());
      ops.push_back(ladder(sub, i, Ladder::kDestroy).dense());
    }
    for (const auto& a : ops)
      for (const auto& b : ops)
        for (const auto& c : ops)
          for (const auto& d : ops) expansion = std::max(expansion, commutator_expansion_check(a, b, c, d));
  }
  note("commutator expansion (M <= 4, exhaustive)", expansion, 1e-12);

  double exponential = 0.0;
  const std::vector<std::vector<Hop>> triples = {
      {{2, 3, 1.0}},
      {{0, 1, 0.5}, {4, 5, Complex(0, 0.7)}, {0, 5, -0.2}, {4, 1, 1.1}},
      {{2, 0, Complex(0.3, -0.4)}, {2, 4, 0.9}},
      {{1, 3, 2.0}, {5, 3, 1.0}},
  };
  for (const auto& hops : triples) {
    const auto t = equal_gap_triple(single, hops);
    exponential = std::max(exponential, exponential_identity_check(t.h, t.rho, t.k));
  }
  note("exponential identity (synthetic)", exponential, 1e-10);
  return {ok, os.str()};
}

// scaling, parity and c-number shift invariance
Outcome criterion8() {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  double scaling = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const double mass = u(rng), length = 10.0 * u(rng), amp = u(rng), charge = u(rng);
    const int j = 1 + trial % 3;
    const auto sigma = [&](double a, double e) {
      return schwinger_mode_sum(lattice(mass, length, 100, j, a, e, SpinFilter::kBoth, std::nullopt))
          .total.sigma()
          .real();
    };
    const double s = sigma(amp, charge);
    scaling = std::max({scaling, relative(sigma(2.5 * amp, charge), 2.5 * s),
                        relative(sigma(amp, 1.7 * charge), 1.7 * 1.7 * s)});
    ContinuumParams p;
    p.mass = mass;
    p.k = 2.0 * kPi * j / length;
    p.amplitude = amp;
    p.charge = charge;
    const double c = schwinger_standard(p).sigma;
    p.amplitude *= 2.5;
    p.charge *= 1.7;
    scaling = std::max(scaling, relative(schwinger_standard(p).sigma, 2.5 * 1.7 * 1.7 * c));
  }
  // small lattice, exact Fock
  {
    const auto basis = FockBasis::from_params({1.0, 2.0 * kPi, 2, 1.0}, SpinFilter::kSpin1);
    const auto s = [&](double a) {
      return schwinger_expectation(VacuumSpec::standard(), {a, 1, 2.0 * kPi}, basis).coefficient.sigma().real();
    };
    scaling = std::max(scaling, relative(s(3.0), 3.0 * s(1.0)));
  }

  double parity = 0.0;
  for (double r : {3.0, 50.0, 1e4, std::numeric_limits<double>::infinity()}) {
    for (double k : {0.3, 1.0, 2.0}) {
      ContinuumParams p;
      p.k = k;
      p.cutoff = r;
      p.mass = 0.7;
      ContinuumParams q = p;
      q.k = -k;
      const auto rel_sum = [](Complex a, Complex b) {
        const double d = std::max(std::abs(a), std::abs(b));
        return d == 0.0 ? 0.0 : std::abs(a + b) / d;
      };
      parity = std::max(parity, relative(cutoff_integral(r, k, p.mass), -cutoff_integral(r, -k, p.mass)));
      parity = std::max(parity, relative(schwinger_standard(p).sigma, -schwinger_standard(q).sigma));
      if (std::isfinite(r)) {
        const auto a = band_integrals(p), b = band_integrals(q);
        parity = std::max({parity, rel_sum(a.i_plus.sigma(), b.i_plus.sigma()),
                           rel_sum(a.i_minus.sigma(), b.i_minus.sigma())});
      }
    }
  }
  {
    const auto s = schwinger_mode_sum(lattice(1.0, 30.0, 80, 2, 1.0, 1.0, SpinFilter::kBoth, std::nullopt)).total;
    const auto r = s.reflected();
    parity = std::max(parity, relative(r.sigma().real(), -s.sigma().real()));
  }

  double shift = 0.0;
  {
    const auto basis = FockBasis::from_params({0.9, 2.0 * kPi, 1, 1.0});
    const GaugeProfile chi{1.2, 1, 2.0 * kPi};
    const auto id = sparse_identity(basis.dimension());
    for (const auto& vac : {VacuumSpec::standard(),
                            VacuumSpec::banded(BandSpec::from_edge_index(basis.params(), 0))}) {
      const auto v = build_vacuum(vac, basis);
      const SparseMatrix h = build_H0(basis, vac).matrix;
      const SparseMatrix rho = build_rho_w(basis, chi).matrix;
      const SparseMatrix j = build_current(basis, 0.4).matrix;
      const auto base = double_commutator_expectation(h, rho, v);
      const Complex sj = commutator_expectation(j, rho, v);
      for (double c : {-3.0, 0.5, 17.0}) {
        const SparseMatrix h2 = h + Complex(c) * id;
        const SparseMatrix rho2 = rho - Complex(0.5 * c) * id;
        const SparseMatrix j2 = j + Complex(2.0 * c) * id;
        const auto moved = double_commutator_expectation(h2, rho2, v);
        // the shifted products carry terms of order c^3 that cancel
        const double scale = std::max(1.0, std::abs(c * c * c));
        shift = std::max({shift, std::abs(moved.half_double_commutator - base.half_double_commutator) / scale,
                          std::abs(commutator_expectation(j2, rho2, v) - sj) / scale});
      }
    }
  }
  const bool ok = scaling <= 1e-10 && parity <= 1e-10 && shift <= 1e-12;
  return {ok, "scaling max relative " + sci(scaling) + ", parity max relative " + sci(parity) +
                  " (tol 1e-10); c-number shift max " + sci(shift) + " (tol 1e-12)"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  int only = 0;
  app.add_option("--criterion", only, "Run a single criterion (1-8)")->check(CLI::Range(1, 8));
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {1, 10.0, criterion1}, {2, 5.0, criterion2},  {3, 60.0, criterion3}, {4, 60.0, criterion4},
      {5, 120.0, criterion5}, {6, 30.0, criterion6}, {7, 60.0, criterion7}, {8, 30.0, criterion8},
  };
  bool all = true;
  for (const auto& c : criteria) {
    if (only != 0 && c.id != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    const bool in_time = elapsed.count() < c.budget_seconds;
    const bool pass = out.pass && in_time;
    all = all && pass;
    std::printf("criterion %d: %s  %s [%.2f s, budget %.0f s%s]\n", c.id, pass ? "PASS" : "FAIL",
                out.detail.c_str(), elapsed.count(), c.budget_seconds, in_time ? "" : ", OVER BUDGET");
  }
  return all ? 0 : 1;
}
