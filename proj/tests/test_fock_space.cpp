#include <gtest/gtest.h>

#include "dirac_lab/fock_space.hpp"

using namespace dirac_lab;

namespace {

double max_abs(const SparseMatrix& m) {
  double worst = 0.0;
  for (int c = 0; c < m.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(m, c); it; ++it) worst = std::max(worst, std::abs(it.value()));
  return worst;
}

FockBasis small_basis(double mass = 1.0, double length = 2 * kPi, int n_max = 1,
                      SpinFilter f = SpinFilter::kBoth) {
  return FockBasis::from_params({mass, length, n_max, 1.0}, f);
}

}  // namespace

TEST(FockSpace, CanonicalAnticommutation) {
  for (auto filter : {SpinFilter::kSpin1, SpinFilter::kBoth}) {
    const auto basis = small_basis(1.0, 2 * kPi, 1, filter);
    const auto id = sparse_identity(basis.dimension());
    for (int i = 0; i < basis.mode_count(); ++i) {
      const auto ai = ladder(basis, i, Ladder::kDestroy).matrix;
      for (int j = 0; j < basis.mode_count(); ++j) {
        const auto aj = ladder(basis, j, Ladder::kDestroy).matrix;
        const auto cj = ladder(basis, j, Ladder::kCreate).matrix;
        SparseMatrix mixed = anticommutator(ai, cj);
        if (i == j) mixed -= id;
        EXPECT_EQ(max_abs(mixed), 0.0);
        EXPECT_EQ(max_abs(anticommutator(ai, aj)), 0.0);
      }
    }
  }
}

TEST(FockSpace, JordanWignerSign) {
  const auto basis = small_basis(1.0, 2 * kPi, 1, SpinFilter::kSpin1);
  // a_2^dag on |bits 0,1 set> picks up (-1)^2; on |bit 0 set> picks up -1
  const auto c2 = ladder(basis, 2, Ladder::kCreate).matrix;
  EXPECT_EQ(c2.coeff(0b111, 0b011), Complex(1.0));
  EXPECT_EQ(c2.coeff(0b101, 0b001), Complex(-1.0));
  EXPECT_EQ(c2.coeff(0b100, 0b000), Complex(1.0));
}

TEST(FockSpace, BasisValidation) {
  EXPECT_THROW(small_basis(1.0, 2 * kPi, 2), ConfigError);  // 20 modes
  const ModeParams p{1.0, 2 * kPi, 1, 1.0};
  auto modes = build_modes(p);
  std::swap(modes[0], modes[1]);
  EXPECT_THROW(FockBasis(p, modes), ConfigError);
  const auto basis = FockBasis::from_params(p);
  EXPECT_EQ(basis.index_of(0, -1, 2), 7);
  EXPECT_THROW(basis.index_of(2, -1, 2), std::out_of_range);
}

TEST(FockSpace, VacuumDefinitions) {
  const auto basis = small_basis();
  const auto band = VacuumSpec::banded(BandSpec::from_edge_index(basis.params(), 0));
  for (const auto& vac : {VacuumSpec::standard(), band}) {
    const auto v = build_vacuum(vac, basis);
    EXPECT_EQ(vacuum_defect(vac, basis, v), 0.0);
    const auto h = build_H0(basis, vac);
    EXPECT_NEAR(expectation(h.matrix, v).real(), 0.0, 1e-14);
  }
  // only n = 0 negative modes sit in the band
  EXPECT_EQ(vacuum_occupation(band, basis), (1u << 6) | (1u << 7));
}

TEST(FockSpace, GroundStateVersusBand) {
  const auto basis = small_basis();
  const auto std_h = build_H0(basis, VacuumSpec::standard()).matrix;
  EXPECT_NEAR(std_h.diagonal().real().minCoeff(), 0.0, 1e-14);
  const auto band = VacuumSpec::banded(BandSpec::from_edge_index(basis.params(), 0));
  const auto band_h = build_H0(basis, band).matrix;
  // filling the empty n = +-1 sea modes lowers the energy below the band vacuum
  EXPECT_NEAR(band_h.diagonal().real().minCoeff(), -4.0 * std::sqrt(2.0), 1e-12);
}

TEST(FockSpace, ChargeOperatorZeroCases) {
  const auto basis = small_basis();
  const GaugeProfile flat{0.0, 1, basis.params().ring_length};
  EXPECT_EQ(build_rho_w(basis, flat).matrix.norm(), 0.0);
  const GaugeProfile chi{1.0, 1, basis.params().ring_length};
  const auto rho = build_rho_w(basis, chi);
  EXPECT_LT(rho.hermiticity_defect(), 1e-14);
  for (const auto& vac : {VacuumSpec::standard(), VacuumSpec::banded(BandSpec{0.2})}) {
    EXPECT_NEAR(std::abs(expectation(rho.matrix, build_vacuum(vac, basis))), 0.0, 1e-15);
  }
}

TEST(FockSpace, CurrentHermitianAndSingleParticle) {
  const auto basis = small_basis(0.7, 4.0, 1);
  for (double z : {0.0, 0.3, 2.9}) EXPECT_LT(build_current(basis, z).hermiticity_defect(), 1e-14);
  const auto v = build_vacuum(VacuumSpec::standard(), basis);
  const auto j = build_current(basis, 1.1).matrix;
  const double j_vac = expectation(j, v).real();
  for (int i = 0; i < basis.mode_count(); ++i) {
    const auto& m = basis.mode(i);
    if (!m.positive()) continue;
    const StateVector one = ladder(basis, i, Ladder::kCreate).matrix * v;
    const double shift = expectation(j, one).real() - j_vac;
    EXPECT_NEAR(shift, m.p / (m.energy * basis.params().ring_length), 1e-14);
  }
}

TEST(FockSpace, ContinuityHoldsExactly) {
  const auto basis = small_basis(1.3, 5.0, 1);
  const GaugeProfile chi{0.9, 1, 5.0};
  const auto p = physical_premises(basis, VacuumSpec::standard(), chi);
  EXPECT_LT(p.continuity, 1e-13);
  EXPECT_GT(p.flux, 1e-3);
}

TEST(FockSpace, DoubleCommutatorEqualsRhoHRho) {
  const auto basis = small_basis();
  const GaugeProfile chi{1.0, 1, basis.params().ring_length};
  const auto s = double_commutator_expectation(VacuumSpec::standard(), chi, basis);
  EXPECT_GT(s.half_double_commutator, 0.1);
  EXPECT_NEAR(s.half_double_commutator, s.rho_h_rho, 1e-12 * s.rho_h_rho);
  const auto band = VacuumSpec::banded(BandSpec::from_edge_index(basis.params(), 0));
  const auto b = double_commutator_expectation(band, chi, basis);
  EXPECT_NEAR(b.half_double_commutator, 0.0, 1e-14);
  EXPECT_NEAR(b.rho_h_rho, 0.0, 1e-14);
}

TEST(FockSpace, SchwingerSelectionRule) {
  const auto basis = small_basis(1.0, 2 * kPi, 3, SpinFilter::kSpin2);
  const GaugeProfile chi{1.0, 2, basis.params().ring_length};
  const auto s = schwinger_expectation(VacuumSpec::standard(), chi, basis);
  EXPECT_EQ(s.off_harmonic, 0.0);
  EXPECT_GT(s.coefficient.sigma().real(), 0.0);
  EXPECT_LT(s.coefficient.imaginarity_defect(), 1e-15);
  EXPECT_LT(std::abs(s.coefficient.tau()), 1e-15);
}
