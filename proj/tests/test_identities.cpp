#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "dirac_lab/fock_space.hpp"

using namespace dirac_lab;

namespace {

FockBasis basis_with_modes(int count) {
  // first `count` modes of the single-spin n_max = 1 lattice
  const ModeParams p{1.0, 2 * kPi, 1, 1.0};
  auto all = FockBasis::from_params(p, SpinFilter::kSpin1);
  std::vector<Mode> modes(all.modes().begin(), all.modes().begin() + count);
  return FockBasis(p, modes);
}

std::vector<DenseMatrix> all_ladders(const FockBasis& basis) {
  std::vector<DenseMatrix> out;
  for (int i = 0; i < basis.mode_count(); ++i) {
    out.push_back(ladder(basis, i, Ladder::kCreate).dense());
    out.push_back(ladder(basis, i, Ladder::kDestroy).dense());
  }
  return out;
}

}  // namespace

class CommutatorExpansion : public ::testing::TestWithParam<int> {};

TEST_P(CommutatorExpansion, ExhaustiveOverLadders) {
  const auto basis = basis_with_modes(GetParam());
  const auto ops = all_ladders(basis);
  double worst = 0.0;
  for (const auto& a : ops)
    for (const auto& b : ops)
      for (const auto& c : ops)
        for (const auto& d : ops) worst = std::max(worst, commutator_expansion_check(a, b, c, d));
  EXPECT_LT(worst, 1e-12);
}

INSTANTIATE_TEST_SUITE_P(ModeCounts, CommutatorExpansion, ::testing::Values(1, 2, 3, 4));

TEST(CommutatorExpansion, RandomLinearCombinations) {
  const auto basis = basis_with_modes(4);
  const auto ops = all_ladders(basis);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  auto combo = [&] {
    DenseMatrix m = DenseMatrix::Zero(ops[0].rows(), ops[0].cols());
    for (const auto& o : ops) m += Complex(g(rng), g(rng)) * o;
    return m;
  };
  for (int trial = 0; trial < 32; ++trial) {
    const DenseMatrix a = combo(), b = combo(), c = combo(), d = combo();
    const double scale = a.norm() * b.norm() * c.norm() * d.norm();
    EXPECT_LT(commutator_expansion_check(a, b, c, d, 1e-10 * scale) / scale, 1e-13);
  }
}

TEST(CommutatorExpansion, RejectsOperatorAnticommutators) {
  const auto basis = basis_with_modes(3);
  const auto c0 = ladder(basis, 0, Ladder::kCreate).dense();
  const auto a0 = ladder(basis, 0, Ladder::kDestroy).dense();
  const DenseMatrix number = c0 * a0;
  try {
    commutator_expansion_check(number, c0, number, a0);
    FAIL() << "expected PreconditionError";
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("not a c-number"), std::string::npos);
    EXPECT_GT(e.deviation(), 0.1);
  }
}

TEST(ExponentialIdentity, EqualGapHops) {
  const auto full = FockBasis::from_params({1.0, 2 * kPi, 1, 1.0}, SpinFilter::kSpin1);
  // modes 0..5: (n=-1,+), (-1,-), (0,+), (0,-), (1,+), (1,-)
  const Hop single[] = {{2, 3, Complex(0.3, 0.1)}};
  const auto t1 = equal_gap_triple(full, single);
  EXPECT_LT(exponential_identity_check(t1.h, t1.rho, t1.k), 1e-10);

  const Hop four[] = {{0, 1, 0.5}, {4, 5, Complex(0, 0.7)}, {0, 5, -0.2}, {4, 1, 1.1}};
  const auto t4 = equal_gap_triple(full, four);
  EXPECT_GT(t4.k.norm(), 1.0);
  EXPECT_LT(exponential_identity_check(t4.h, t4.rho, t4.k), 1e-10);

  const Hop mixed[] = {{2, 3, 1.0}, {0, 1, 1.0}};
  EXPECT_THROW(equal_gap_triple(full, mixed), ConfigError);
}

TEST(ExponentialIdentity, DiagonalChargeGivesZeroFlux) {
  const auto basis = basis_with_modes(4);
  const DenseMatrix h = build_H0(basis, VacuumSpec::standard()).dense();
  DenseMatrix coeff = DenseMatrix::Zero(4, 4);
  coeff(0, 0) = 0.4;
  coeff(3, 3) = -1.3;
  const DenseMatrix rho = DenseMatrix(one_body_operator(basis, coeff));
  const DenseMatrix k = DenseMatrix::Zero(h.rows(), h.cols());
  EXPECT_LT(exponential_identity_check(h, rho, k), 1e-12);
}

TEST(ExponentialIdentity, PremiseFailureIsReported) {
  const auto basis = FockBasis::from_params({1.0, 2 * kPi, 1, 1.0}, SpinFilter::kSpin1);
  const GaugeProfile chi{1.0, 1, 2 * kPi};
  const auto h = build_H0(basis, VacuumSpec::standard());
  const auto rho = build_rho_w(basis, chi);
  const auto k = build_gradient_flux(basis, chi);
  try {
    exponential_identity_check(h, rho, k);
    FAIL() << "expected ExponentialPremiseError";
  } catch (const ExponentialPremiseError& e) {
    EXPECT_LT(e.premises().continuity, 1e-13);
    EXPECT_GT(e.premises().flux, 1e-3);
  }
}

TEST(ExponentialIdentity, ExpmMatchesEigendecomposition) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int n : {2, 8, 32}) {
    DenseMatrix a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = Complex(g(rng), g(rng));
    const DenseMatrix herm = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(herm);
    const DenseMatrix ref = es.eigenvectors() *
                            (-kI * es.eigenvalues().cast<Complex>()).array().exp().matrix().asDiagonal() *
                            es.eigenvectors().adjoint();
    EXPECT_LT((matrix_exponential(-kI * herm) - ref).norm(), 1e-11 * n);
  }
}
