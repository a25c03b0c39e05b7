#include <gtest/gtest.h>

#include <cmath>

#include "dimcert/errors.hpp"
#include "dimcert/hubbard.hpp"
#include "dimcert/stats.hpp"

using namespace dimcert;

namespace {

FockBasis pair_basis(int L) { return FockBasis(LatticeSpec{L, 1.0}, SpeciesConfig{2, 1, Statistics::Distinguishable}); }

}  // namespace

// two sites, one atom per species: E0 = U/2 - sqrt(U^2/4 + 4J^2)
TEST(Hubbard, TwoSiteGroundEnergy) {
  const auto b = pair_basis(2);
  for (double U : {-12.0, -1.0, 0.0, 3.0, 30.0}) {
    HubbardParams hp;
    hp.U = {U};
    const auto gs = ground_state(build_hamiltonian(b, hp));
    EXPECT_NEAR(gs.energy, U / 2 - std::sqrt(U * U / 4 + 4.0), 1e-12) << U;
  }
}

TEST(Hubbard, FreeParticlesOpenChain) {
  const int L = 5;
  const auto b = pair_basis(L);
  HubbardParams hp;
  hp.U = {0.0};
  const auto gs = ground_state(build_hamiltonian(b, hp));
  EXPECT_NEAR(gs.energy, -4.0 * std::cos(M_PI / (L + 1)), 1e-12);
}

TEST(Hubbard, HamiltonianSymmetric) {
  const FockBasis b(LatticeSpec{4, 1.0}, SpeciesConfig{2, 2, Statistics::Fermion});
  HubbardParams hp;
  hp.U = {-7.0};
  hp.offsets = {0.1, -0.2, 0.0, 0.3};
  const RealMatrix H = build_hamiltonian(b, hp);
  EXPECT_LT((H - H.transpose()).norm(), 1e-14);
}

TEST(Hubbard, ThermalState) {
  const auto b = pair_basis(6);
  HubbardParams hp;
  hp.U = {-12.0};
  const RealMatrix H = build_hamiltonian(b, hp);
  const auto rho = thermal_state(b, H, 0.5);
  rho.check();
  EXPECT_NEAR(rho.matrix().trace().real(), 1.0, 1e-12);
  // high temperature tends to the maximally mixed state
  EXPECT_NEAR(thermal_state(b, H, 1e-9).purity(), 1.0 / 36.0, 1e-8);
}

TEST(Hubbard, DephasingIsAffine) {
  const auto b = pair_basis(4);
  HubbardParams hp;
  hp.U = {-5.0};
  const auto gs = ground_state(build_hamiltonian(b, hp));
  const auto rho = DensityMatrix::pure(b, gs.vector.cast<std::complex<double>>());
  const auto r0 = apply_dephasing(rho, 0.0).matrix();
  const auto r1 = apply_dephasing(rho, 1.0).matrix();
  const auto rh = apply_dephasing(rho, 0.3).matrix();
  EXPECT_LT((rh - (0.7 * r0 + 0.3 * r1)).norm(), 1e-14);
  EXPECT_LT((r1 - DensityMatrix::maximally_mixed(b).matrix()).norm(), 1e-14);
  EXPECT_THROW(apply_dephasing(rho, 1.5), ConfigError);
}

TEST(Hubbard, DisorderStatistics) {
  std::vector<double> all;
  for (std::uint64_t s = 0; s < 2000; ++s)
    for (double v : disorder_realization(6, 0.08, s)) all.push_back(v);
  EXPECT_NEAR(mean(all), 0.0, 0.004);
  EXPECT_NEAR(stddev(all), 0.08, 0.003);
  EXPECT_EQ(disorder_realization(6, 0.08, 9), disorder_realization(6, 0.08, 9));
}

TEST(Hubbard, CheckRejectsBadDensity) {
  const auto b = pair_basis(2);
  ComplexMatrix m = ComplexMatrix::Identity(4, 4) * 0.5;
  EXPECT_THROW(DensityMatrix(b, m).check(), NumericalError);
}
