#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "dimcert/certifier.hpp"
#include "dimcert/errors.hpp"
#include "dimcert/sampler.hpp"

using namespace dimcert;

namespace {

FockBasis basis(int L, int N = 1, int S = 2, Statistics st = Statistics::Distinguishable) {
  return FockBasis(LatticeSpec{L, 1.0}, SpeciesConfig{S, N, st});
}

DensityMatrix random_state(const FockBasis& b, int rank, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  const auto d = static_cast<Eigen::Index>(b.dim());
  ComplexMatrix A(d, rank);
  for (Eigen::Index i = 0; i < d; ++i)
    for (int j = 0; j < rank; ++j) A(i, j) = {n(rng), n(rng)};
  ComplexMatrix rho = A * A.adjoint();
  return DensityMatrix(b, rho / rho.trace().real());
}

}  // namespace

TEST(Positions, ChiSquare) {
  const auto b = basis(3);
  const auto rho = random_state(b, 2, 4);
  const std::size_t n = 50000;
  const auto shots = sample_positions(rho, n, 99);
  const RealVector p = rho.populations();
  const RealVector q = empirical_populations(b, shots);
  double chi2 = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) chi2 += n * (q[i] - p[i]) * (q[i] - p[i]) / p[i];
  EXPECT_LT(chi2, 26.1);  // 8 degrees of freedom, p = 0.001
  EXPECT_NEAR(q.sum(), 1.0, 1e-12);
}

TEST(Positions, Deterministic) {
  const auto rho = random_state(basis(4), 1, 2);
  EXPECT_EQ(sample_positions(rho, 1000, 5), sample_positions(rho, 1000, 5));
  EXPECT_NE(sample_positions(rho, 1000, 5), sample_positions(rho, 1000, 6));
}

TEST(Mixture, RoundTrip) {
  const auto b = basis(3, 1, 2);
  const auto rho = random_state(b, 3, 8);
  const auto mix = mixture_from_density(rho);
  EXPECT_EQ(mix.states.size(), 3u);
  EXPECT_LT((density_from_mixture(b, mix).matrix() - rho.matrix()).norm(), 1e-12);
}

TEST(FirstQuantized, NormAndExchange) {
  const auto b = basis(4, 2, 2, Statistics::Fermion);
  const auto rho = random_state(b, 1, 3);
  const auto mix = mixture_from_density(rho);
  const ComplexVector t = first_quantized(b, mix.states[0]);
  ASSERT_EQ(t.size(), 256);
  EXPECT_NEAR(t.norm(), 1.0, 1e-12);
  // swap the two atoms of species 0 (the two most significant indices)
  for (int a = 0; a < 4; ++a)
    for (int c = 0; c < 4; ++c)
      for (int r = 0; r < 16; ++r) EXPECT_NEAR(std::abs(t[(a * 4 + c) * 16 + r] + t[(c * 4 + a) * 16 + r]), 0.0, 1e-13);
  const auto bb = basis(4, 2, 2, Statistics::HardCoreBoson);
  const ComplexVector u = first_quantized(bb, mixture_from_density(random_state(bb, 1, 3)).states[0]);
  for (int a = 0; a < 4; ++a)
    for (int c = 0; c < 4; ++c)
      for (int r = 0; r < 16; ++r) EXPECT_NEAR(std::abs(u[(a * 4 + c) * 16 + r] - u[(c * 4 + a) * 16 + r]), 0.0, 1e-13);
}

// sample means of the basis functions approach (Q g) / (Q g)_0
TEST(Momenta, CoefficientMeans) {
  struct Case {
    FockBasis b;
    double sigma;
  };
  std::vector<Case> cases{{basis(3), 1.0}, {basis(3, 2, 2, Statistics::Fermion), 1.2}, {basis(3, 1, 3), 1.5}};
  for (const auto& c : cases) {
    const ModeSpace m(c.b);
    const GaussianEnvelope env(c.sigma);
    const OverlapOperator Q(m, env);
    const auto rho = random_state(c.b, 2, 21);
    ComplexVector want = predicted_coefficients(Q, m.coherence_sums(rho.matrix()));
    want /= want[static_cast<Eigen::Index>(m.zero_mode())].real();
    const std::size_t n = 40000;
    const ComplexVector got = project_coefficients(m, sample_momenta(rho, env, n, 77));
    double bound = 1.0;
    for (int s = 0; s < c.b.species(); ++s) bound *= std::tgamma(c.b.atoms() + 1.0);
    for (Eigen::Index i = 0; i < got.size(); ++i)
      EXPECT_LT(std::abs(got[i] - want[i]), 5.0 * bound / std::sqrt(double(n))) << i;
  }
}

// k0 marginal of two atoms against an independent bin integral
TEST(Momenta, MarginalChiSquare) {
  const int L = 3;
  const auto b = basis(L);
  const GaussianEnvelope env(1.5);
  const auto rho = random_state(b, 1, 31);
  const auto& R = rho.matrix();
  auto density = [&](double k) {
    std::complex<double> acc = 0.0;
    for (int x0 = 0; x0 < L; ++x0)
      for (int x1 = 0; x1 < L; ++x1)
        for (int y0 = 0; y0 < L; ++y0)
          for (int y1 = 0; y1 < L; ++y1)
            acc += R(x0 * L + x1, y0 * L + y1) * std::polar(1.0, -k * (x0 - y0)) * env.overlap(x1 - y1);
    return env.density(k) * acc.real();
  };
  const double lo = -4.5, hi = 4.5;
  const int bins = 30;
  const double w = (hi - lo) / bins;
  std::vector<double> pr(bins + 2, 0.0);
  double total = 0.0;
  for (int i = 0; i < 200000; ++i) {
    const double k = -12 + (i + 0.5) * 24.0 / 200000;
    const double v = density(k) * 24.0 / 200000;
    total += v;
    const int bin = k < lo ? 0 : k >= hi ? bins + 1 : 1 + static_cast<int>((k - lo) / w);
    pr[bin] += v;
  }
  const std::size_t n = 60000;
  const RealMatrix k = sample_momenta(rho, env, n, 5);
  std::vector<double> cnt(bins + 2, 0.0);
  for (Eigen::Index i = 0; i < k.rows(); ++i) {
    const double x = k(i, 0);
    cnt[x < lo ? 0 : x >= hi ? bins + 1 : 1 + static_cast<int>((x - lo) / w)] += 1.0;
  }
  double chi2 = 0.0;
  for (int i = 0; i < bins + 2; ++i) {
    const double e = n * pr[i] / total;
    chi2 += (cnt[i] - e) * (cnt[i] - e) / e;
  }
  EXPECT_LT(chi2, 66.6);  // 31 degrees of freedom, p = 0.0002
}

TEST(Momenta, DeterministicAcrossWorkers) {
  const auto rho = random_state(basis(4), 2, 12);
  const GaussianEnvelope env;
  const RealMatrix a = sample_momenta(rho, env, 500, 3);
  const RealMatrix b = sample_momenta(rho, env, 500, 3);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.rows(), 500);
  EXPECT_EQ(a.cols(), 2);
}

TEST(Momenta, StallReported) {
  const auto rho = random_state(basis(4), 1, 12);
  MomentumSamplerOptions opt;
  opt.min_acceptance = 1.01;
  EXPECT_THROW(sample_momenta(rho, GaussianEnvelope(1.0), 10, 3, opt), NumericalError);
}

TEST(Shots, JsonLinesRoundTrip) {
  const auto b = basis(4, 2, 2, Statistics::Fermion);
  const auto rho = random_state(b, 1, 6);
  const auto pos = sample_positions(rho, 200, 1);
  const RealMatrix mom = sample_momenta(rho, GaussianEnvelope(), 150, 2);
  std::stringstream ss;
  write_position_shots(ss, b, pos);
  write_momentum_shots(ss, b, mom);
  const auto back = read_shots(ss, b);
  EXPECT_EQ(back.positions, pos);
  EXPECT_EQ(back.momenta, mom);
}

TEST(Shots, RecordFormat) {
  const auto b = basis(6);
  std::stringstream ss;
  write_position_shots(ss, b, {b.compose({2, 5})});
  EXPECT_EQ(ss.str(), "{\"shot\": 0, \"basis\": \"position\", \"atoms\": [{\"species\": 1, \"site\": 3}, "
                      "{\"species\": 2, \"site\": 6}]}\n");
  RealMatrix k(1, 2);
  k << -0.8431, 1.5;
  std::stringstream sm;
  write_momentum_shots(sm, b, k);
  EXPECT_EQ(sm.str(), "{\"shot\": 0, \"basis\": \"momentum\", \"atoms\": [{\"species\": 1, \"kd\": -0.8431}, "
                      "{\"species\": 2, \"kd\": 1.5}]}\n");
}

TEST(Shots, MalformedInput) {
  const auto b = basis(6);
  auto expect_line = [&](const std::string& text, const std::string& line) {
    std::stringstream ss(text);
    try {
      read_shots(ss, b);
      FAIL() << "no error for " << text;
    } catch (const DataError& e) {
      EXPECT_NE(std::string(e.what()).find(line), std::string::npos) << e.what();
    }
  };
  const std::string good = "{\"shot\": 0, \"basis\": \"position\", \"atoms\": [{\"species\": 1, \"site\": 3}, {\"species\": 2, \"site\": 3}]}\n";
  expect_line(good + "{\"shot\": 1, \"basis\": \"spin\", \"atoms\": []}\n", "line 2");
  expect_line(good + "not json\n", "line 2");
  expect_line("{\"shot\": 0, \"basis\": \"position\", \"atoms\": [{\"species\": 1, \"site\": 9}, {\"species\": 2, \"site\": 3}]}\n", "line 1");
  expect_line("{\"shot\": 0, \"basis\": \"momentum\", \"atoms\": [{\"species\": 1, \"kd\": 0.1}]}\n", "line 1");
}
