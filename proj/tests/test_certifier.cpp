#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dimcert/certifier.hpp"
#include "dimcert/envelope.hpp"
#include "dimcert/errors.hpp"

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

double trapezoid(const std::function<double(double)>& f, double lo, double hi, int n) {
  const double h = (hi - lo) / n;
  double s = 0.5 * (f(lo) + f(hi));
  for (int i = 1; i < n; ++i) s += f(lo + i * h);
  return s * h;
}

}  // namespace

TEST(Envelope, OverlapMatchesQuadrature) {
  for (double sigma : {0.5, 1.0, kDefaultSigmaK}) {
    const GaussianEnvelope env(sigma);
    EXPECT_NEAR(trapezoid([&](double k) { return env.density(k); }, -12 * sigma, 12 * sigma, 4000), 1.0, 1e-12);
    for (int g = 0; g <= 6; ++g) {
      const double q = trapezoid([&](double k) { return env.density(k) * std::cos(g * k); }, -12 * sigma,
                                 12 * sigma, 20000);
      EXPECT_NEAR(env.overlap(g), q, 1e-12) << sigma << " " << g;
    }
  }
}

TEST(Envelope, DefaultCutoff) {
  for (double sigma : {0.3, 1.0, kDefaultSigmaK}) {
    const GaussianEnvelope env(sigma);
    const int c = env.default_cutoff();
    EXPECT_LE(std::exp(-c * sigma * sigma / 2), 1e-8);
    EXPECT_GT(std::exp(-(c - 1) * sigma * sigma / 2), 1e-8);
  }
}

TEST(Overlap, PositiveDefiniteAtUnitWidth) {
  for (int L = 2; L <= 8; ++L) {
    const ModeSpace m(basis(L));
    const OverlapOperator Q(m, GaussianEnvelope(1.0));
    const RealMatrix D = Q.dense();
    EXPECT_LT((D - D.transpose()).norm(), 1e-12);
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(D);
    EXPECT_GT(es.eigenvalues().minCoeff(), 0.0) << L;
  }
}

TEST(Overlap, ApplyMatchesDenseAndInverse) {
  const ModeSpace m(basis(4, 2, 2, Statistics::Fermion));
  const OverlapOperator Q(m, GaussianEnvelope(1.3));
  const RealMatrix D = Q.dense();
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n;
  RealVector x(static_cast<Eigen::Index>(Q.dim()));
  for (auto& v : x) v = n(rng);
  RealVector y, z;
  Q.apply(x, y);
  EXPECT_LT((y - D * x).norm(), 1e-10 * x.norm());
  Q.precondition(y, z);
  EXPECT_LT((z - x).norm(), 1e-8 * x.norm());
}

TEST(Overlap, IllConditionedThrows) {
  const ModeSpace m(basis(8));
  EXPECT_THROW(OverlapOperator(m, GaussianEnvelope(0.2), 1e6), NumericalError);
}

TEST(Solver, ConjugateGradientMatchesCholesky) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> n;
  const int d = 200;
  RealMatrix A(d, d);
  for (auto& v : A.reshaped()) v = n(rng);
  const RealMatrix M = A * A.transpose() + d * RealMatrix::Identity(d, d);
  RealVector b(d);
  for (auto& v : b) v = n(rng);
  const RealVector want = M.llt().solve(b);
  auto op = [&](const RealVector& x, RealVector& y) { y = M * x; };
  auto jac = [&](const RealVector& r, RealVector& z) { z = r.cwiseQuotient(M.diagonal()); };
  const auto cg = conjugate_gradient(op, jac, b, 1e-12, 1000);
  EXPECT_LT((cg.x - want).norm(), 1e-9 * want.norm());
  EXPECT_GT(cg.iterations, 1);
}

TEST(Solver, RoundTrip) {
  struct Case {
    FockBasis b;
    std::size_t limit;
  };
  std::vector<Case> cases{{basis(6), 2000},
                          {basis(4, 2, 2, Statistics::Fermion), 2000},
                          {basis(4, 2, 2, Statistics::HardCoreBoson), 0},
                          {basis(4, 1, 3), 2000}};
  for (const auto& c : cases) {
    const ModeSpace m(c.b);
    const OverlapOperator Q(m, GaussianEnvelope());
    const ComplexVector g = m.coherence_sums(random_state(c.b, 2, 9).matrix());
    const auto sol = solve_g(Q, predicted_coefficients(Q, g), SolveOptions{c.limit, 1e-13});
    EXPECT_LT((sol.g - g).norm(), 1e-10) << sol.method;
    EXPECT_EQ(sol.method, c.limit ? "cholesky" : "cg");
  }
}

TEST(Bound, AttractiveLiteralMatchesEngine) {
  for (int L = 2; L <= 6; ++L) {
    const auto b = basis(L);
    const ModeSpace m(b);
    const auto ref = make_reference(ReferenceKind::AttractiveMES, b);
    for (int rank : {1, 3, 36}) {
      const auto rho = random_state(b, rank, 100 + L * 7 + rank);
      const auto g = m.coherence_sums(rho.matrix());
      const RealVector p = rho.populations();
      EXPECT_NEAR(bound_attractive(p, g, m), bound_multiparticle(p, g, m, ref), 1e-12);
      EXPECT_NEAR(bound_attractive(p, g, m), exact_bound(rho, m, make_plan(m, ref)).total(), 1e-12);
    }
  }
}

TEST(Bound, TripartiteLiteralMatchesEngine) {
  const auto b = basis(4, 1, 3);
  const ModeSpace m(b);
  const auto ref = make_reference(ReferenceKind::GHZ, b);
  for (int rank : {1, 4}) {
    const auto rho = random_state(b, rank, 40 + rank);
    const auto g = m.coherence_sums(rho.matrix());
    EXPECT_NEAR(bound_tripartite(rho.populations(), g, m), exact_bound(rho, m, make_plan(m, ref)).total(), 1e-12);
  }
}

// I/L^2: populations 1/L^2, no coherences, every CSI term 1/L^2.
TEST(Bound, MaximallyMixedClosedForm) {
  for (int L = 2; L <= 6; ++L) {
    const auto b = basis(L);
    const ModeSpace m(b);
    const auto ref = make_reference(ReferenceKind::AttractiveMES, b);
    const double want = 1.0 / (L * L) - 2.0 * (L - 1) * (L - 2) / (3.0 * L * L);
    EXPECT_NEAR(exact_bound(DensityMatrix::maximally_mixed(b), m, make_plan(m, ref)).total(), want, 1e-13);
  }
  EXPECT_NEAR(1.0 / 36 - 2.0 * 20 / 108, -37.0 / 108, 1e-15);
}

TEST(Bound, ValidOnRandomStates) {
  struct Case {
    FockBasis b;
    ReferenceKind kind;
    std::optional<double> lam;
  };
  std::vector<Case> cases{{basis(3), ReferenceKind::AttractiveMES, {}},
                          {basis(5), ReferenceKind::AttractiveMES, {}},
                          {basis(4), ReferenceKind::NondimerUniform, {}},
                          {basis(5), ReferenceKind::LambdaFamily, 0.7},
                          {basis(4, 2, 2, Statistics::Fermion), ReferenceKind::AttractiveMES, {}},
                          {basis(4, 2, 2, Statistics::HardCoreBoson), ReferenceKind::RepulsiveMES, {}},
                          {basis(3, 1, 3), ReferenceKind::GHZ, {}}};
  for (const auto& c : cases) {
    const ModeSpace m(c.b);
    const auto ref = make_reference(c.kind, c.b, c.lam);
    const auto plan = make_plan(m, ref);
    for (int t = 0; t < 10; ++t) {
      const auto rho = random_state(c.b, 1 + t % 3, 1000 + t);
      EXPECT_LE(exact_bound(rho, m, plan).total(), exact_fidelity(rho, ref) + 1e-10) << to_string(c.kind);
    }
    // tight on the reference itself for uniform references
    if (ref.uniform) {
      const auto r = DensityMatrix::pure(c.b, ref.amplitudes.cast<std::complex<double>>());
      EXPECT_NEAR(exact_bound(r, m, plan).total(), 1.0, 1e-10) << to_string(c.kind);
    }
  }
}

TEST(Bound, CsiTerm) {
  EXPECT_DOUBLE_EQ(csi_bound(0.04, 0.01), 0.02);
  EXPECT_DOUBLE_EQ(csi_bound(0.0, 0.3), 0.0);
}

TEST(Bound, PlanRejectsMismatch) {
  const auto b = basis(4, 1, 3);
  const ModeSpace m(b);
  const auto ref2 = make_reference(ReferenceKind::AttractiveMES, basis(4));
  EXPECT_THROW(make_plan(m, ref2), ConfigError);
}
