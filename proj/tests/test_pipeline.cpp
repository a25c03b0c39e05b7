#include <gtest/gtest.h>

#include <cmath>

#include "dimcert/errors.hpp"
#include "dimcert/pipeline.hpp"

using namespace dimcert;
using nlohmann::json;

namespace {

json small_config() {
  return json::parse(R"({
    "lattice": {"sites": 4},
    "species": {"count": 2, "atoms": 1},
    "hubbard": {"J": 1.0, "U": -8},
    "sampler": {"positions": 5000, "momenta": 8000},
    "bootstrap": {"replicas": 200},
    "seed": 42
  })");
}

}  // namespace

TEST(Config, Defaults) {
  const auto c = config_from_json(json{{"seed", 1}});
  EXPECT_EQ(c.lattice.sites, 6);
  EXPECT_EQ(c.species.species_count, 2);
  EXPECT_DOUBLE_EQ(c.sigma_k, kDefaultSigmaK);
  EXPECT_EQ(c.positions, 10000u);
  EXPECT_EQ(c.momenta, 25000u);
  EXPECT_EQ(c.reference, ReferenceKind::AttractiveMES);
}

TEST(Config, Errors) {
  EXPECT_THROW(config_from_json(json::object()), ConfigError);
  EXPECT_THROW(config_from_json(json::array()), ConfigError);
  auto j = small_config();
  j["noise"] = {{"r", 1.5}};
  EXPECT_THROW(config_from_json(j), ConfigError);
  j = small_config();
  j["lattice"] = 6;
  EXPECT_THROW(config_from_json(j), ConfigError);
  j = small_config();
  j["hubbard"]["U"] = "strong";
  EXPECT_THROW(config_from_json(j), ConfigError);
  j = small_config();
  j["reference"] = {{"kind", "w_state"}};
  EXPECT_THROW(config_from_json(j), ConfigError);
  j = small_config();
  j["envelope"] = {{"sigma_k", 0}};
  EXPECT_THROW(config_from_json(j), ConfigError);
}

TEST(Config, JsonRoundTripAndHash) {
  auto j = small_config();
  j["hubbard"]["U"] = json::array({-3.67, -12, -6.66});
  j["species"]["count"] = 3;
  j["noise"] = {{"beta_J", 0.5}, {"sigma_V", 0.08}, {"realizations", 10}};
  const auto c = config_from_json(j);
  const auto c2 = config_from_json(to_json(c));
  EXPECT_EQ(to_json(c), to_json(c2));
  EXPECT_EQ(config_hash(c), config_hash(c2));
  auto c3 = c;
  c3.seed = 43;
  EXPECT_NE(config_hash(c), config_hash(c3));
  EXPECT_EQ(config_hash(c).size(), 16u);
}

TEST(Seeds, Distinct) {
  const auto s = derive_seeds(7);
  EXPECT_NE(s.positions, s.momenta);
  EXPECT_NE(s.momenta, s.bootstrap);
  EXPECT_EQ(derive_seeds(7).bootstrap, s.bootstrap);
}

TEST(Prepare, ThermalAndDisorder) {
  auto j = small_config();
  j["noise"] = {{"beta_J", 0.5}};
  const auto st = prepare_state(config_from_json(j));
  st.rho.check();
  EXPECT_LT(st.ground_fraction, 1.0);
  EXPECT_GT(st.ground_fraction, 1.0 / 16);
  j["noise"] = {{"sigma_V", 0.3}, {"realizations", 20}};
  const auto mixed = prepare_state(config_from_json(j));
  EXPECT_LT(mixed.rho.purity(), 1.0 - 1e-6);
  const auto one = prepare_realization(config_from_json(j), 0);
  EXPECT_NEAR(one.rho.purity(), 1.0, 1e-12);
}

TEST(Pipeline, RunPointIsReproducibleAndConsistent) {
  const auto c = config_from_json(small_config());
  const auto a = run_point(c);
  const auto b = run_point(c);
  EXPECT_EQ(to_json(a.result).dump(), to_json(b.result).dump());
  EXPECT_LE(a.exact_bound, a.F + 1e-10);
  EXPECT_LT(std::abs(a.result.bound - a.exact_bound), 3.0 * a.result.se);
  EXPECT_GT(a.result.se, 0.0);
  EXPECT_EQ(a.result.metadata["config_hash"], config_hash(c));
  const auto j = to_json(a.result);
  for (const char* key : {"F_bound", "F_bound_se", "certified_dimension_1sigma", "certified_dimension_3sigma",
                          "thresholds", "g0", "solver", "sigma_k"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j["thresholds"].size(), 4u);
}

TEST(Pipeline, PerRealizationDisorder) {
  auto j = small_config();
  j["noise"] = {{"sigma_V", 0.3}, {"realizations", 3}, {"seed", 5}, {"disorder_mode", "per_realization"}};
  const auto c = config_from_json(j);
  const auto a = run_point(c);
  const auto ref = make_reference(ReferenceKind::AttractiveMES, FockBasis(c.lattice, c.species));
  double F = 0.0;
  for (int r = 0; r < 3; ++r) F += exact_fidelity(prepare_realization(c, r).rho, ref) / 3.0;
  EXPECT_NEAR(a.F, F, 1e-12);
  EXPECT_EQ(a.result.momenta, 3u * c.momenta);
  EXPECT_LT(std::abs(a.result.bound - a.exact_bound), 3.0 * a.result.se);
  EXPECT_TRUE(a.result.metadata.contains("realization_bound_spread"));

  j["noise"]["disorder_mode"] = "mixture";
  const auto m = run_point(config_from_json(j));
  EXPECT_EQ(m.result.momenta, c.momenta);
  EXPECT_GE(m.F, 0.0);

  j["noise"]["disorder_mode"] = "per_realization";
  j["reference"] = {{"kind", "lambda_family"}};
  EXPECT_THROW(run_point(config_from_json(j)), ConfigError);
}

TEST(Pipeline, CertifierFromShots) {
  const auto b = FockBasis(LatticeSpec{4, 1.0}, SpeciesConfig{2, 1, Statistics::Distinguishable});
  const auto ref = make_reference(ReferenceKind::AttractiveMES, b);
  const auto mes = DensityMatrix::pure(b, ref.amplitudes.cast<std::complex<double>>());
  const GaussianEnvelope env;
  ShotSet shots;
  shots.positions = sample_positions(mes, 20000, 1);
  shots.momenta = sample_momenta(mes, env, 20000, 2);
  const Certifier cert(b, env);
  const auto r = cert.certify(shots, ref, BootstrapPlan{200, 3});
  EXPECT_EQ(r.dimension_3sigma, 4);
  EXPECT_NEAR(r.bound, 1.0, 4.0 * r.se + 1e-9);
  const auto mm = DensityMatrix::maximally_mixed(b);
  shots.positions = sample_positions(mm, 20000, 1);
  shots.momenta = sample_momenta(mm, env, 20000, 2);
  EXPECT_EQ(cert.certify(shots, ref, BootstrapPlan{200, 3}).dimension, 1);
}
