// Copyright 2026 The dimcert Authors
// SPDX-License-Identifier: Apache-2.0

#include "dimcert/pipeline.hpp"

#include <fmt/format.h>

#include <cmath>

#include "dimcert/errors.hpp"
#include "dimcert/parallel.hpp"

namespace dimcert {
namespace {

using nlohmann::json;

const json& section(const json& j, const char* key) {
  static const json empty = json::object();
  if (!j.contains(key)) return empty;
  if (!j[key].is_object()) throw ConfigError(std::string("'") + key + "' must be an object");
  return j[key];
}

template <class T>
T get(const json& j, const char* key, T fallback, const char* where) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  try {
    return j[key].get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("bad value for '") + where + "." + key + "'");
  }
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c;
  const auto& lat = section(j, "lattice");
  c.lattice.sites = get<int>(lat, "sites", 6, "lattice");
  const auto& sp = section(j, "species");
  c.species.species_count = get<int>(sp, "count", 2, "species");
  c.species.atoms_per_species = get<int>(sp, "atoms", 1, "species");
  c.species.statistics = statistics_from_string(get<std::string>(sp, "statistics", "distinguishable", "species"));
  const auto& hb = section(j, "hubbard");
  c.hubbard.J = get<double>(hb, "J", 1.0, "hubbard");
  if (hb.contains("U")) {
    if (hb["U"].is_array())
      c.hubbard.U = get<std::vector<double>>(hb, "U", {}, "hubbard");
    else
      c.hubbard.U = {get<double>(hb, "U", 0.0, "hubbard")};
  }
  c.hubbard.offsets = get<std::vector<double>>(hb, "offsets", {}, "hubbard");
  const auto& nz = section(j, "noise");
  c.noise.r = get<double>(nz, "r", 0.0, "noise");
  c.noise.sigma_V = get<double>(nz, "sigma_V", 0.0, "noise");
  if (nz.contains("beta_J") && !nz["beta_J"].is_null()) c.noise.beta = get<double>(nz, "beta_J", 0.0, "noise");
  c.noise.seed = get<std::uint64_t>(nz, "seed", 0, "noise");
  c.realizations = get<int>(nz, "realizations", 1, "noise");
  c.disorder_mode = disorder_mode_from_string(get<std::string>(nz, "disorder_mode", "mixture", "noise"));
  const auto& env = section(j, "envelope");
  c.sigma_k = get<double>(env, "sigma_k", kDefaultSigmaK, "envelope");
  const auto& sm = section(j, "sampler");
  c.positions = get<std::size_t>(sm, "positions", 10000, "sampler");
  c.momenta = get<std::size_t>(sm, "momenta", 25000, "sampler");
  c.cutoff = get<int>(sm, "cutoff", -1, "sampler");
  const auto& rf = section(j, "reference");
  c.reference = reference_kind_from_string(get<std::string>(rf, "kind", "attractive_mes", "reference"));
  if (rf.contains("lambda1") && !rf["lambda1"].is_null()) c.lambda1 = get<double>(rf, "lambda1", 0.0, "reference");
  c.lambda_points = get<int>(rf, "lambda_points", 200, "reference");
  const auto& bs = section(j, "bootstrap");
  c.replicas = get<int>(bs, "replicas", 10000, "bootstrap");
  if (!j.contains("seed")) throw ConfigError("'seed' is required");
  c.seed = get<std::uint64_t>(j, "seed", 0, "config");

  if (c.realizations < 1) throw ConfigError("noise.realizations must be at least 1");
  if (c.lambda_points < 1) throw ConfigError("reference.lambda_points must be at least 1");
  if (c.replicas < 0) throw ConfigError("bootstrap.replicas must be non-negative");
  if (!(c.noise.r >= 0.0 && c.noise.r <= 1.0)) throw ConfigError("noise.r must lie in [0, 1]");
  if (!(c.noise.sigma_V >= 0.0)) throw ConfigError("noise.sigma_V must be non-negative");
  if (c.noise.beta && !(*c.noise.beta > 0.0)) throw ConfigError("noise.beta_J must be positive");
  if (!(c.sigma_k > 0.0)) throw ConfigError("envelope.sigma_k must be positive");
  return c;
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["lattice"] = {{"sites", c.lattice.sites}};
  j["species"] = {{"count", c.species.species_count},
                  {"atoms", c.species.atoms_per_species},
                  {"statistics", to_string(c.species.statistics)}};
  j["hubbard"] = {{"J", c.hubbard.J}, {"offsets", c.hubbard.offsets}};
  if (c.hubbard.U.size() == 1)
    j["hubbard"]["U"] = c.hubbard.U[0];
  else
    j["hubbard"]["U"] = c.hubbard.U;
  j["noise"] = {{"r", c.noise.r},
                {"sigma_V", c.noise.sigma_V},
                {"beta_J", c.noise.beta ? json(*c.noise.beta) : json(nullptr)},
                {"realizations", c.realizations},
                {"disorder_mode", to_string(c.disorder_mode)},
                {"seed", c.noise.seed}};
  j["envelope"] = {{"sigma_k", c.sigma_k}};
  j["sampler"] = {{"positions", c.positions}, {"momenta", c.momenta}, {"cutoff", c.cutoff}};
  j["reference"] = {{"kind", to_string(c.reference)},
                    {"lambda1", c.lambda1 ? json(*c.lambda1) : json(nullptr)},
                    {"lambda_points", c.lambda_points}};
  j["bootstrap"] = {{"replicas", c.replicas}};
  j["seed"] = c.seed;
  return j;
}

std::string config_hash(const ExperimentConfig& c) {
  // FNV-1a over the canonical dump
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : to_json(c).dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

Seeds derive_seeds(std::uint64_t seed) {
  Seeds s;
  s.disorder = splitmix64(seed ^ 0x1111);
  s.positions = splitmix64(seed ^ 0x2222);
  s.momenta = splitmix64(seed ^ 0x3333);
  s.bootstrap = splitmix64(seed ^ 0x4444);
  return s;
}

FockBasis make_basis(const ExperimentConfig& c) { return FockBasis(c.lattice, c.species); }

namespace {

std::uint64_t disorder_seed(const ExperimentConfig& c) {
  return c.noise.seed != 0 ? c.noise.seed : derive_seeds(c.seed).disorder;
}

DensityMatrix realization_state(const ExperimentConfig& c, const FockBasis& basis, int r) {
  HubbardParams hp = c.hubbard;
  if (c.noise.sigma_V > 0.0) {
    const auto dv = disorder_realization(c.lattice.sites, c.hubbard.J * c.noise.sigma_V,
                                         splitmix64(disorder_seed(c) + static_cast<std::uint64_t>(r)));
    if (hp.offsets.empty()) hp.offsets.assign(dv.size(), 0.0);
    for (std::size_t i = 0; i < dv.size(); ++i) hp.offsets[i] += dv[i];
  }
  const RealMatrix H = build_hamiltonian(basis, hp);
  if (c.noise.beta) return thermal_state(basis, H, *c.noise.beta / c.hubbard.J);
  return DensityMatrix::pure(basis, ground_state(H).vector.cast<std::complex<double>>());
}

PreparedState finish_state(const ExperimentConfig& c, const FockBasis& basis, DensityMatrix rho) {
  const GroundState gs = ground_state(build_hamiltonian(basis, c.hubbard));
  DensityMatrix out = apply_dephasing(rho, c.noise.r);
  const ComplexVector g0 = gs.vector.cast<std::complex<double>>();
  return PreparedState{out, gs.energy, (g0.adjoint() * out.matrix() * g0)(0, 0).real(), gs.degeneracy};
}

}  // namespace

PreparedState prepare_state(const ExperimentConfig& c) {
  const FockBasis basis = make_basis(c);
  const int R = c.noise.sigma_V > 0.0 ? c.realizations : 1;
  std::vector<ComplexMatrix> parts(static_cast<std::size_t>(R));
  parallel_for(parts.size(), [&](std::size_t r) {
    parts[r] = realization_state(c, basis, static_cast<int>(r)).matrix();
  });
  ComplexMatrix sum = ComplexMatrix::Zero(static_cast<Eigen::Index>(basis.dim()),
                                          static_cast<Eigen::Index>(basis.dim()));
  for (const auto& m : parts) sum += m;
  return finish_state(c, basis, DensityMatrix(basis, sum / static_cast<double>(R)));
}

PreparedState prepare_realization(const ExperimentConfig& c, int realization) {
  const FockBasis basis = make_basis(c);
  return finish_state(c, basis, realization_state(c, basis, realization));
}

namespace {

// Rescales the estimate so that the zero mode, the trace, is one.
ComplexVector normalized(const ModeSpace& modes, const ComplexVector& g) {
  const double g0 = g[static_cast<Eigen::Index>(modes.zero_mode())].real();
  if (!(g0 > 0.0)) throw NumericalError("zero-mode coefficient is not positive; too few momentum shots?");
  return g / g0;
}

}  // namespace

json to_json(const CertificationResult& r) {
  json j;
  j["reference"] = r.reference;
  j["lambda1"] = r.lambda1 ? json(*r.lambda1) : json(nullptr);
  j["F_bound"] = r.bound;
  j["population_term"] = r.terms.population;
  j["coherence_term"] = r.terms.coherence;
  j["coherence_sum"] = r.terms.coherence_sum;
  j["csi_subtraction"] = r.terms.csi;
  j["F_bound_se"] = r.se;
  j["bootstrap_replicas"] = r.replicas;
  j["certified_dimension"] = r.dimension;
  j["certified_dimension_1sigma"] = r.dimension_1sigma;
  j["certified_dimension_3sigma"] = r.dimension_3sigma;
  j["thresholds"] = r.ladder;
  j["g0"] = {r.g0.real(), r.g0.imag()};
  j["solver"] = {{"method", r.solver}, {"iterations", r.solver_iterations}, {"residual", r.solver_residual}};
  j["sigma_k"] = r.sigma_k;
  j["position_shots"] = r.positions;
  j["momentum_shots"] = r.momenta;
  j["F_exact"] = r.exact_fidelity ? json(*r.exact_fidelity) : json(nullptr);
  j["F_bound_exact"] = r.exact_bound ? json(*r.exact_bound) : json(nullptr);
  j["metadata"] = r.metadata;
  return j;
}

Certifier::Certifier(const FockBasis& basis, const GaussianEnvelope& envelope, SolveOptions opt)
    : envelope_(envelope),
      opt_(opt),
      modes_(std::make_unique<ModeSpace>(basis)),
      overlap_(std::make_unique<OverlapOperator>(*modes_, envelope)) {}

SolveResult Certifier::coefficients(const RealMatrix& momenta) const {
  return solve_g(*overlap_, project_coefficients(*modes_, momenta), opt_);
}

CertificationResult Certifier::certify(const ShotSet& shots, const ReferenceState& ref,
                                       const BootstrapPlan& plan) const {
  const SolveResult sol = coefficients(shots.momenta);
  return finish(shots, ref, make_plan(*modes_, ref), sol, plan);
}

CertificationResult Certifier::certify_lambda_scan(const ShotSet& shots, const std::vector<double>& grid,
                                                   const BootstrapPlan& plan) const {
  const FockBasis& basis = modes_->basis();
  const SolveResult sol = coefficients(shots.momenta);
  const RealVector p = empirical_populations(basis, shots.positions);
  const ComplexVector g = normalized(*modes_, sol.g);
  const auto best = optimize_lambda(grid, basis.sites(), [&](double lam) {
    const auto ref = make_reference(ReferenceKind::LambdaFamily, basis, lam);
    return evaluate(plan_lambda(*modes_, ref), p, g).total();
  });
  const auto ref = make_reference(ReferenceKind::LambdaFamily, basis, best.lambda1);
  return finish(shots, ref, plan_lambda(*modes_, ref), sol, plan);
}

CertificationResult Certifier::finish(const ShotSet& shots, const ReferenceState& ref, const BoundPlan& bp,
                                      const SolveResult& sol, const BootstrapPlan& plan) const {
  const FockBasis& basis = modes_->basis();
  const RealVector p = empirical_populations(basis, shots.positions);
  CertificationResult r;
  r.reference = to_string(ref.kind);
  r.lambda1 = ref.lambda1;
  r.sigma_k = envelope_.sigma();
  r.positions = shots.positions.size();
  r.momenta = static_cast<std::size_t>(shots.momenta.rows());
  r.terms = evaluate(bp, p, normalized(*modes_, sol.g));
  r.bound = r.terms.total();
  r.g0 = sol.g[static_cast<Eigen::Index>(modes_->zero_mode())];
  r.solver = sol.method;
  r.solver_iterations = sol.iterations;
  r.solver_residual = sol.residual;
  r.ladder = ref.ladder.values();
  r.replicas = plan.replicas;
  if (plan.replicas >= 2) {
    const RealVector v = solve_real_block(*overlap_, bp.a, opt_);
    const RealVector s = project_scalars(*modes_, shots.momenta, v);
    RealVector e0 = RealVector::Zero(static_cast<Eigen::Index>(modes_->mode_count()));
    e0[static_cast<Eigen::Index>(modes_->zero_mode())] = 1.0;
    const RealVector z = project_scalars(*modes_, shots.momenta, solve_real_block(*overlap_, e0, opt_));
    auto f = [&bp](const RealVector& q) { return bp.diag.dot(q) + bp.constant - csi_total(bp, q); };
    r.se = bootstrap_se(shots.positions, basis.dim(), f, s, z, plan);
  }
  r.dimension = certified_dimension(r.bound, ref.ladder);
  r.dimension_1sigma = certified_dimension(r.bound - r.se, ref.ladder);
  r.dimension_3sigma = certified_dimension(r.bound - 3.0 * r.se, ref.ladder);
  return r;
}

namespace {

PointResult certify_state(const ExperimentConfig& c, const PreparedState& st, const Seeds& seeds) {
  const FockBasis& basis = st.rho.basis();
  const GaussianEnvelope env(c.sigma_k);
  ShotSet shots;
  shots.positions = sample_positions(st.rho, c.positions, seeds.positions);
  MomentumSamplerOptions mo;
  mo.cutoff = c.cutoff;
  shots.momenta = sample_momenta(st.rho, env, c.momenta, seeds.momenta, mo);
  const Certifier cert(basis, env);
  const BootstrapPlan plan{c.replicas, seeds.bootstrap};
  PointResult out;
  if (c.reference == ReferenceKind::LambdaFamily && !c.lambda1) {
    out.result = cert.certify_lambda_scan(shots, lambda_grid(c.lattice.sites, c.lambda_points), plan);
  } else {
    out.result = cert.certify(shots, make_reference(c.reference, basis, c.lambda1), plan);
  }
  const auto ref = make_reference(c.reference, basis, out.result.lambda1 ? out.result.lambda1 : c.lambda1);
  out.F = exact_fidelity(st.rho, ref);
  out.exact_bound = exact_bound(st.rho, cert.modes(), make_plan(cert.modes(), ref)).total();
  out.result.exact_fidelity = out.F;
  out.result.exact_bound = out.exact_bound;
  return out;
}

// Certifies every realization with its own shots; averages bounds and
// fidelities. The SE is that of the mean over independent shot sets.
PointResult per_realization(const ExperimentConfig& c, const Seeds& seeds) {
  if (c.reference == ReferenceKind::LambdaFamily && !c.lambda1)
    throw ConfigError("per-realization disorder needs a fixed lambda1");
  const int R = c.realizations;
  std::vector<PointResult> runs;
  for (int r = 0; r < R; ++r)
    runs.push_back(certify_state(c, prepare_realization(c, r), derive_seeds(splitmix64(seeds.positions + r))));
  std::vector<double> F, B;
  double var = 0.0;
  PointResult out = runs.front();
  out.exact_bound = 0.0;
  for (const auto& p : runs) {
    F.push_back(p.F);
    B.push_back(p.result.bound);
    var += p.result.se * p.result.se;
    out.exact_bound += p.exact_bound / R;
  }
  const auto ladder = make_reference(c.reference, make_basis(c), c.lambda1).ladder;
  auto& r = out.result;
  r.bound = mean(B);
  r.se = std::sqrt(var) / R;
  r.dimension = certified_dimension(r.bound, ladder);
  r.dimension_1sigma = certified_dimension(r.bound - r.se, ladder);
  r.dimension_3sigma = certified_dimension(r.bound - 3.0 * r.se, ladder);
  out.F = mean(F);
  r.exact_fidelity = out.F;
  r.exact_bound = out.exact_bound;
  r.positions *= static_cast<std::size_t>(R);
  r.momenta *= static_cast<std::size_t>(R);
  r.metadata["realization_F_spread"] = stddev(F);
  r.metadata["realization_bound_spread"] = stddev(B);
  return out;
}

}  // namespace

PointResult run_point(const ExperimentConfig& c) {
  const auto seeds = derive_seeds(c.seed);
  const bool split = c.disorder_mode == DisorderMode::PerRealization && c.noise.sigma_V > 0.0 && c.realizations > 1;
  const PreparedState st = prepare_state(c);
  PointResult out = split ? per_realization(c, seeds) : certify_state(c, st, seeds);
  auto meta = out.result.metadata;
  out.result.metadata = {{"config_hash", config_hash(c)},
                         {"seed", c.seed},
                         {"seeds", {{"positions", seeds.positions},
                                    {"momenta", seeds.momenta},
                                    {"bootstrap", seeds.bootstrap},
                                    {"disorder", disorder_seed(c)}}},
                         {"disorder_mode", to_string(c.disorder_mode)},
                         {"ground_fraction", st.ground_fraction},
                         {"purity", st.rho.purity()}};
  if (meta.is_object()) out.result.metadata.update(meta);
  return out;
}

}  // namespace dimcert
