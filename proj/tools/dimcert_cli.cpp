// Copyright 2026 The dimcert Authors
// SPDX-License-Identifier: Apache-2.0
//
// dimcert: simulate shots, certify entanglement dimension, run sweeps.

#include <fmt/format.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dimcert/errors.hpp"
#include "dimcert/parallel.hpp"
#include "dimcert/pipeline.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace dimcert;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> sigma_k;
  std::optional<std::size_t> positions;
  std::optional<std::size_t> momenta;
  std::optional<int> replicas;
  std::optional<std::string> reference;
  std::optional<double> lambda1;
};

void add_overrides(CLI::App* app, Overrides& o) {
  app->add_option("--seed", o.seed, "Master seed");
  app->add_option("--sigma-k", o.sigma_k, "Envelope width sigma_k*d");
  app->add_option("--positions", o.positions, "Position shots");
  app->add_option("--momenta", o.momenta, "Momentum shots");
  app->add_option("--replicas", o.replicas, "Bootstrap replicas");
  app->add_option("--reference", o.reference,
                  "attractive_mes | ghz | repulsive_mes | nondimer_uniform | lambda_family");
  app->add_option("--lambda1", o.lambda1, "Leading Schmidt coefficient of the lambda family");
}

json read_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
}

ExperimentConfig load_config(const std::string& path, const Overrides& o, bool need_seed = true) {
  json j = path.empty() ? json::object() : read_json_file(path);
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  if (o.seed) j["seed"] = *o.seed;
  if (!need_seed && !j.contains("seed")) j["seed"] = 0;
  if (o.sigma_k) j["envelope"]["sigma_k"] = *o.sigma_k;
  if (o.positions) j["sampler"]["positions"] = *o.positions;
  if (o.momenta) j["sampler"]["momenta"] = *o.momenta;
  if (o.replicas) j["bootstrap"]["replicas"] = *o.replicas;
  if (o.reference) j["reference"]["kind"] = *o.reference;
  if (o.lambda1) j["reference"]["lambda1"] = *o.lambda1;
  return config_from_json(j);
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write '" + p.string() + "'");
  os << text;
}

void print_ladder(std::ostream& os, const std::vector<double>& ladder, std::optional<double> F) {
  const int D = static_cast<int>(ladder.size());
  os << fmt::format("{:>4}  {:>12}  {:>9}", "k", "B_k", "exact") << (F ? "  F_bound > B_k" : "") << "\n";
  for (int k = 1; k <= D; ++k) {
    const double b = ladder[static_cast<std::size_t>(k - 1)];
    std::string exact = "-";
    const double r = b * D;
    if (std::abs(r - std::round(r)) < 1e-12) {
      const long n = std::lround(r), g = std::gcd(n, static_cast<long>(D));
      exact = fmt::format("{}/{}", n / g, D / g);
    }
    os << fmt::format("{:>4}  {:>12.8f}  {:>9}", k, b, exact);
    if (F) os << "  " << (*F > b ? "yes" : "no");
    os << "\n";
  }
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const std::string& config_path, const Overrides& o, const std::string& out_dir) {
  const ExperimentConfig c = load_config(config_path, o);
  const auto seeds = derive_seeds(c.seed);
  const PreparedState st = prepare_state(c);
  const FockBasis& basis = st.rho.basis();
  const GaussianEnvelope env(c.sigma_k);
  const auto positions = sample_positions(st.rho, c.positions, seeds.positions);
  MomentumSamplerOptions mo;
  mo.cutoff = c.cutoff;
  const RealMatrix momenta = sample_momenta(st.rho, env, c.momenta, seeds.momenta, mo);

  fs::create_directories(out_dir);
  {
    std::ofstream os(fs::path(out_dir) / "positions.jsonl", std::ios::binary);
    write_position_shots(os, basis, positions);
  }
  {
    std::ofstream os(fs::path(out_dir) / "momenta.jsonl", std::ios::binary);
    write_momentum_shots(os, basis, momenta);
  }

  json meta;
  meta["config"] = to_json(c);
  meta["config_hash"] = config_hash(c);
  meta["seed"] = c.seed;
  meta["seeds"] = {{"positions", seeds.positions}, {"momenta", seeds.momenta}, {"bootstrap", seeds.bootstrap}};
  meta["sigma_k"] = c.sigma_k;
  meta["position_shots"] = c.positions;
  meta["momentum_shots"] = c.momenta;
  meta["ground_energy"] = st.ground_energy;
  meta["ground_fraction"] = st.ground_fraction;
  meta["purity"] = st.rho.purity();
  const auto mix = mixture_from_density(st.rho);
  std::size_t lead = 0;
  for (std::size_t i = 1; i < mix.weights.size(); ++i)
    if (mix.weights[i] > mix.weights[lead]) lead = i;
  meta["schmidt_spectrum"] = schmidt_decompose(basis, mix.states[lead]);
  meta["schmidt_weight"] = mix.weights[lead];
  try {
    std::optional<double> lam = c.lambda1;
    if (c.reference == ReferenceKind::LambdaFamily && !lam) lam = 1.0;
    const auto ref = make_reference(c.reference, basis, lam);
    meta["reference"] = to_string(c.reference);
    meta["F_exact"] = exact_fidelity(st.rho, ref);
  } catch (const ConfigError& e) {
    meta["F_exact"] = nullptr;
    meta["reference_error"] = e.what();
  }
  write_file(fs::path(out_dir) / "metadata.json", meta.dump(2) + "\n");
  std::cout << fmt::format("wrote {} position and {} momentum shots to {}\n", c.positions, c.momenta, out_dir);
  return 0;
}

// ---------------------------------------------------------------- certify

ShotSet load_shots(const FockBasis& basis, const std::vector<std::string>& files) {
  ShotSet all;
  std::vector<RealMatrix> parts;
  for (const auto& f : files) {
    std::ifstream is(f);
    if (!is) throw DataError("cannot open shot file '" + f + "'");
    ShotSet s;
    try {
      s = read_shots(is, basis);
    } catch (const DataError& e) {
      throw DataError(f + ": " + e.what());
    }
    all.positions.insert(all.positions.end(), s.positions.begin(), s.positions.end());
    if (s.momenta.rows() > 0) parts.push_back(s.momenta);
  }
  Eigen::Index rows = 0;
  for (const auto& p : parts) rows += p.rows();
  all.momenta.resize(rows, basis.total_atoms());
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    all.momenta.middleRows(at, p.rows()) = p;
    at += p.rows();
  }
  if (all.positions.empty()) throw DataError("no position shots found");
  if (all.momenta.rows() == 0) throw DataError("no momentum shots found");
  return all;
}

int cmd_certify(const std::string& config_path, const Overrides& o, const std::vector<std::string>& shot_files,
                const std::string& metadata_path, const std::string& out_path) {
  ExperimentConfig c = load_config(config_path, o, false);
  std::optional<json> meta;
  if (!metadata_path.empty()) {
    std::ifstream is(metadata_path);
    if (!is) throw DataError("cannot open metadata '" + metadata_path + "'");
    try {
      meta = json::parse(is);
    } catch (const json::parse_error& e) {
      throw DataError("metadata is not valid JSON: " + std::string(e.what()));
    }
    if (meta->contains("sigma_k") && (*meta)["sigma_k"].is_number()) {
      const double ms = (*meta)["sigma_k"].get<double>();
      if (std::abs(ms - c.sigma_k) > 1e-12 * std::max(1.0, ms))
        std::cerr << fmt::format("warning: shots were simulated with sigma_k = {} but certification uses {}\n", ms,
                                 c.sigma_k);
    }
  }
  const FockBasis basis = make_basis(c);
  const ShotSet shots = load_shots(basis, shot_files);
  const GaussianEnvelope env(c.sigma_k);
  const Certifier cert(basis, env);
  const BootstrapPlan plan{c.replicas, derive_seeds(c.seed).bootstrap};
  CertificationResult r;
  if (c.reference == ReferenceKind::LambdaFamily && !c.lambda1)
    r = cert.certify_lambda_scan(shots, lambda_grid(c.lattice.sites, c.lambda_points), plan);
  else
    r = cert.certify(shots, make_reference(c.reference, basis, c.lambda1), plan);
  r.metadata = {{"config_hash", config_hash(c)}, {"seed", c.seed}};
  if (meta) {
    if (meta->contains("F_exact") && (*meta)["F_exact"].is_number()) r.exact_fidelity = (*meta)["F_exact"].get<double>();
    if (meta->contains("config_hash")) r.metadata["simulation_config_hash"] = (*meta)["config_hash"];
  }
  const std::string text = to_json(r).dump(2) + "\n";
  std::ostream& table = out_path.empty() ? std::cerr : std::cout;
  if (out_path.empty())
    std::cout << text;
  else
    write_file(out_path, text);
  table << fmt::format("F_bound = {:.6f} +- {:.6f}  (population {:.6f}, coherence {:.6f})\n", r.bound, r.se,
                       r.terms.population, r.terms.coherence);
  if (r.lambda1) table << fmt::format("lambda1 = {:.6f}\n", *r.lambda1);
  table << fmt::format("certified dimension: {} (1 sigma: {}, 3 sigma: {})\n", r.dimension, r.dimension_1sigma,
                       r.dimension_3sigma);
  print_ladder(table, r.ladder, r.bound);
  return 0;
}

// ---------------------------------------------------------------- sweep

struct AxisInfo {
  const char* name;
  const char* unit;
};

constexpr AxisInfo kAxes[] = {{"U_over_J", "1"},  {"r", "1"},         {"sigma_V", "J"},  {"L", "sites"},
                              {"N_s", "shots"},   {"beta_J", "1"},    {"lambda1", "1"}};

const AxisInfo& axis_info(const std::string& axis) {
  for (const auto& a : kAxes)
    if (axis == a.name) return a;
  std::string names;
  for (const auto& a : kAxes) names += std::string(names.empty() ? "" : ", ") + a.name;
  throw ConfigError("unknown sweep axis '" + axis + "' (expected one of " + names + ")");
}

ExperimentConfig at_point(ExperimentConfig c, const std::string& axis, double x, std::size_t index) {
  if (axis == "U_over_J") {
    if (c.hubbard.U.size() != 1) throw ConfigError("U_over_J sweeps need a scalar hubbard.U");
    c.hubbard.U = {x * c.hubbard.J};
  } else if (axis == "r") {
    if (!(x >= 0.0 && x <= 1.0)) throw ConfigError("r must lie in [0, 1]");
    c.noise.r = x;
  } else if (axis == "sigma_V") {
    if (!(x >= 0.0)) throw ConfigError("sigma_V must be non-negative");
    c.noise.sigma_V = x;
  } else if (axis == "L") {
    if (x != std::round(x) || x < 2) throw ConfigError("L values must be integers >= 2");
    c.lattice.sites = static_cast<int>(x);
    c.hubbard.offsets.clear();
  } else if (axis == "N_s") {
    if (x != std::round(x) || x < 2) throw ConfigError("N_s values must be integers >= 2");
    c.momenta = static_cast<std::size_t>(x);
  } else if (axis == "beta_J") {
    if (!(x > 0.0)) throw ConfigError("beta_J must be positive");
    c.noise.beta = x;
  } else if (axis == "lambda1") {
    if (c.reference != ReferenceKind::LambdaFamily) throw ConfigError("lambda1 sweeps need reference.kind = lambda_family");
    c.lambda1 = x;
  }
  c.seed = splitmix64(c.seed + index);
  return c;
}

std::vector<double> parse_values(const std::string& values, std::optional<double> from, std::optional<double> to,
                                 int steps) {
  std::vector<double> xs;
  if (!values.empty()) {
    std::stringstream ss(values);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        xs.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw ConfigError("bad sweep value '" + item + "'");
      }
    }
  } else if (from && to) {
    if (steps < 2) throw ConfigError("--steps must be at least 2");
    for (int i = 0; i < steps; ++i) xs.push_back(*from + (*to - *from) * i / (steps - 1));
  } else {
    throw ConfigError("give either --values or --from/--to/--steps");
  }
  if (xs.empty()) throw ConfigError("empty sweep");
  return xs;
}

int cmd_sweep(const std::string& config_path, const Overrides& o, const std::string& axis,
              const std::vector<double>& xs, const std::string& out_dir) {
  const ExperimentConfig base = load_config(config_path, o);
  const AxisInfo& info = axis_info(axis);
  std::vector<ExperimentConfig> configs;
  for (std::size_t i = 0; i < xs.size(); ++i) configs.push_back(at_point(base, axis, xs[i], i));
  SweepResult sweep{info.name, info.unit, std::vector<SweepPoint>(xs.size()), ""};
  for (std::size_t i = 0; i < xs.size(); ++i) sweep.points[i].x = xs[i];
  validate(sweep);

  fs::create_directories(out_dir);
  std::vector<json> results(xs.size());
  std::vector<std::string> errors(xs.size());
  parallel_for(xs.size(), [&](std::size_t i) {
    try {
      const PointResult pr = run_point(configs[i]);
      auto& p = sweep.points[i];
      p.F = pr.F;
      p.bound = pr.result.bound;
      p.se = pr.result.se;
      p.dim_1sigma = pr.result.dimension_1sigma;
      p.dim_3sigma = pr.result.dimension_3sigma;
      results[i] = to_json(pr.result);
      results[i]["axis"] = {{"name", axis}, {"value", xs[i]}, {"index", i}};
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (!errors[i].empty()) throw ConfigError(fmt::format("point {} ({} = {}): {}", i, axis, xs[i], errors[i]));
  for (std::size_t i = 0; i < xs.size(); ++i)
    write_file(fs::path(out_dir) / fmt::format("point_{:03d}.json", i), results[i].dump(2) + "\n");
  sweep.metadata = fmt::format("config_hash={} seed={} sigma_k={} workers={}", config_hash(base), base.seed,
                               base.sigma_k, worker_count());
  std::ofstream csv(fs::path(out_dir) / "sweep.csv");
  write_csv(csv, sweep);
  std::cout << fmt::format("wrote {} points to {}\n", xs.size(), out_dir);
  return 0;
}

// ---------------------------------------------------------------- thresholds

int cmd_thresholds(const std::string& config_path, const Overrides& o, std::optional<int> sites,
                   std::optional<int> species, std::optional<int> atoms, std::optional<std::string> statistics) {
  ExperimentConfig c = load_config(config_path, o, false);
  if (sites) c.lattice.sites = *sites;
  if (species) c.species.species_count = *species;
  if (atoms) c.species.atoms_per_species = *atoms;
  if (statistics) c.species.statistics = statistics_from_string(*statistics);
  const FockBasis basis = make_basis(c);
  if (c.reference == ReferenceKind::LambdaFamily && !c.lambda1) throw ConfigError("lambda family needs --lambda1");
  const auto ref = make_reference(c.reference, basis, c.lambda1);
  std::cout << fmt::format("reference {} on L = {}, {} species x {} atoms ({})\n", to_string(c.reference),
                           c.lattice.sites, c.species.species_count, c.species.atoms_per_species,
                           to_string(c.species.statistics));
  print_ladder(std::cout, ref.ladder.values(), std::nullopt);
  return 0;
}

int check_workers() {
  if (const char* env = std::getenv("DIMCERT_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*env == '\0' || *end != '\0' || v < 1) {
      std::cerr << "error: DIMCERT_WORKERS must be a positive integer, got '" << env << "'\n";
      return kExitConfig;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entanglement-dimension certification from position and momentum shots"};
  app.require_subcommand(1);
  app.footer("Environment: DIMCERT_WORKERS sets the worker count.\nExit codes: 0 ok, 2 config error, 3 data error.");

  std::string config;
  Overrides o;

  std::string sim_out = "shots";
  auto* sim = app.add_subcommand("simulate", "Simulate position and momentum shots");
  sim->add_option("-c,--config", config, "Experiment config (JSON)")->required();
  sim->add_option("-o,--out", sim_out, "Output directory");
  add_overrides(sim, o);

  std::vector<std::string> shot_files;
  std::string metadata, cert_out;
  auto* cert = app.add_subcommand("certify", "Certify a fidelity bound from shot files");
  cert->add_option("-c,--config", config, "Experiment config (JSON)");
  cert->add_option("shots", shot_files, "JSONL shot files")->required();
  cert->add_option("-m,--metadata", metadata, "Simulation metadata for comparison");
  cert->add_option("-o,--out", cert_out, "Write the result JSON here instead of stdout");
  add_overrides(cert, o);

  std::string axis, values, sweep_out = "sweep";
  std::optional<double> from, to;
  int steps = 0;
  auto* sw = app.add_subcommand("sweep", "Run simulate+certify over one axis");
  sw->add_option("-c,--config", config, "Experiment config (JSON)")->required();
  sw->add_option("-a,--axis", axis, "U_over_J | r | sigma_V | L | N_s | beta_J | lambda1")->required();
  sw->add_option("--values", values, "Comma-separated axis values");
  sw->add_option("--from", from, "First axis value");
  sw->add_option("--to", to, "Last axis value");
  sw->add_option("--steps", steps, "Number of evenly spaced values");
  sw->add_option("-o,--out", sweep_out, "Output directory");
  add_overrides(sw, o);

  std::optional<int> sites, species, atoms;
  std::optional<std::string> statistics;
  auto* th = app.add_subcommand("thresholds", "Print the B_k ladder of a reference state");
  th->add_option("-c,--config", config, "Experiment config (JSON)");
  th->add_option("--sites", sites, "Lattice sites L");
  th->add_option("--species", species, "Number of species");
  th->add_option("--atoms", atoms, "Atoms per species");
  th->add_option("--statistics", statistics, "fermion | hardcore_boson | distinguishable");
  add_overrides(th, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  if (int rc = check_workers()) return rc;

  try {
    if (*sim) return cmd_simulate(config, o, sim_out);
    if (*cert) return cmd_certify(config, o, shot_files, metadata, cert_out);
    if (*sw) {
      axis_info(axis);
      return cmd_sweep(config, o, axis, parse_values(values, from, to, steps), sweep_out);
    }
    if (*th) return cmd_thresholds(config, o, sites, species, atoms, statistics);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
