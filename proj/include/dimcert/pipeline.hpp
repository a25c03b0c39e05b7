// Copyright 2026 The dimcert Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dimcert/certifier.hpp"
#include "dimcert/sampler.hpp"
#include "dimcert/stats.hpp"
#include "json.hpp"

namespace dimcert {

struct ExperimentConfig {
  LatticeSpec lattice;
  SpeciesConfig species;
  HubbardParams hubbard;
  NoiseSpec noise;
  int realizations = 1;
  DisorderMode disorder_mode = DisorderMode::Mixture;
  double sigma_k = kDefaultSigmaK;
  std::size_t positions = 10000;
  std::size_t momenta = 25000;
  int cutoff = -1;
  ReferenceKind reference = ReferenceKind::AttractiveMES;
  std::optional<double> lambda1;
  int lambda_points = 200;
  int replicas = 10000;
  std::uint64_t seed = 0;
};

// Throws ConfigError with the offending key.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& c);
std::string config_hash(const ExperimentConfig& c);

// Seeds of the independent random streams of one experiment.
struct Seeds {
  std::uint64_t disorder = 0;
  std::uint64_t positions = 0;
  std::uint64_t momenta = 0;
  std::uint64_t bootstrap = 0;
};
Seeds derive_seeds(std::uint64_t seed);

struct PreparedState {
  DensityMatrix rho;
  double ground_energy = 0.0;
  double ground_fraction = 1.0;  // <psi0|rho|psi0> with psi0 the clean ground state
  int degeneracy = 1;
};

FockBasis make_basis(const ExperimentConfig& c);
// Ground or thermal state, averaged over disorder realizations when
// sigma_V > 0, then dephased.
PreparedState prepare_state(const ExperimentConfig& c);
// Single disorder realization (per-realization mode).
PreparedState prepare_realization(const ExperimentConfig& c, int realization);

struct CertificationResult {
  std::string reference;
  std::optional<double> lambda1;
  double sigma_k = 0.0;
  std::size_t positions = 0;
  std::size_t momenta = 0;
  double bound = 0.0;
  BoundTerms terms;
  double se = 0.0;
  int replicas = 0;
  int dimension = 1;
  int dimension_1sigma = 1;
  int dimension_3sigma = 1;
  std::vector<double> ladder;
  std::complex<double> g0 = 1.0;  // raw zero-mode estimate, before rescaling
  std::string solver;
  int solver_iterations = 0;
  double solver_residual = 0.0;
  std::optional<double> exact_fidelity;
  std::optional<double> exact_bound;
  nlohmann::json metadata = nlohmann::json::object();
};

nlohmann::json to_json(const CertificationResult& r);

// Shot-to-bound pipeline for one basis and envelope.
class Certifier {
 public:
  Certifier(const FockBasis& basis, const GaussianEnvelope& envelope, SolveOptions opt = {});

  const ModeSpace& modes() const { return *modes_; }
  const OverlapOperator& overlap() const { return *overlap_; }

  // Coherence sums from momentum shots.
  SolveResult coefficients(const RealMatrix& momenta) const;
  CertificationResult certify(const ShotSet& shots, const ReferenceState& ref,
                              const BootstrapPlan& plan) const;
  // Lambda family: picks lambda1 on the grid, then certifies at the optimum.
  CertificationResult certify_lambda_scan(const ShotSet& shots, const std::vector<double>& grid,
                                          const BootstrapPlan& plan) const;

 private:
  CertificationResult finish(const ShotSet& shots, const ReferenceState& ref, const BoundPlan& bp,
                             const SolveResult& sol, const BootstrapPlan& plan) const;

  GaussianEnvelope envelope_;
  SolveOptions opt_;
  std::unique_ptr<ModeSpace> modes_;
  std::unique_ptr<OverlapOperator> overlap_;
};

struct PointResult {
  double F = 0.0;
  double exact_bound = 0.0;
  CertificationResult result;
};

// Full simulate-and-certify run of one configuration.
PointResult run_point(const ExperimentConfig& c);

}  // namespace dimcert
