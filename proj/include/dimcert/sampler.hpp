// Copyright 2026 The dimcert Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "dimcert/envelope.hpp"
#include "dimcert/hubbard.hpp"
#include "dimcert/modes.hpp"

namespace dimcert {

// Convex decomposition of a density matrix into pure states.
struct Mixture {
  std::vector<double> weights;
  std::vector<ComplexVector> states;
};

Mixture mixture_from_density(const DensityMatrix& rho, double cutoff = 1e-13);
DensityMatrix density_from_mixture(const FockBasis& basis, const Mixture& mix);

struct ShotSet {
  // composite basis indices, one per position shot
  std::vector<std::size_t> positions;
  // momentum shots: one row per shot, atoms in species-major order (k*d)
  RealMatrix momenta;
};

RealVector empirical_populations(const FockBasis& basis, const std::vector<std::size_t>& positions);

std::vector<std::size_t> sample_positions(const RealVector& populations, std::size_t count,
                                          std::uint64_t seed);
std::vector<std::size_t> sample_positions(const DensityMatrix& rho, std::size_t count,
                                          std::uint64_t seed);

struct MomentumSamplerOptions {
  int cutoff = -1;  // squared-shift cutoff; negative picks the envelope default
  double min_acceptance = 1e-4;
};

RealMatrix sample_momenta(const FockBasis& basis, const Mixture& mix,
                          const GaussianEnvelope& envelope, std::size_t count, std::uint64_t seed,
                          const MomentumSamplerOptions& opt = {});
RealMatrix sample_momenta(const DensityMatrix& rho, const GaussianEnvelope& envelope,
                          std::size_t count, std::uint64_t seed,
                          const MomentumSamplerOptions& opt = {});

// Antisymmetrized (fermions) or symmetrized first-quantized amplitudes on
// L^(S N) ordered positions, atom 0 most significant.
ComplexVector first_quantized(const FockBasis& basis, const ComplexVector& psi);

// Joint momentum density of all atoms. Integrates to sum rho I(shift), not
// exactly one.
class MomentumDensity {
 public:
  MomentumDensity(const DensityMatrix& rho, const ModeSpace& modes,
                  const GaussianEnvelope& envelope);
  double operator()(const double* k) const;
  // Fringe factor without the envelope.
  double fringe(const double* k) const;

 private:
  const ModeSpace* modes_;
  GaussianEnvelope env_;
  std::vector<std::size_t> support_;
  std::vector<std::complex<double>> G_;
};

// JSON-lines shot records.
void write_position_shots(std::ostream& os, const FockBasis& basis,
                          const std::vector<std::size_t>& positions);
void write_momentum_shots(std::ostream& os, const FockBasis& basis, const RealMatrix& momenta);
// Reads any mix of position and momentum records. Throws DataError with the
// line number on malformed input.
ShotSet read_shots(std::istream& is, const FockBasis& basis);

}  // namespace dimcert
