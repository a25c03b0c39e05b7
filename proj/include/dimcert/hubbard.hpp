// Copyright 2026 The dimcert Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "dimcert/fock.hpp"

namespace dimcert {

using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;

// Energies in units of J. `U` holds one value for two species or
// (U12, U13, U23) for three.
struct HubbardParams {
  double J = 1.0;
  std::vector<double> U{0.0};
  std::vector<double> offsets;  // per-site, empty means zero
};

struct NoiseSpec {
  double r = 0.0;
  double sigma_V = 0.0;
  std::optional<double> beta;
  std::uint64_t seed = 0;
};

class DensityMatrix {
 public:
  DensityMatrix(FockBasis basis, ComplexMatrix m);
  static DensityMatrix pure(const FockBasis& basis, const ComplexVector& psi);
  static DensityMatrix maximally_mixed(const FockBasis& basis);

  const FockBasis& basis() const { return basis_; }
  const ComplexMatrix& matrix() const { return m_; }
  std::size_t dim() const { return basis_.dim(); }

  RealVector populations() const;
  double purity() const;
  // Throws NumericalError when Hermiticity, trace or positivity fail.
  void check(double tol = 1e-10) const;

 private:
  FockBasis basis_;
  ComplexMatrix m_;
};

struct GroundState {
  double energy = 0.0;
  RealVector vector;
  int degeneracy = 1;
};

RealMatrix build_hamiltonian(const FockBasis& basis, const HubbardParams& params);
GroundState ground_state(const RealMatrix& H);
DensityMatrix thermal_state(const FockBasis& basis, const RealMatrix& H, double beta);
DensityMatrix apply_dephasing(const DensityMatrix& rho, double r);
std::vector<double> disorder_realization(int sites, double sigma_V, std::uint64_t seed);

}  // namespace dimcert
