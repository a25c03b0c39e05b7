// Copyright 2026 The dimcert Authors
// SPDX-License-Identifier: Apache-2.0

#include "dimcert/hubbard.hpp"

#include <Eigen/Eigenvalues>
#include <bit>
#include <cmath>
#include <random>
#include <string>

#include "dimcert/errors.hpp"

namespace dimcert {

DensityMatrix::DensityMatrix(FockBasis basis, ComplexMatrix m) : basis_(std::move(basis)), m_(std::move(m)) {
  if (m_.rows() != static_cast<Eigen::Index>(basis_.dim()) || m_.cols() != m_.rows())
    throw ConfigError("density matrix size does not match basis");
}

DensityMatrix DensityMatrix::pure(const FockBasis& basis, const ComplexVector& psi) {
  if (psi.size() != static_cast<Eigen::Index>(basis.dim())) throw ConfigError("state size does not match basis");
  double n = psi.norm();
  if (std::abs(n - 1.0) > 1e-9) throw ConfigError("state is not normalized");
  return DensityMatrix(basis, psi * psi.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(const FockBasis& basis) {
  const auto d = static_cast<Eigen::Index>(basis.dim());
  return DensityMatrix(basis, ComplexMatrix::Identity(d, d) / static_cast<double>(d));
}

RealVector DensityMatrix::populations() const { return m_.diagonal().real(); }

double DensityMatrix::purity() const { return (m_ * m_).trace().real(); }

void DensityMatrix::check(double tol) const {
  if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > tol) throw NumericalError("density matrix is not Hermitian");
  if (std::abs(m_.trace() - std::complex<double>(1.0, 0.0)) > tol) throw NumericalError("density matrix trace is not 1");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol) throw NumericalError("density matrix has a negative eigenvalue");
}

RealMatrix build_hamiltonian(const FockBasis& basis, const HubbardParams& params) {
  const int L = basis.sites();
  const int S = basis.species();
  if (params.J <= 0) throw ConfigError("tunneling J must be positive");
  const std::size_t nU = S == 2 ? 1 : 3;
  if (params.U.size() != nU)
    throw ConfigError(S == 2 ? "two species need one interaction U" : "three species need (U12, U13, U23)");
  if (!params.offsets.empty() && static_cast<int>(params.offsets.size()) != L)
    throw ConfigError("site offsets must have one entry per site");

  const auto D = static_cast<Eigen::Index>(basis.dim());
  RealMatrix H = RealMatrix::Zero(D, D);
  for (std::size_t k = 0; k < basis.dim(); ++k) {
    const auto loc = basis.decompose(k);
    double e = 0.0;
    int pair = 0;
    for (int a = 0; a < S; ++a) {
      for (int b = a + 1; b < S; ++b, ++pair) {
        const auto overlap = std::popcount(basis.local_mask(loc[a]) & basis.local_mask(loc[b]));
        e += params.U[static_cast<std::size_t>(pair)] * overlap;
      }
    }
    if (!params.offsets.empty()) {
      for (int s = 0; s < S; ++s)
        for (int site : basis.local_state(loc[s])) e += params.offsets[static_cast<std::size_t>(site)];
    }
    H(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = e;
    for (int s = 0; s < S; ++s) {
      for (int i = 0; i + 1 < L; ++i) {
        for (int dir = 0; dir < 2; ++dir) {
          const int from = dir == 0 ? i : i + 1;
          const int to = dir == 0 ? i + 1 : i;
          const HopResult h = basis.hop(s, from, to, k);
          if (h.sign == 0) continue;
          H(static_cast<Eigen::Index>(h.target), static_cast<Eigen::Index>(k)) += -params.J * h.sign;
        }
      }
    }
  }
  return H;
}

GroundState ground_state(const RealMatrix& H) {
  if (H.rows() != H.cols()) throw ConfigError("Hamiltonian is not square");
  if ((H - H.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw ConfigError("Hamiltonian is not Hermitian");
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(H);
  GroundState gs;
  gs.energy = es.eigenvalues()(0);
  gs.vector = es.eigenvectors().col(0);
  Eigen::Index imax = 0;
  gs.vector.cwiseAbs().maxCoeff(&imax);
  if (gs.vector(imax) < 0) gs.vector = -gs.vector;
  const double scale = std::max(1.0, std::abs(gs.energy));
  gs.degeneracy = 1;
  for (Eigen::Index i = 1; i < es.eigenvalues().size(); ++i) {
    if (es.eigenvalues()(i) - gs.energy < 1e-10 * scale) ++gs.degeneracy;
  }
  return gs;
}

DensityMatrix thermal_state(const FockBasis& basis, const RealMatrix& H, double beta) {
  if (!(beta > 0)) throw ConfigError("inverse temperature must be positive");
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(H);
  const RealVector& w = es.eigenvalues();
  RealVector p = (-(w.array() - w(0)) * beta).exp();
  p /= p.sum();
  const RealMatrix& V = es.eigenvectors();
  RealMatrix rho = V * p.asDiagonal() * V.transpose();
  return DensityMatrix(basis, rho.cast<std::complex<double>>());
}

DensityMatrix apply_dephasing(const DensityMatrix& rho, double r) {
  if (!(r >= 0.0 && r <= 1.0)) throw ConfigError("mixing parameter r must lie in [0, 1]");
  const auto d = static_cast<Eigen::Index>(rho.dim());
  ComplexMatrix m = (1.0 - r) * rho.matrix() + ComplexMatrix::Identity(d, d) * (r / static_cast<double>(d));
  return DensityMatrix(rho.basis(), std::move(m));
}

std::vector<double> disorder_realization(int sites, double sigma_V, std::uint64_t seed) {
  if (!(sigma_V >= 0.0)) throw ConfigError("disorder strength must be non-negative");
  std::vector<double> out(static_cast<std::size_t>(sites), 0.0);
  if (sigma_V == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, sigma_V);
  for (auto& v : out) v = nd(rng);
  return out;
}

}  // namespace dimcert
