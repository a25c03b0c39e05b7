// Copyright 2026 The dimcert Authors
// SPDX-License-Identifier: Apache-2.0

#include "dimcert/reference.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "dimcert/errors.hpp"

namespace dimcert {

std::string to_string(ReferenceKind k) {
  switch (k) {
    case ReferenceKind::AttractiveMES:
      return "attractive_mes";
    case ReferenceKind::GHZ:
      return "ghz";
    case ReferenceKind::RepulsiveMES:
      return "repulsive_mes";
    case ReferenceKind::NondimerUniform:
      return "nondimer_uniform";
    case ReferenceKind::LambdaFamily:
      return "lambda_family";
  }
  return "unknown";
}

ReferenceKind reference_kind_from_string(const std::string& s) {
  if (s == "attractive_mes" || s == "mes") return ReferenceKind::AttractiveMES;
  if (s == "ghz") return ReferenceKind::GHZ;
  if (s == "repulsive_mes") return ReferenceKind::RepulsiveMES;
  if (s == "nondimer_uniform" || s == "nondimer") return ReferenceKind::NondimerUniform;
  if (s == "lambda_family" || s == "lambda") return ReferenceKind::LambdaFamily;
  throw ConfigError("unknown reference kind '" + s + "'");
}

LambdaWeights lambda_weights(int L, double lambda) {
  const double s = std::sqrt(std::max(0.0, 1.0 - lambda * lambda));
  const double l2 = static_cast<double>(L) * L;
  const double r = std::sqrt(static_cast<double>(L - 1));
  LambdaWeights w;
  w.nd_nd = (1.0 + lambda * lambda * (L - 2)) / (l2 * (L - 1)) + 2.0 * lambda * s / (l2 * r);
  w.d_nd = (2.0 * lambda * lambda - 1.0) / l2 - (L - 2) * lambda * s / (l2 * r);
  w.d_d = (L - 1 - lambda * lambda * (L - 2) - 2.0 * lambda * s * r) / l2;
  return w;
}

ThresholdLadder::ThresholdLadder(const std::vector<double>& spectrum) {
  double acc = 0.0;
  for (double l : spectrum) {
    acc += l * l;
    values_.push_back(acc);
  }
  if (!values_.empty()) values_.back() = 1.0;
}

ThresholdLadder ThresholdLadder::flat(int D) {
  ThresholdLadder t;
  for (int k = 1; k <= D; ++k) t.values_.push_back(static_cast<double>(k) / static_cast<double>(D));
  t.flat_den_ = D;
  return t;
}

double ThresholdLadder::B(int k) const {
  if (k <= 0) return 0.0;
  if (k > size()) return 1.0;
  return values_[static_cast<std::size_t>(k - 1)];
}

std::optional<Fraction> ThresholdLadder::rational(int k) const {
  if (flat_den_ == 0 || k < 0 || k > size()) return std::nullopt;
  return Fraction{k, flat_den_};
}

std::vector<double> schmidt_decompose(const FockBasis& basis, const ComplexVector& psi) {
  if (psi.size() != static_cast<Eigen::Index>(basis.dim())) throw ConfigError("state size does not match basis");
  if (std::abs(psi.norm() - 1.0) > 1e-9) throw ConfigError("state is not normalized");
  const auto rows = static_cast<Eigen::Index>(basis.local_dim());
  const auto cols = static_cast<Eigen::Index>(basis.dim() / basis.local_dim());
  ComplexMatrix C(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) C(i, j) = psi(i * cols + j);
  Eigen::JacobiSVD<ComplexMatrix> svd(C);
  std::vector<double> out;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    double v = svd.singularValues()(i);
    if (v > 1e-12) out.push_back(v);
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

namespace {

std::vector<int> complement(const std::vector<int>& s, int L) {
  std::vector<int> out;
  for (int i = 0; i < L; ++i)
    if (std::find(s.begin(), s.end(), i) == s.end()) out.push_back(i);
  return out;
}

}  // namespace

ReferenceState make_reference(ReferenceKind kind, const FockBasis& basis, std::optional<double> lambda1) {
  const int L = basis.sites();
  const int N = basis.atoms();
  const int S = basis.species();
  ReferenceState ref{kind, basis, RealVector::Zero(static_cast<Eigen::Index>(basis.dim())), {}, {}, true, {}, {}, {}};
  if (kind != ReferenceKind::LambdaFamily && lambda1)
    throw ConfigError("lambda1 only applies to the lambda family");

  switch (kind) {
    case ReferenceKind::AttractiveMES:
      if (S != 2) throw ConfigError("attractive MES needs two species");
      for (std::size_t a = 0; a < basis.local_dim(); ++a) ref.support.push_back(basis.compose({a, a}));
      break;
    case ReferenceKind::GHZ:
      if (S != 3) throw ConfigError("GHZ reference needs three species");
      for (std::size_t a = 0; a < basis.local_dim(); ++a) ref.support.push_back(basis.compose({a, a, a}));
      break;
    case ReferenceKind::RepulsiveMES:
      if (S != 2) throw ConfigError("repulsive MES needs two species");
      if (2 * N != L) throw ConfigError("repulsive MES needs half filling (N = L/2)");
      for (std::size_t a = 0; a < basis.local_dim(); ++a)
        ref.support.push_back(basis.compose({a, basis.local_index(complement(basis.local_state(a), L))}));
      break;
    case ReferenceKind::NondimerUniform:
      if (S != 2) throw ConfigError("nondimer reference needs two species");
      if (2 * N > L) throw ConfigError("nondimer reference needs 2N <= L");
      for (std::size_t a = 0; a < basis.local_dim(); ++a)
        for (std::size_t b = 0; b < basis.local_dim(); ++b)
          if ((basis.local_mask(a) & basis.local_mask(b)) == 0) ref.support.push_back(basis.compose({a, b}));
      break;
    case ReferenceKind::LambdaFamily: {
      if (S != 2 || N != 1) throw ConfigError("lambda family is defined for two atoms");
      if (!lambda1) throw ConfigError("lambda family needs lambda1");
      const double lam = *lambda1;
      const double lo = 1.0 / std::sqrt(static_cast<double>(L));
      if (!(lam >= lo - 1e-12 && lam <= 1.0 + 1e-12)) throw ConfigError("lambda1 must lie in [1/sqrt(L), 1]");
      const double s = std::sqrt(std::max(0.0, 1.0 - lam * lam));
      const double r = std::sqrt(static_cast<double>(L - 1));
      const double x = lam / L + s / r - s * r / L;
      const double y = lam / L - s * r / L;
      for (std::size_t a = 0; a < basis.local_dim(); ++a)
        for (std::size_t b = 0; b < basis.local_dim(); ++b) {
          const std::size_t k = basis.compose({a, b});
          ref.amplitudes(static_cast<Eigen::Index>(k)) = a == b ? y : x;
          ref.support.push_back(k);
        }
      ref.uniform = false;
      ref.lambda1 = lam;
      ref.weights = lambda_weights(L, lam);
      break;
    }
  }
  if (kind != ReferenceKind::LambdaFamily) {
    const double amp = 1.0 / std::sqrt(static_cast<double>(ref.support.size()));
    for (std::size_t k : ref.support) ref.amplitudes(static_cast<Eigen::Index>(k)) = amp;
  }
  ref.schmidt = schmidt_decompose(basis, ref.amplitudes.cast<std::complex<double>>());
  const bool flat = kind == ReferenceKind::AttractiveMES || kind == ReferenceKind::GHZ ||
                    kind == ReferenceKind::RepulsiveMES;
  ref.ladder = flat ? ThresholdLadder::flat(static_cast<int>(basis.local_dim())) : ThresholdLadder(ref.schmidt);
  return ref;
}

double exact_fidelity(const DensityMatrix& rho, const ReferenceState& ref) {
  if (rho.dim() != ref.basis.dim()) throw ConfigError("state and reference bases differ");
  const ComplexVector a = ref.amplitudes.cast<std::complex<double>>();
  return (a.adjoint() * rho.matrix() * a)(0, 0).real();
}

int certified_dimension(double F, const ThresholdLadder& ladder) {
  for (int k = ladder.size(); k >= 1; --k)
    if (F > ladder.B(k - 1)) return k;
  return 1;
}

std::vector<double> lambda_grid(int L, int points) {
  if (points < 1) throw ConfigError("lambda grid needs at least one point");
  const double lo = 1.0 / std::sqrt(static_cast<double>(L));
  std::vector<double> g;
  if (points == 1) return {lo};
  for (int i = 0; i < points; ++i) g.push_back(lo + (1.0 - lo) * i / (points - 1));
  return g;
}

LambdaOptimum optimize_lambda(const std::vector<double>& grid, int L, const std::function<double(double)>& bound) {
  if (grid.empty()) throw ConfigError("empty lambda grid");
  LambdaOptimum best;
  bool have = false;
  for (double lam : grid) {
    const double lo = 1.0 / std::sqrt(static_cast<double>(L));
    const double s2 = (1.0 - lam * lam) / (L - 1);
    std::vector<double> spec{lam};
    for (int i = 1; i < L; ++i) spec.push_back(std::sqrt(std::max(0.0, s2)));
    if (lam < lo) std::sort(spec.begin(), spec.end(), std::greater<>());
    const ThresholdLadder ladder(spec);
    const double F = bound(lam);
    const int D = certified_dimension(F, ladder);
    const double margin = F - ladder.B(D - 1);
    if (!have || D > best.dimension || (D == best.dimension && margin > best.margin)) {
      best = {lam, D, F, margin};
      have = true;
    }
  }
  return best;
}

}  // namespace dimcert
