// Copyright 2026 The dimcert Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dimcert/fock.hpp"
#include "dimcert/hubbard.hpp"

namespace dimcert {

enum class ReferenceKind { AttractiveMES, GHZ, RepulsiveMES, NondimerUniform, LambdaFamily };

std::string to_string(ReferenceKind k);
ReferenceKind reference_kind_from_string(const std::string& s);

struct LambdaWeights {
  double nd_nd = 0.0;
  double d_d = 0.0;
  double d_nd = 0.0;
};

// Closed forms of the three coherence weights of the lambda family.
LambdaWeights lambda_weights(int L, double lambda);

struct Fraction {
  long num = 0;
  long den = 1;
  friend bool operator==(const Fraction&, const Fraction&) = default;
};

class ThresholdLadder {
 public:
  ThresholdLadder() = default;
  explicit ThresholdLadder(const std::vector<double>& spectrum);
  static ThresholdLadder flat(int D);

  int size() const { return static_cast<int>(values_.size()); }
  // B_k for k in [0, size()]; B_0 = 0.
  double B(int k) const;
  const std::vector<double>& values() const { return values_; }
  std::optional<Fraction> rational(int k) const;

 private:
  std::vector<double> values_;
  int flat_den_ = 0;
};

struct ReferenceState {
  ReferenceKind kind = ReferenceKind::AttractiveMES;
  FockBasis basis;
  RealVector amplitudes;
  std::vector<double> schmidt;       // descending
  std::vector<std::size_t> support;  // composite indices with nonzero amplitude
  bool uniform = true;               // equal amplitudes on the support
  std::optional<double> lambda1;
  LambdaWeights weights;             // lambda family only
  ThresholdLadder ladder;

  double coherence_weight() const { return 1.0 / static_cast<double>(support.size()); }
};

ReferenceState make_reference(ReferenceKind kind, const FockBasis& basis,
                              std::optional<double> lambda1 = std::nullopt);

// Bipartition: species 0 against the remaining species.
std::vector<double> schmidt_decompose(const FockBasis& basis, const ComplexVector& psi);

double exact_fidelity(const DensityMatrix& rho, const ReferenceState& ref);

int certified_dimension(double F, const ThresholdLadder& ladder);

struct LambdaOptimum {
  double lambda1 = 0.0;
  int dimension = 1;
  double bound = 0.0;
  double margin = 0.0;
};

// Uniform grid of `points` values on [1/sqrt(L), 1].
std::vector<double> lambda_grid(int L, int points);

// Scans the grid; bound(lambda) returns the lower bound for the family
// member. Ties in dimension go to the largest margin above B_{D-1}.
LambdaOptimum optimize_lambda(const std::vector<double>& grid, int L,
                              const std::function<double(double)>& bound);

}  // namespace dimcert
