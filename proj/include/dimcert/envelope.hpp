// Copyright 2026 The dimcert Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace dimcert {

// Harmonic approximation of the lowest band at V0 = 8 E_r:
// sigma_k d = pi (V0/E_r)^(1/4) / sqrt(2).
inline constexpr double kDefaultSigmaK = 3.7360;

// Gaussian |w(k)|^2 with standard deviation sigma (units of 1/d),
// normalized as a probability density.
class GaussianEnvelope {
 public:
  explicit GaussianEnvelope(double sigma = kDefaultSigmaK);

  double sigma() const { return sigma_; }
  double density(double kd) const;
  // Integral of |w|^2 cos(gamma k) over k.
  double overlap(int gamma) const;
  // Smallest integer cutoff whose neglected Gaussian factor is below 1e-8.
  int default_cutoff() const;

 private:
  double sigma_;
};

}  // namespace dimcert
