// Copyright 2026 The dimcert Authors
// SPDX-License-Identifier: Apache-2.0

#include "dimcert/envelope.hpp"

#include <cmath>
#include <numbers>

#include "dimcert/errors.hpp"

namespace dimcert {

GaussianEnvelope::GaussianEnvelope(double sigma) : sigma_(sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ConfigError("envelope width must be positive");
}

double GaussianEnvelope::density(double kd) const {
  const double z = kd / sigma_;
  return std::exp(-0.5 * z * z) / (sigma_ * std::sqrt(2.0 * std::numbers::pi));
}

double GaussianEnvelope::overlap(int gamma) const {
  const double x = gamma * sigma_;
  return std::exp(-0.5 * x * x);
}

int GaussianEnvelope::default_cutoff() const {
  return static_cast<int>(std::ceil(2.0 * std::log(1e8) / (sigma_ * sigma_)));
}

}  // namespace dimcert
