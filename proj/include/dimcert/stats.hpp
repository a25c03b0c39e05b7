// Copyright 2026 The dimcert Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "dimcert/hubbard.hpp"

namespace dimcert {

struct BootstrapPlan {
  int replicas = 10000;
  std::uint64_t seed = 0;
};

// Resampled index lists for the position and momentum shot sets.
using Statistic = std::function<double(const std::vector<std::size_t>&, const std::vector<std::size_t>&)>;

// Standard deviation of `stat` over replicas that resample both shot sets
// with replacement, independently.
double bootstrap_se(std::size_t n_positions, std::size_t n_momenta, const Statistic& stat,
                    const BootstrapPlan& plan);

// Faster form for statistics of the shape
//   f(p) + mean_j s_j
// with p the empirical populations of the position shots.
double bootstrap_se(const std::vector<std::size_t>& positions, std::size_t dim,
                    const std::function<double(const RealVector&)>& f, const RealVector& scalars,
                    const BootstrapPlan& plan);
// Ratio form f(p) + sum_j s_j / sum_j z_j.
double bootstrap_se(const std::vector<std::size_t>& positions, std::size_t dim,
                    const std::function<double(const RealVector&)>& f, const RealVector& scalars,
                    const RealVector& norms, const BootstrapPlan& plan);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  double intercept_se = 0.0;
};

LinearFit fit_linear(const std::vector<double>& xs, const std::vector<double>& ys);

struct PowerLawFit {
  double exponent = 0.0;
  double prefactor = 0.0;
  double exponent_se = 0.0;
};

// y = prefactor * x^exponent, fitted on log-log axes.
PowerLawFit fit_powerlaw(const std::vector<double>& xs, const std::vector<double>& ys);

double mean(const std::vector<double>& v);
double stddev(const std::vector<double>& v);

enum class DisorderMode { Mixture, PerRealization };

std::string to_string(DisorderMode m);
DisorderMode disorder_mode_from_string(const std::string& s);

struct DisorderSummary {
  double F = 0.0;
  double bound = 0.0;
  double F_spread = 0.0;
  double bound_spread = 0.0;
  int realizations = 0;
  DisorderMode mode = DisorderMode::Mixture;
};

struct PointEstimate {
  double F = 0.0;
  double bound = 0.0;
};

// Per-realization mode: runs `point` for each realization index in parallel
// and averages.
DisorderSummary disorder_average(int realizations, const std::function<PointEstimate(int)>& point);

struct SweepPoint {
  double x = 0.0;
  double F = 0.0;
  double bound = 0.0;
  double se = 0.0;
  int dim_1sigma = 1;
  int dim_3sigma = 1;
};

struct SweepResult {
  std::string axis;
  std::string unit;
  std::vector<SweepPoint> points;
  std::string metadata;  // free-form, written as a comment line
};

// Throws ConfigError when the axis is not strictly monotone.
void validate(const SweepResult& r);
void write_csv(std::ostream& os, const SweepResult& r);

}  // namespace dimcert
