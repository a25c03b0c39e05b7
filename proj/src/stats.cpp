// Copyright 2026 The dimcert Authors
// SPDX-License-Identifier: Apache-2.0

#include "dimcert/stats.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numeric>
#include <ostream>

#include "dimcert/errors.hpp"
#include "dimcert/parallel.hpp"

namespace dimcert {
namespace {

constexpr std::uint64_t kSaltBootstrap = 21;

void check_plan(const BootstrapPlan& plan) {
  if (plan.replicas < 2) throw ConfigError("bootstrap needs at least two replicas");
}

}  // namespace

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

double bootstrap_se(std::size_t n_positions, std::size_t n_momenta, const Statistic& stat,
                    const BootstrapPlan& plan) {
  check_plan(plan);
  if (n_positions == 0 && n_momenta == 0) throw DataError("bootstrap needs shots");
  std::vector<double> reps(static_cast<std::size_t>(plan.replicas));
  parallel_for(reps.size(), [&](std::size_t r) {
    auto rng = stream_rng(plan.seed, r, kSaltBootstrap);
    std::vector<std::size_t> ip(n_positions), im(n_momenta);
    if (n_positions) {
      std::uniform_int_distribution<std::size_t> u(0, n_positions - 1);
      for (auto& i : ip) i = u(rng);
    }
    if (n_momenta) {
      std::uniform_int_distribution<std::size_t> u(0, n_momenta - 1);
      for (auto& i : im) i = u(rng);
    }
    reps[r] = stat(ip, im);
  });
  return stddev(reps);
}

double bootstrap_se(const std::vector<std::size_t>& positions, std::size_t dim,
                    const std::function<double(const RealVector&)>& f, const RealVector& scalars,
                    const BootstrapPlan& plan) {
  return bootstrap_se(positions, dim, f, scalars, RealVector(), plan);
}

double bootstrap_se(const std::vector<std::size_t>& positions, std::size_t dim,
                    const std::function<double(const RealVector&)>& f, const RealVector& scalars,
                    const RealVector& norms, const BootstrapPlan& plan) {
  check_plan(plan);
  if (positions.empty() || scalars.size() == 0) throw DataError("bootstrap needs shots");
  if (norms.size() != 0 && norms.size() != scalars.size())
    throw ConfigError("normalization scalars do not match the momentum shots");
  const std::size_t np = positions.size();
  const auto nm = static_cast<std::size_t>(scalars.size());
  const bool ratio = norms.size() != 0;
  std::vector<double> reps(static_cast<std::size_t>(plan.replicas));
  parallel_for(reps.size(), [&](std::size_t r) {
    auto rng = stream_rng(plan.seed, r, kSaltBootstrap);
    RealVector p = RealVector::Zero(static_cast<Eigen::Index>(dim));
    std::uniform_int_distribution<std::size_t> up(0, np - 1), um(0, nm - 1);
    for (std::size_t j = 0; j < np; ++j) p[static_cast<Eigen::Index>(positions[up(rng)])] += 1.0;
    p /= static_cast<double>(np);
    double s = 0.0, z = 0.0;
    for (std::size_t j = 0; j < nm; ++j) {
      const auto i = static_cast<Eigen::Index>(um(rng));
      s += scalars[i];
      if (ratio) z += norms[i];
    }
    reps[r] = f(p) + (ratio ? s / z : s / static_cast<double>(nm));
  });
  return stddev(reps);
}

LinearFit fit_linear(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw ConfigError("fit inputs differ in length");
  if (xs.size() < 3) throw ConfigError("fit needs at least three points");
  const double n = static_cast<double>(xs.size());
  const double mx = mean(xs), my = mean(ys);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw ConfigError("fit abscissae are degenerate");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - f.intercept - f.slope * xs[i];
    rss += e * e;
  }
  const double s2 = rss / (n - 2.0);
  f.slope_se = std::sqrt(s2 / sxx);
  f.intercept_se = std::sqrt(s2 * (1.0 / n + mx * mx / sxx));
  return f;
}

PowerLawFit fit_powerlaw(const std::vector<double>& xs, const std::vector<double>& ys) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < xs.size() && i < ys.size(); ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) throw ConfigError("power-law fit needs positive data");
    lx.push_back(std::log(xs[i]));
    ly.push_back(std::log(ys[i]));
  }
  const auto lf = fit_linear(lx, ly);
  return {lf.slope, std::exp(lf.intercept), lf.slope_se};
}

std::string to_string(DisorderMode m) {
  return m == DisorderMode::Mixture ? "mixture" : "per_realization";
}

DisorderMode disorder_mode_from_string(const std::string& s) {
  if (s == "mixture") return DisorderMode::Mixture;
  if (s == "per_realization") return DisorderMode::PerRealization;
  throw ConfigError("unknown disorder mode '" + s + "'");
}

DisorderSummary disorder_average(int realizations, const std::function<PointEstimate(int)>& point) {
  if (realizations < 1) throw ConfigError("need at least one disorder realization");
  std::vector<double> F(static_cast<std::size_t>(realizations)), B(F.size());
  parallel_for(F.size(), [&](std::size_t i) {
    const auto e = point(static_cast<int>(i));
    F[i] = e.F;
    B[i] = e.bound;
  });
  DisorderSummary s;
  s.F = mean(F);
  s.bound = mean(B);
  s.F_spread = stddev(F);
  s.bound_spread = stddev(B);
  s.realizations = realizations;
  s.mode = DisorderMode::PerRealization;
  return s;
}

void validate(const SweepResult& r) {
  const auto& p = r.points;
  if (p.empty()) return;
  const bool up = p.size() < 2 || p[1].x > p[0].x;
  for (std::size_t i = 1; i < p.size(); ++i)
    if (up ? !(p[i].x > p[i - 1].x) : !(p[i].x < p[i - 1].x))
      throw ConfigError("sweep axis '" + r.axis + "' is not strictly monotone");
}

void write_csv(std::ostream& os, const SweepResult& r) {
  validate(r);
  os << "# units: " << r.axis << " in " << r.unit
     << "; F, F_bound and F_bound_se are dimensionless fidelities; dimensions are counts\n";
  if (!r.metadata.empty()) os << "# " << r.metadata << "\n";
  os << r.axis << "[" << r.unit << "],F[1],F_bound[1],F_bound_se[1],D_1sigma[count],D_3sigma[count]\n";
  for (const auto& p : r.points)
    os << fmt::format("{},{},{},{},{},{}\n", p.x, p.F, p.bound, p.se, p.dim_1sigma, p.dim_3sigma);
}

}  // namespace dimcert
