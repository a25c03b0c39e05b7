// Copyright 2026 The dimcert Authors
// SPDX-License-Identifier: Apache-2.0

#include "dimcert/sampler.hpp"

#include <fmt/format.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "dimcert/errors.hpp"
#include "dimcert/parallel.hpp"
#include "json.hpp"

namespace dimcert {
namespace {

constexpr std::uint64_t kSaltComponent = 11;
constexpr std::uint64_t kSaltMomentum = 12;
constexpr std::uint64_t kSaltPosition = 13;

using cplx = std::complex<double>;
using CMap = Eigen::Map<ComplexMatrix>;
using CCMap = Eigen::Map<const ComplexMatrix>;

std::size_t ipow(std::size_t b, int e) {
  std::size_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

int parity(const std::vector<int>& order) {
  int s = 1;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (std::size_t j = i + 1; j < order.size(); ++j)
      if (order[i] > order[j]) s = -s;
  return s;
}

std::size_t pick(const std::vector<double>& cumulative, double u) {
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u * cumulative.back());
  return std::min(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
}

// Precomputed tensors for one pure component.
class AncestralSampler {
 public:
  AncestralSampler(const FockBasis& basis, const ComplexVector& psi, const GaussianEnvelope& env,
                   int cutoff, double min_acceptance)
      : L_(basis.sites()), n_(basis.total_atoms()), env_(env), min_acc_(min_acceptance) {
    for (int g = 0; g < L_; ++g) I_.push_back(g * g <= cutoff ? env.overlap(g) : 0.0);
    ComplexMatrix Ib(L_, L_);
    for (int a = 0; a < L_; ++a)
      for (int b = 0; b < L_; ++b) Ib(a, b) = I_[static_cast<std::size_t>(std::abs(a - b))];
    T_.resize(static_cast<std::size_t>(n_));
    T_[n_ - 1] = first_quantized(basis, psi);
    for (int i = n_ - 2; i >= 0; --i) {
      T_[i] = T_[i + 1];
      apply_axis(T_[i], i + 1, Ib);
    }
    A0_ = fringe_weights(T_[n_ - 1], T_[0], 0);
    const auto R = static_cast<Eigen::Index>(ipow(L_, n_ - 1));
    stack_.resize((n_ - 1) * R, L_);
    for (int j = 1; j < n_; ++j) stack_.middleRows((j - 1) * R, R) = CCMap(T_[j].data(), R, L_);
    T_.clear();
  }

  // Draws a batch of shots; rows of `k` receive the momenta. The first
  // momentum of every shot is drawn before the leading axis is summed for the
  // whole batch at once.
  void draw_batch(std::vector<std::mt19937_64>& rngs, double* k, std::size_t stride) const {
    const auto B = static_cast<Eigen::Index>(rngs.size());
    const auto R = static_cast<Eigen::Index>(ipow(L_, n_ - 1));
    ComplexMatrix ph(L_, B);
    for (Eigen::Index b = 0; b < B; ++b) {
      double* kb = k + b * stride;
      kb[0] = sample_axis(rngs[static_cast<std::size_t>(b)], A0_, 0);
      for (int x = 0; x < L_; ++x) ph(x, b) = std::polar(1.0, -kb[0] * x);
    }
    const ComplexMatrix first = stack_ * ph;  // (n-1) R x B, block j holds T_{j+1}
    for (Eigen::Index b = 0; b < B; ++b) {
      double* kb = k + b * stride;
      auto& rng = rngs[static_cast<std::size_t>(b)];
      ComplexVector chi = first.col(b).segment((n_ - 2) * R, R);
      for (int i = 1; i < n_; ++i) {
        ComplexVector eta = first.col(b).segment((i - 1) * R, R);
        for (int j = 1; j < i; ++j) eta = contract(eta, kb[j]);
        kb[i] = sample_axis(rng, fringe_weights(chi, eta, i), i);
        if (i + 1 < n_) chi = contract(chi, kb[i]);
      }
    }
  }

 private:
  double sample_axis(std::mt19937_64& rng, const std::vector<cplx>& A, int i) const {
    double bound = A[0].real();
    double mean = A[0].real();
    for (int g = 1; g < L_; ++g) {
      bound += 2.0 * std::abs(A[g]);
      mean += 2.0 * A[g].real() * env_.overlap(g);
    }
    if (!(bound > 0.0) || mean / bound < min_acc_) {
      std::ostringstream os;
      os << "momentum sampler stalled at atom " << i << ": expected acceptance "
         << (bound > 0 ? mean / bound : 0.0) << ", A0 = " << A[0].real() << ", bound = " << bound;
      throw NumericalError(os.str());
    }
    std::normal_distribution<double> prop(0.0, env_.sigma());
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    while (true) {
      const double kk = prop(rng);
      double h = A[0].real();
      for (int g = 1; g < L_; ++g) h += 2.0 * (A[g] * std::polar(1.0, -g * kk)).real();
      if (unif(rng) * bound <= h) return kk;
    }
  }

  // A_g = sum_{a - a' = g} sum_rest chi(a, rest) conj(eta(a', rest)), g >= 0
  std::vector<cplx> fringe_weights(const ComplexVector& chi, const ComplexVector& eta, int i) const {
    const auto R = static_cast<Eigen::Index>(ipow(L_, n_ - i - 1));
    CCMap c(chi.data(), R, L_), e(eta.data(), R, L_);
    const ComplexMatrix M = c.transpose() * e.conjugate();
    std::vector<cplx> A(static_cast<std::size_t>(L_), 0.0);
    for (int a = 0; a < L_; ++a)
      for (int b = 0; b <= a; ++b) A[a - b] += M(a, b);
    return A;
  }

  // Sums the leading axis against exp(-i k x).
  ComplexVector contract(const ComplexVector& v, double k) const {
    const auto R = v.size() / L_;
    ComplexVector ph(L_);
    for (int x = 0; x < L_; ++x) ph[x] = std::polar(1.0, -k * x);
    return CCMap(v.data(), R, L_) * ph;
  }

  void apply_axis(ComplexVector& v, int axis, const ComplexMatrix& M) const {
    const auto inner = static_cast<Eigen::Index>(ipow(L_, n_ - 1 - axis));
    const auto outer = static_cast<Eigen::Index>(ipow(L_, axis));
    for (Eigen::Index o = 0; o < outer; ++o) {
      CMap blk(v.data() + o * inner * L_, inner, L_);
      blk = blk * M;
    }
  }

  int L_;
  int n_;
  GaussianEnvelope env_;
  double min_acc_;
  std::vector<double> I_;
  std::vector<ComplexVector> T_;
  ComplexMatrix stack_;
  std::vector<cplx> A0_;
};

}  // namespace

Mixture mixture_from_density(const DensityMatrix& rho, double cutoff) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho.matrix());
  Mixture mix;
  double total = 0.0;
  for (Eigen::Index i = es.eigenvalues().size() - 1; i >= 0; --i) {
    const double w = es.eigenvalues()[i];
    if (w <= cutoff) continue;
    mix.weights.push_back(w);
    mix.states.push_back(es.eigenvectors().col(i));
    total += w;
  }
  if (mix.weights.empty()) throw NumericalError("density matrix has no positive weight");
  for (double& w : mix.weights) w /= total;
  return mix;
}

DensityMatrix density_from_mixture(const FockBasis& basis, const Mixture& mix) {
  if (mix.weights.size() != mix.states.size() || mix.weights.empty())
    throw ConfigError("malformed mixture");
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(basis.dim()),
                                        static_cast<Eigen::Index>(basis.dim()));
  double total = 0.0;
  for (std::size_t c = 0; c < mix.states.size(); ++c) {
    if (mix.weights[c] < 0.0) throw ConfigError("negative mixture weight");
    m += mix.weights[c] * mix.states[c] * mix.states[c].adjoint();
    total += mix.weights[c];
  }
  return DensityMatrix(basis, m / total);
}

RealVector empirical_populations(const FockBasis& basis, const std::vector<std::size_t>& positions) {
  if (positions.empty()) throw DataError("no position shots");
  RealVector p = RealVector::Zero(static_cast<Eigen::Index>(basis.dim()));
  for (std::size_t x : positions) {
    if (x >= basis.dim()) throw DataError("position shot outside the basis");
    p[static_cast<Eigen::Index>(x)] += 1.0;
  }
  return p / static_cast<double>(positions.size());
}

std::vector<std::size_t> sample_positions(const RealVector& populations, std::size_t count,
                                          std::uint64_t seed) {
  std::vector<double> cum(static_cast<std::size_t>(populations.size()));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < populations.size(); ++i) {
    acc += std::max(0.0, populations[i]);
    cum[static_cast<std::size_t>(i)] = acc;
  }
  if (!(acc > 0.0)) throw NumericalError("populations sum to zero");
  std::vector<std::size_t> out(count);
  for (std::size_t s = 0; s < count; ++s) {
    auto rng = stream_rng(seed, s, kSaltPosition);
    out[s] = pick(cum, std::uniform_real_distribution<double>(0.0, 1.0)(rng));
  }
  return out;
}

std::vector<std::size_t> sample_positions(const DensityMatrix& rho, std::size_t count,
                                          std::uint64_t seed) {
  return sample_positions(rho.populations(), count, seed);
}

ComplexVector first_quantized(const FockBasis& basis, const ComplexVector& psi) {
  const int L = basis.sites();
  const int S = basis.species();
  const int N = basis.atoms();
  const bool fermion = basis.statistics() == Statistics::Fermion;
  // per local state: list of (ordered tuple offset, sign)
  std::vector<std::vector<std::pair<std::size_t, int>>> orders(basis.local_dim());
  double nfact = 1.0;
  for (int i = 2; i <= N; ++i) nfact *= i;
  for (std::size_t l = 0; l < basis.local_dim(); ++l) {
    const auto& sites = basis.local_state(l);
    std::vector<int> ord(N);
    std::iota(ord.begin(), ord.end(), 0);
    do {
      std::size_t off = 0;
      for (int n = 0; n < N; ++n) off = off * L + sites[ord[n]];
      orders[l].emplace_back(off, fermion ? parity(ord) : 1);
    } while (std::next_permutation(ord.begin(), ord.end()));
  }
  const std::size_t block = ipow(L, N);
  const double norm = 1.0 / std::sqrt(std::pow(nfact, S));
  ComplexVector out = ComplexVector::Zero(static_cast<Eigen::Index>(ipow(L, S * N)));
  std::vector<std::size_t> it(S);
  for (std::size_t i = 0; i < basis.dim(); ++i) {
    const cplx a = psi[static_cast<Eigen::Index>(i)];
    if (a == 0.0) continue;
    const auto loc = basis.decompose(i);
    std::fill(it.begin(), it.end(), 0);
    while (true) {
      std::size_t idx = 0;
      int sign = 1;
      for (int s = 0; s < S; ++s) {
        const auto& o = orders[loc[s]][it[s]];
        idx = idx * block + o.first;
        sign *= o.second;
      }
      out[static_cast<Eigen::Index>(idx)] += norm * static_cast<double>(sign) * a;
      int s = S - 1;
      while (s >= 0 && ++it[s] == orders[loc[s]].size()) it[s--] = 0;
      if (s < 0) break;
    }
  }
  return out;
}

RealMatrix sample_momenta(const FockBasis& basis, const Mixture& mix,
                          const GaussianEnvelope& envelope, std::size_t count, std::uint64_t seed,
                          const MomentumSamplerOptions& opt) {
  const int n = basis.total_atoms();
  const int cutoff = opt.cutoff >= 0 ? opt.cutoff : envelope.default_cutoff();
  std::vector<double> cum(mix.weights.size());
  std::partial_sum(mix.weights.begin(), mix.weights.end(), cum.begin());
  std::vector<std::vector<std::size_t>> groups(mix.weights.size());
  for (std::size_t s = 0; s < count; ++s) {
    auto rng = stream_rng(seed, s, kSaltComponent);
    groups[pick(cum, std::uniform_real_distribution<double>(0.0, 1.0)(rng))].push_back(s);
  }
  RealMatrix out(static_cast<Eigen::Index>(count), n);
  for (std::size_t c = 0; c < groups.size(); ++c) {
    if (groups[c].empty()) continue;
    AncestralSampler sampler(basis, mix.states[c], envelope, cutoff, opt.min_acceptance);
    const auto& shots = groups[c];
    constexpr std::size_t kBatch = 32;
    parallel_for((shots.size() + kBatch - 1) / kBatch, [&](std::size_t bi) {
      const std::size_t lo = bi * kBatch, hi = std::min(shots.size(), lo + kBatch);
      std::vector<std::mt19937_64> rngs;
      for (std::size_t j = lo; j < hi; ++j) rngs.push_back(stream_rng(seed, shots[j], kSaltMomentum));
      std::vector<double> k(rngs.size() * static_cast<std::size_t>(n));
      sampler.draw_batch(rngs, k.data(), static_cast<std::size_t>(n));
      for (std::size_t j = lo; j < hi; ++j)
        for (int a = 0; a < n; ++a)
          out(static_cast<Eigen::Index>(shots[j]), a) = k[(j - lo) * static_cast<std::size_t>(n) + a];
    });
  }
  return out;
}

RealMatrix sample_momenta(const DensityMatrix& rho, const GaussianEnvelope& envelope,
                          std::size_t count, std::uint64_t seed, const MomentumSamplerOptions& opt) {
  return sample_momenta(rho.basis(), mixture_from_density(rho), envelope, count, seed, opt);
}

MomentumDensity::MomentumDensity(const DensityMatrix& rho, const ModeSpace& modes,
                                 const GaussianEnvelope& envelope)
    : modes_(&modes), env_(envelope) {
  const auto G = modes.orbit_sums(rho.matrix());
  for (std::size_t f = 0; f < G.size(); ++f)
    if (std::abs(G[f]) > 1e-15) {
      support_.push_back(f);
      G_.push_back(G[f]);
    }
}

double MomentumDensity::fringe(const double* k) const {
  const int S = modes_->species();
  const int N = modes_->atoms();
  const std::size_t nl = modes_->label_count();
  std::vector<cplx> u(static_cast<std::size_t>(S) * nl);
  for (int s = 0; s < S; ++s) modes_->species_values(k + s * N, u.data() + s * nl);
  double acc = 0.0;
  for (std::size_t i = 0; i < support_.size(); ++i) {
    std::size_t f = support_[i];
    cplx t = 1.0;
    for (int s = S - 1; s >= 0; --s) {
      t *= u[s * nl + f % nl];
      f /= nl;
    }
    acc += (G_[i] * t).real();
  }
  return acc;
}

double MomentumDensity::operator()(const double* k) const {
  double env = 1.0;
  const int n = modes_->basis().total_atoms();
  for (int a = 0; a < n; ++a) env *= env_.density(k[a]);
  return env * fringe(k);
}

namespace {

void write_atoms_prefix(std::ostream& os, std::size_t shot, const char* basis) {
  os << "{\"shot\": " << shot << ", \"basis\": \"" << basis << "\", \"atoms\": [";
}

}  // namespace

void write_position_shots(std::ostream& os, const FockBasis& basis,
                          const std::vector<std::size_t>& positions) {
  for (std::size_t s = 0; s < positions.size(); ++s) {
    write_atoms_prefix(os, s, "position");
    const auto loc = basis.decompose(positions[s]);
    bool first = true;
    for (int sp = 0; sp < basis.species(); ++sp)
      for (int site : basis.local_state(loc[sp])) {
        os << (first ? "" : ", ") << "{\"species\": " << sp + 1 << ", \"site\": " << site + 1 << "}";
        first = false;
      }
    os << "]}\n";
  }
}

void write_momentum_shots(std::ostream& os, const FockBasis& basis, const RealMatrix& momenta) {
  const int N = basis.atoms();
  for (Eigen::Index s = 0; s < momenta.rows(); ++s) {
    write_atoms_prefix(os, static_cast<std::size_t>(s), "momentum");
    for (Eigen::Index a = 0; a < momenta.cols(); ++a)
      os << (a ? ", " : "") << "{\"species\": " << a / N + 1 << ", \"kd\": "
         << fmt::format("{}", momenta(s, a)) << "}";
    os << "]}\n";
  }
}

ShotSet read_shots(std::istream& is, const FockBasis& basis) {
  const int S = basis.species();
  const int N = basis.atoms();
  const int L = basis.sites();
  ShotSet out;
  std::vector<double> kd;
  std::size_t nmom = 0;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&lineno](const std::string& msg) {
    throw DataError("shot line " + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail(std::string("invalid JSON (") + e.what() + ")");
    }
    if (!j.is_object() || !j.contains("basis") || !j.contains("atoms") || !j["atoms"].is_array())
      fail("expected fields 'shot', 'basis' and 'atoms'");
    if (!j.contains("shot") || !j["shot"].is_number_integer()) fail("missing integer 'shot'");
    const auto tag = j["basis"].get<std::string>();
    std::vector<std::vector<int>> sites(S);
    std::vector<std::vector<double>> ks(S);
    for (const auto& atom : j["atoms"]) {
      if (!atom.contains("species") || !atom["species"].is_number_integer()) fail("atom without species");
      const int sp = atom["species"].get<int>();
      if (sp < 1 || sp > S) fail("species id out of range");
      if (tag == "position") {
        if (!atom.contains("site") || !atom["site"].is_number_integer()) fail("position atom without site");
        const int site = atom["site"].get<int>();
        if (site < 1 || site > L) fail("site out of range");
        sites[sp - 1].push_back(site - 1);
      } else if (tag == "momentum") {
        if (!atom.contains("kd") || !atom["kd"].is_number()) fail("momentum atom without kd");
        const double k = atom["kd"].get<double>();
        if (!std::isfinite(k)) fail("non-finite momentum");
        ks[sp - 1].push_back(k);
      } else {
        fail("unknown basis '" + tag + "'");
      }
    }
    if (tag == "position") {
      std::vector<std::size_t> loc(S);
      for (int s = 0; s < S; ++s) {
        if (static_cast<int>(sites[s].size()) != N) fail("wrong atom count for a species");
        std::sort(sites[s].begin(), sites[s].end());
        if (std::adjacent_find(sites[s].begin(), sites[s].end()) != sites[s].end())
          fail("two atoms of one species on the same site");
        loc[s] = basis.local_index(sites[s]);
      }
      out.positions.push_back(basis.compose(loc));
    } else {
      for (int s = 0; s < S; ++s) {
        if (static_cast<int>(ks[s].size()) != N) fail("wrong atom count for a species");
        kd.insert(kd.end(), ks[s].begin(), ks[s].end());
      }
      ++nmom;
    }
  }
  const int n = S * N;
  out.momenta.resize(static_cast<Eigen::Index>(nmom), n);
  for (std::size_t s = 0; s < nmom; ++s)
    for (int a = 0; a < n; ++a) out.momenta(static_cast<Eigen::Index>(s), a) = kd[s * n + a];
  return out;
}

}  // namespace dimcert
