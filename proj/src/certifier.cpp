// Copyright 2026 The dimcert Authors
// SPDX-License-Identifier: Apache-2.0

#include "dimcert/certifier.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "dimcert/errors.hpp"
#include "dimcert/parallel.hpp"

namespace dimcert {

OverlapOperator::OverlapOperator(const ModeSpace& modes, const GaussianEnvelope& envelope,
                                 double max_condition)
    : modes_(&modes) {
  init([&envelope](int g) { return envelope.overlap(g); }, max_condition);
}

OverlapOperator::OverlapOperator(const ModeSpace& modes, const std::function<double(int)>& overlap,
                                 double max_condition)
    : modes_(&modes) {
  init(overlap, max_condition);
}

void OverlapOperator::init(const std::function<double(int)>& overlap, double max_condition) {
  const int L = modes_->basis().sites();
  const int N = modes_->atoms();
  const int gmax = 2 * (L - 1);
  std::vector<double> I(gmax + 1);
  for (int g = 0; g <= gmax; ++g) I[g] = overlap(g);

  const std::size_t nl = modes_->label_count();
  K_.resize(nl, nl);
  for (std::size_t e = 0; e < nl; ++e) {
    for (std::size_t d = 0; d <= e; ++d) {
      double acc = 0.0;
      for (const auto& s : modes_->label_orderings(e))
        for (const auto& t : modes_->label_orderings(d)) {
          double p = 1.0;
          for (int n = 0; n < N; ++n) p *= I[std::abs(s[n] - t[n])];
          acc += p;
        }
      K_(e, d) = acc;
      K_(d, e) = acc;
    }
  }
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(K_);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  const int S = modes_->species();
  condition_ = lo > 0.0 ? std::pow(hi / lo, S) : INFINITY;
  if (!(condition_ <= max_condition)) {
    std::ostringstream os;
    os << "overlap matrix is numerically singular (condition " << condition_
       << "); increase the envelope width sigma_k";
    throw NumericalError(os.str());
  }
  Kinv_ = es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() *
          es.eigenvectors().transpose();
}

double OverlapOperator::kernel(std::size_t full_e, std::size_t full_d) const {
  const auto le = modes_->full_labels(full_e);
  const auto ld = modes_->full_labels(full_d);
  double k = 1.0;
  for (std::size_t s = 0; s < le.size(); ++s) k *= K_(le[s], ld[s]);
  return k;
}

RealMatrix OverlapOperator::dense() const {
  const ModeSpace& m = *modes_;
  const std::size_t nm = m.mode_count();
  const int S = m.species();
  std::vector<std::vector<std::size_t>> lab(nm), nlab(nm);
  for (std::size_t i = 0; i < nm; ++i) {
    lab[i] = m.full_labels(m.mode(i).full);
    nlab[i] = lab[i];
    for (auto& l : nlab[i]) l = m.negated_label(l);
  }
  auto K = [&](const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    double k = 1.0;
    for (int s = 0; s < S; ++s) k *= K_(a[s], b[s]);
    return k;
  };
  RealMatrix Q = RealMatrix::Zero(dim(), dim());
  for (std::size_t e = 0; e < nm; ++e) {
    for (std::size_t d = 0; d < nm; ++d) {
      const double kp = K(lab[e], lab[d]);
      if (m.mode(d).self_conjugate) {
        Q(e, d) = kp;
        continue;
      }
      const double km = K(lab[e], nlab[d]);
      Q(e, d) = 0.5 * (kp + km);
      const std::size_t se = m.mode(e).imag_slot;
      if (se != ModeSpace::npos) Q(nm + se, nm + m.mode(d).imag_slot) = 0.5 * (kp - km);
    }
  }
  return Q;
}

void OverlapOperator::kron(const RealMatrix& M, std::vector<double>& X) const {
  const std::size_t nl = modes_->label_count();
  const int S = modes_->species();
  std::size_t outer = 1;
  for (int s = 0; s < S; ++s) {
    std::size_t inner = 1;
    for (int t = s + 1; t < S; ++t) inner *= nl;
    for (std::size_t o = 0; o < outer; ++o) {
      Eigen::Map<RealMatrix> blk(X.data() + o * nl * inner, static_cast<Eigen::Index>(inner),
                                 static_cast<Eigen::Index>(nl));
      blk = blk * M;
    }
    outer *= nl;
  }
}

void OverlapOperator::embed(const RealVector& x, std::vector<double>& sym,
                            std::vector<double>& anti, bool inverse) const {
  const ModeSpace& m = *modes_;
  const std::size_t nm = m.mode_count();
  sym.assign(m.full_size(), 0.0);
  anti.assign(m.full_size(), 0.0);
  const double h = inverse ? 1.0 : 0.5;
  for (std::size_t i = 0; i < nm; ++i) {
    const auto& md = m.mode(i);
    if (md.self_conjugate) {
      sym[md.full] = x[i];
      continue;
    }
    const std::size_t nf = m.negated_full(md.full);
    sym[md.full] = h * x[i];
    sym[nf] = h * x[i];
    const double y = x[nm + md.imag_slot];
    anti[md.full] = h * y;
    anti[nf] = -h * y;
  }
}

void OverlapOperator::restrict(const std::vector<double>& sym, const std::vector<double>& anti,
                               RealVector& y, bool inverse) const {
  const ModeSpace& m = *modes_;
  const std::size_t nm = m.mode_count();
  y.resize(static_cast<Eigen::Index>(dim()));
  const double f = inverse ? 2.0 : 1.0;
  for (std::size_t i = 0; i < nm; ++i) {
    const auto& md = m.mode(i);
    if (md.self_conjugate) {
      y[i] = sym[md.full];
      continue;
    }
    y[i] = f * sym[md.full];
    y[nm + md.imag_slot] = f * anti[md.full];
  }
}

void OverlapOperator::apply(const RealVector& x, RealVector& y) const {
  std::vector<double> sym, anti;
  embed(x, sym, anti, false);
  kron(K_, sym);
  kron(K_, anti);
  restrict(sym, anti, y, false);
}

void OverlapOperator::precondition(const RealVector& r, RealVector& z) const {
  std::vector<double> sym, anti;
  embed(r, sym, anti, true);
  kron(Kinv_, sym);
  kron(Kinv_, anti);
  restrict(sym, anti, z, true);
}

CGResult conjugate_gradient(const std::function<void(const RealVector&, RealVector&)>& A,
                            const std::function<void(const RealVector&, RealVector&)>& M,
                            const RealVector& b, double tol, int max_iter) {
  CGResult out;
  const Eigen::Index n = b.size();
  out.x = RealVector::Zero(n);
  const double bn = b.norm();
  if (bn == 0.0) return out;
  RealVector r = b, z(n), p(n), Ap(n);
  M(r, z);
  p = z;
  double rz = r.dot(z);
  for (int it = 1; it <= max_iter; ++it) {
    A(p, Ap);
    const double alpha = rz / p.dot(Ap);
    out.x += alpha * p;
    r -= alpha * Ap;
    out.iterations = it;
    out.residual = r.norm() / bn;
    if (out.residual <= tol) return out;
    M(r, z);
    const double rz1 = r.dot(z);
    p = z + (rz1 / rz) * p;
    rz = rz1;
  }
  std::ostringstream os;
  os << "conjugate gradient did not converge in " << max_iter << " iterations (residual "
     << out.residual << ")";
  throw NumericalError(os.str());
}

RealVector stack_coefficients(const ModeSpace& modes, const ComplexVector& c) {
  const std::size_t nm = modes.mode_count();
  RealVector x(static_cast<Eigen::Index>(modes.real_dim()));
  for (std::size_t i = 0; i < nm; ++i) {
    x[i] = c[i].real();
    const auto slot = modes.mode(i).imag_slot;
    if (slot != ModeSpace::npos) x[nm + slot] = c[i].imag();
  }
  return x;
}

ComplexVector unstack_coefficients(const ModeSpace& modes, const RealVector& x) {
  const std::size_t nm = modes.mode_count();
  ComplexVector c(nm);
  for (std::size_t i = 0; i < nm; ++i) {
    const auto slot = modes.mode(i).imag_slot;
    c[i] = {x[i], slot == ModeSpace::npos ? 0.0 : x[nm + slot]};
  }
  return c;
}

namespace {

RealVector solve_stacked(const OverlapOperator& Q, const RealVector& b, const SolveOptions& opt,
                         SolveResult* info) {
  if (Q.dim() <= opt.dense_limit) {
    Eigen::LLT<RealMatrix> llt(Q.dense());
    if (llt.info() != Eigen::Success) throw NumericalError("overlap matrix is not positive definite");
    RealVector x = llt.solve(b);
    if (info) {
      info->method = "cholesky";
      info->residual = b.norm() > 0 ? (Q.dense() * x - b).norm() / b.norm() : 0.0;
    }
    return x;
  }
  auto A = [&Q](const RealVector& v, RealVector& out) { Q.apply(v, out); };
  auto M = [&Q](const RealVector& v, RealVector& out) { Q.precondition(v, out); };
  CGResult cg = conjugate_gradient(A, M, b, opt.tolerance, static_cast<int>(10 * Q.dim()));
  if (info) {
    info->method = "cg";
    info->iterations = cg.iterations;
    info->residual = cg.residual;
  }
  return cg.x;
}

}  // namespace

SolveResult solve_g(const OverlapOperator& Q, const ComplexVector& c, const SolveOptions& opt) {
  const ModeSpace& m = Q.modes();
  if (static_cast<std::size_t>(c.size()) != m.mode_count())
    throw ConfigError("coefficient vector does not match the mode set");
  RealVector b = stack_coefficients(m, c);
  b.tail(static_cast<Eigen::Index>(m.imag_count())) *= -1.0;
  SolveResult out;
  out.g = unstack_coefficients(m, solve_stacked(Q, b, opt, &out));
  return out;
}

ComplexVector predicted_coefficients(const OverlapOperator& Q, const ComplexVector& g) {
  const ModeSpace& m = Q.modes();
  if (static_cast<std::size_t>(g.size()) != m.mode_count())
    throw ConfigError("coefficient vector does not match the mode set");
  RealVector y;
  Q.apply(stack_coefficients(m, g), y);
  return unstack_coefficients(m, y).conjugate();
}

RealVector solve_real_block(const OverlapOperator& Q, const RealVector& a, const SolveOptions& opt) {
  const ModeSpace& m = Q.modes();
  RealVector b = RealVector::Zero(static_cast<Eigen::Index>(m.real_dim()));
  b.head(static_cast<Eigen::Index>(m.mode_count())) = a;
  return solve_stacked(Q, b, opt, nullptr).head(static_cast<Eigen::Index>(m.mode_count()));
}

namespace {

constexpr Eigen::Index kBlock = 2048;

// Per-species basis values for a block of shots: one (labels x shots)
// matrix per species.
std::vector<ComplexMatrix> block_values(const ModeSpace& modes, const RealMatrix& k,
                                        Eigen::Index first, Eigen::Index count) {
  const int S = modes.species();
  const int N = modes.atoms();
  const auto nl = static_cast<Eigen::Index>(modes.label_count());
  std::vector<ComplexMatrix> U(S, ComplexMatrix(nl, count));
  std::vector<double> kk(N);
  for (Eigen::Index j = 0; j < count; ++j)
    for (int s = 0; s < S; ++s) {
      for (int n = 0; n < N; ++n) kk[n] = k(first + j, s * N + n);
      modes.species_values(kk.data(), U[s].col(j).data());
    }
  return U;
}

void check_shots(const ModeSpace& modes, const RealMatrix& k) {
  if (k.rows() == 0) throw DataError("no momentum shots");
  if (k.cols() != modes.basis().total_atoms())
    throw DataError("momentum shots have the wrong number of atoms");
}

}  // namespace

ComplexVector project_coefficients(const ModeSpace& modes, const RealMatrix& k) {
  check_shots(modes, k);
  const int S = modes.species();
  const auto nl = static_cast<Eigen::Index>(modes.label_count());
  const Eigen::Index nblocks = (k.rows() + kBlock - 1) / kBlock;
  std::vector<std::vector<std::complex<double>>> partial(static_cast<std::size_t>(nblocks));
  parallel_for(static_cast<std::size_t>(nblocks), [&](std::size_t b) {
    const Eigen::Index first = static_cast<Eigen::Index>(b) * kBlock;
    const Eigen::Index count = std::min(kBlock, k.rows() - first);
    auto U = block_values(modes, k, first, count);
    auto& acc = partial[b];
    acc.assign(modes.full_size(), 0.0);
    if (S == 2) {
      ComplexMatrix M = U[0] * U[1].transpose();  // M(l0, l1)
      for (Eigen::Index l0 = 0; l0 < nl; ++l0)
        for (Eigen::Index l1 = 0; l1 < nl; ++l1) acc[l0 * nl + l1] = M(l0, l1);
    } else {
      for (Eigen::Index j = 0; j < count; ++j)
        for (Eigen::Index l0 = 0; l0 < nl; ++l0)
          for (Eigen::Index l1 = 0; l1 < nl; ++l1) {
            const auto u01 = U[0](l0, j) * U[1](l1, j);
            for (Eigen::Index l2 = 0; l2 < nl; ++l2) acc[(l0 * nl + l1) * nl + l2] += u01 * U[2](l2, j);
          }
    }
  });
  std::vector<std::complex<double>> total(modes.full_size(), 0.0);
  for (const auto& p : partial)
    for (std::size_t f = 0; f < total.size(); ++f) total[f] += p[f];
  ComplexVector c(static_cast<Eigen::Index>(modes.mode_count()));
  const double inv = 1.0 / static_cast<double>(k.rows());
  for (std::size_t i = 0; i < modes.mode_count(); ++i) c[i] = total[modes.mode(i).full] * inv;
  return c;
}

RealVector project_scalars(const ModeSpace& modes, const RealMatrix& k, const RealVector& v) {
  check_shots(modes, k);
  const int S = modes.species();
  const auto nl = static_cast<Eigen::Index>(modes.label_count());
  RealVector V = RealVector::Zero(static_cast<Eigen::Index>(modes.full_size()));
  for (std::size_t i = 0; i < modes.mode_count(); ++i) V[modes.mode(i).full] = v[i];
  RealVector out(k.rows());
  const Eigen::Index nblocks = (k.rows() + kBlock - 1) / kBlock;
  parallel_for(static_cast<std::size_t>(nblocks), [&](std::size_t b) {
    const Eigen::Index first = static_cast<Eigen::Index>(b) * kBlock;
    const Eigen::Index count = std::min(kBlock, k.rows() - first);
    auto U = block_values(modes, k, first, count);
    if (S == 2) {
      // V as (l1 x l0) matrix in column-major order is V(l0 * nl + l1)
      Eigen::Map<const RealMatrix> Vm(V.data(), nl, nl);
      const RealMatrix A = U[1].real(), B = U[1].imag();
      const RealMatrix VA = Vm.transpose() * A, VB = Vm.transpose() * B;  // (l0 x shots)
      const RealMatrix R0 = U[0].real(), I0 = U[0].imag();
      for (Eigen::Index j = 0; j < count; ++j)
        out[first + j] = R0.col(j).dot(VA.col(j)) - I0.col(j).dot(VB.col(j));
    } else {
      for (Eigen::Index j = 0; j < count; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < modes.mode_count(); ++i) {
          if (v[i] == 0.0) continue;
          const auto ls = modes.full_labels(modes.mode(i).full);
          std::complex<double> t = 1.0;
          for (int s = 0; s < S; ++s) t *= U[s](static_cast<Eigen::Index>(ls[s]), j);
          acc += v[i] * t.real();
        }
        out[first + j] = acc;
      }
    }
  });
  return out;
}

double csi_bound(double p_bra, double p_ket) {
  if (p_bra <= 0.0 || p_ket <= 0.0) return 0.0;
  return std::sqrt(p_bra * p_ket);
}

double csi_total(const BoundPlan& plan, const RealVector& p) {
  double s = 0.0;
  for (const auto& pr : plan.pairs) s += pr.weight * csi_bound(p[pr.i], p[pr.j]);
  return s;
}

BoundTerms evaluate(const BoundPlan& plan, const RealVector& p, const ComplexVector& g) {
  if (p.size() != plan.diag.size()) throw DataError("population vector does not match the basis");
  if (g.size() != plan.a.size()) throw DataError("coefficient vector does not match the mode set");
  BoundTerms t;
  t.population = plan.diag.dot(p);
  t.coherence_sum = plan.constant + plan.a.dot(g.real());
  t.csi = csi_total(plan, p);
  t.coherence = t.coherence_sum - t.csi;
  return t;
}

namespace {

// Orders T like x: the i-th smallest entry of x gets the i-th smallest of T.
std::vector<int> rank_match(const std::vector<int>& x, const std::vector<int>& T) {
  std::vector<int> idx(x.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  std::sort(idx.begin(), idx.end(), [&x](int a, int b) { return x[a] < x[b]; });
  std::vector<int> Ts = T;
  std::sort(Ts.begin(), Ts.end());
  std::vector<int> y(x.size());
  for (std::size_t r = 0; r < idx.size(); ++r) y[idx[r]] = Ts[r];
  return y;
}

// Adds the pair list and diagonal for a dense weight matrix D = T - C.
void fill_csi(BoundPlan& plan, const RealMatrix& D) {
  const auto dim = D.rows();
  plan.diag = D.diagonal();
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = i + 1; j < dim; ++j) {
      const double w = std::abs(D(i, j)) + std::abs(D(j, i));
      if (w > 1e-14)
        plan.pairs.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), w});
    }
}

}  // namespace

BoundPlan plan_uniform(const ModeSpace& modes, const ReferenceState& ref) {
  const FockBasis& basis = modes.basis();
  const int S = basis.species();
  const int N = basis.atoms();
  const std::size_t dim = basis.dim();
  const double w = ref.coherence_weight();

  // labeled shift classes connecting distinct reference configurations
  std::set<std::vector<int>> selected;
  std::vector<std::vector<std::vector<int>>> cfg;
  for (std::size_t r : ref.support) {
    std::vector<std::vector<int>> sites;
    for (std::size_t l : basis.decompose(r)) sites.push_back(basis.local_state(l));
    cfg.push_back(sites);
  }
  std::vector<int> x, xp;
  for (std::size_t a = 0; a < cfg.size(); ++a) {
    for (std::size_t b = 0; b < cfg.size(); ++b) {
      if (a == b) continue;
      x = cfg[a][0];
      do {
        xp = cfg[b][0];
        do {
          std::vector<int> d;
          for (int n = 0; n < N; ++n) d.push_back(xp[n] - x[n]);
          for (int s = 1; s < S; ++s) {
            const auto y = rank_match(x, cfg[a][s]);
            const auto yp = rank_match(xp, cfg[b][s]);
            for (int n = 0; n < N; ++n) d.push_back(yp[n] - y[n]);
          }
          selected.insert(d);
        } while (std::next_permutation(xp.begin(), xp.end()));
      } while (std::next_permutation(x.begin(), x.end()));
    }
  }
  std::vector<double> atilde(modes.full_size(), 0.0);
  for (const auto& d : selected) {
    std::vector<std::size_t> ls(S);
    for (int s = 0; s < S; ++s)
      ls[s] = modes.find_label(std::vector<int>(d.begin() + s * N, d.begin() + (s + 1) * N));
    atilde[modes.full_index(ls)] += w;
  }

  BoundPlan plan;
  plan.a = RealVector::Zero(static_cast<Eigen::Index>(modes.mode_count()));
  for (std::size_t i = 0; i < modes.mode_count(); ++i) {
    if (i == modes.zero_mode()) {
      plan.constant = atilde[modes.mode(i).full];
      continue;
    }
    plan.a[i] = atilde[modes.mode(i).full];
  }

  // C(i, j) = sum_O atilde_O prod_s W_s / ((N!)^S |O|)
  std::vector<double> scaled(modes.full_size(), 0.0);
  for (std::size_t f = 0; f < scaled.size(); ++f)
    if (atilde[f] != 0.0) scaled[f] = atilde[f] / (modes.orderings() * modes.orbit_size(f));
  std::vector<std::vector<std::size_t>> loc(dim);
  for (std::size_t i = 0; i < dim; ++i) loc[i] = basis.decompose(i);
  RealMatrix D = RealMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  const std::size_t nl = modes.label_count();
  std::vector<std::span<const ModeSpace::Transition>> t(S);
  std::vector<std::size_t> it(S);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      bool empty = false;
      for (int s = 0; s < S; ++s) {
        t[s] = modes.transitions(loc[i][s], loc[j][s]);
        empty = empty || t[s].empty();
        it[s] = 0;
      }
      if (empty) continue;
      double c = 0.0;
      while (true) {
        std::size_t f = 0;
        double wt = 1.0;
        for (int s = 0; s < S; ++s) {
          f = f * nl + t[s][it[s]].label;
          wt *= t[s][it[s]].weight;
        }
        c += scaled[f] * wt;
        int s = S - 1;
        while (s >= 0 && ++it[s] == t[s].size()) it[s--] = 0;
        if (s < 0) break;
      }
      D(i, j) = -c;
    }
  }
  for (std::size_t a = 0; a < ref.support.size(); ++a)
    for (std::size_t b = 0; b < ref.support.size(); ++b) {
      const auto i = ref.support[a], j = ref.support[b];
      D(i, j) += ref.amplitudes[i] * ref.amplitudes[j];
    }
  // symmetric up to rounding; pairs take |D_ij| + |D_ji|, so halve them
  RealMatrix Ds = 0.5 * (D + D.transpose());
  fill_csi(plan, Ds);
  return plan;
}

BoundPlan plan_lambda(const ModeSpace& modes, const ReferenceState& ref) {
  const FockBasis& basis = modes.basis();
  if (ref.kind != ReferenceKind::LambdaFamily || basis.atoms() != 1 || basis.species() != 2)
    throw ConfigError("lambda-family bound needs a two-atom lambda reference");
  const auto& w = ref.weights;
  const std::size_t dim = basis.dim();
  BoundPlan plan;
  plan.a = RealVector::Constant(static_cast<Eigen::Index>(modes.mode_count()), w.nd_nd);
  plan.a[static_cast<Eigen::Index>(modes.zero_mode())] = 0.0;
  plan.constant = w.nd_nd;
  plan.diag = RealVector::Zero(static_cast<Eigen::Index>(dim));
  auto dimer = [&basis](std::size_t i) { return basis.local_of(i, 0) == basis.local_of(i, 1); };
  for (std::size_t i = 0; i < dim; ++i) {
    if (!dimer(i)) continue;
    plan.diag[i] = w.d_d - w.nd_nd;
    for (std::size_t j = 0; j < dim; ++j) {
      if (j == i) continue;
      const bool dj = dimer(j);
      if (dj && j < i) continue;
      const double weight = 2.0 * w.nd_nd + 2.0 * std::abs(dj ? w.d_d : w.d_nd);
      plan.pairs.push_back({static_cast<std::uint32_t>(std::min(i, j)),
                            static_cast<std::uint32_t>(std::max(i, j)), weight});
    }
  }
  return plan;
}

BoundPlan make_plan(const ModeSpace& modes, const ReferenceState& ref) {
  const FockBasis& b = modes.basis();
  if (ref.basis.dim() != b.dim() || ref.basis.species() != b.species() || ref.basis.atoms() != b.atoms() ||
      ref.basis.sites() != b.sites())
    throw ConfigError("reference and mode space use different bases");
  if (ref.kind == ReferenceKind::LambdaFamily) return plan_lambda(modes, ref);
  if (!ref.uniform) throw ConfigError("no bound available for a non-uniform reference");
  return plan_uniform(modes, ref);
}

namespace {

std::size_t shift_mode(const ModeSpace& modes, int delta) {
  std::vector<std::size_t> ls(static_cast<std::size_t>(modes.species()),
                              modes.find_label(std::vector<int>(static_cast<std::size_t>(modes.atoms()), delta)));
  return modes.canonical_of(modes.full_index(ls));
}

void require_single(const ModeSpace& modes, int species) {
  if (modes.atoms() != 1 || modes.species() != species)
    throw ConfigError("bound requires one atom per species and " + std::to_string(species) + " species");
}

}  // namespace

double bound_attractive(const RealVector& p, const ComplexVector& g, const ModeSpace& modes) {
  require_single(modes, 2);
  const FockBasis& b = modes.basis();
  const int L = b.sites();
  if (static_cast<std::size_t>(p.size()) != b.dim()) throw DataError("missing population data");
  auto P = [&](int m, int n) { return p[static_cast<Eigen::Index>(b.compose({std::size_t(m), std::size_t(n)}))]; };
  double F = 0.0;
  for (int m = 0; m < L; ++m) F += P(m, m) / L;
  for (int d = 1; d < L; ++d) {
    F += g[static_cast<Eigen::Index>(shift_mode(modes, d))].real() / L;
    double s = 0.0;
    for (int m = 0; m < L - d; ++m)
      for (int n = 0; n < L - d; ++n)
        if (m != n) s += csi_bound(P(m + d, n + d), P(m, n));
    F -= 2.0 * s / L;
  }
  return F;
}

double bound_tripartite(const RealVector& p, const ComplexVector& g, const ModeSpace& modes) {
  require_single(modes, 3);
  const FockBasis& b = modes.basis();
  const int L = b.sites();
  if (static_cast<std::size_t>(p.size()) != b.dim()) throw DataError("missing population data");
  auto P = [&](int x, int y, int z) {
    return p[static_cast<Eigen::Index>(b.compose({std::size_t(x), std::size_t(y), std::size_t(z)}))];
  };
  double F = 0.0;
  for (int m = 0; m < L; ++m) F += P(m, m, m) / L;
  for (int d = 1; d < L; ++d) {
    F += g[static_cast<Eigen::Index>(shift_mode(modes, d))].real() / L;
    double s = 0.0;
    for (int x = 0; x < L - d; ++x)
      for (int y = 0; y < L - d; ++y)
        for (int z = 0; z < L - d; ++z)
          if (x != y || y != z) s += csi_bound(P(x + d, y + d, z + d), P(x, y, z));
    F -= 2.0 * s / L;
  }
  return F;
}

double bound_multiparticle(const RealVector& p, const ComplexVector& g, const ModeSpace& modes,
                           const ReferenceState& ref) {
  if (modes.basis().statistics() == Statistics::Distinguishable && modes.atoms() > 1)
    throw ConfigError("multiparticle bound needs fermions or hard-core bosons");
  return evaluate(plan_uniform(modes, ref), p, g).total();
}

double bound_repulsive(const RealVector& p, const ComplexVector& g, const ModeSpace& modes,
                       const ReferenceState& ref) {
  if (ref.kind != ReferenceKind::LambdaFamily && ref.kind != ReferenceKind::RepulsiveMES)
    throw ConfigError("repulsive bound needs a lambda-family or repulsive MES reference");
  return evaluate(make_plan(modes, ref), p, g).total();
}

BoundTerms exact_bound(const DensityMatrix& rho, const ModeSpace& modes, const BoundPlan& plan) {
  return evaluate(plan, rho.populations(), modes.coherence_sums(rho.matrix()));
}

}  // namespace dimcert
