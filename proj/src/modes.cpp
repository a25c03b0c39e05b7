// Copyright 2026 The dimcert Authors
// SPDX-License-Identifier: Apache-2.0

#include "dimcert/modes.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "dimcert/errors.hpp"

namespace dimcert {
namespace {

int permutation_sign(const std::vector<int>& order) {
  int s = 1;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (std::size_t j = i + 1; j < order.size(); ++j)
      if (order[i] > order[j]) s = -s;
  return s;
}

std::vector<int> negate(std::vector<int> v) {
  for (int& x : v) x = -x;
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

ModeSpace::ModeSpace(const FockBasis& basis) : basis_(basis) {
  const int N = basis_.atoms();
  const int S = basis_.species();
  const bool fermion = basis_.statistics() == Statistics::Fermion;
  const std::size_t nloc = basis_.local_dim();
  double nfact = 1.0;
  for (int i = 2; i <= N; ++i) nfact *= i;
  orderings_ = std::pow(nfact, S);

  // raw transitions keyed by label vector
  std::vector<std::map<std::vector<int>, double>> raw(nloc * nloc);
  std::map<std::vector<int>, std::size_t> ids;
  std::vector<int> order(N);
  for (std::size_t a = 0; a < nloc; ++a) {
    const auto& Sa = basis_.local_state(a);
    for (std::size_t b = 0; b < nloc; ++b) {
      const auto& Sb = basis_.local_state(b);
      for (int i = 0; i < N; ++i) order[i] = i;
      do {
        std::vector<int> d(N);
        for (int i = 0; i < N; ++i) d[i] = Sb[i] - Sa[order[i]];
        std::sort(d.begin(), d.end());
        const double s = fermion ? permutation_sign(order) : 1.0;
        raw[a * nloc + b][d] += s * nfact;
        ids.emplace(d, 0);
      } while (std::next_permutation(order.begin(), order.end()));
    }
  }
  for (auto& [lab, id] : ids) {
    id = labels_.size();
    labels_.push_back(lab);
  }
  neg_label_.resize(labels_.size());
  perms_.resize(labels_.size());
  perm_count_.resize(labels_.size());
  for (std::size_t l = 0; l < labels_.size(); ++l) {
    neg_label_[l] = ids.at(negate(labels_[l]));
    std::vector<int> p = labels_[l];
    do perms_[l].push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    perm_count_[l] = static_cast<double>(perms_[l].size());
  }
  zero_label_ = ids.at(std::vector<int>(N, 0));

  trans_offset_.assign(nloc * nloc + 1, 0);
  for (std::size_t ab = 0; ab < nloc * nloc; ++ab) {
    for (const auto& [lab, w] : raw[ab])
      if (w != 0.0) trans_.push_back({static_cast<std::uint32_t>(ids.at(lab)), w});
    trans_offset_[ab + 1] = static_cast<std::uint32_t>(trans_.size());
  }

  const std::size_t nl = labels_.size();
  full_size_ = 1;
  for (int s = 0; s < S; ++s) full_size_ *= nl;
  canon_.assign(full_size_, npos);
  negflag_.assign(full_size_, 0);
  for (std::size_t f = 0; f < full_size_; ++f) {
    const std::size_t nf = negated_full(f);
    // labels sorted ascending, so index order is lexicographic order
    if (f < nf) continue;
    Mode m{f, nf == f, npos};
    if (!m.self_conjugate) m.imag_slot = imag_count_++;
    if (m.self_conjugate && f == nf && full_labels(f) == std::vector<std::size_t>(S, zero_label_))
      zero_mode_ = modes_.size();
    canon_[f] = modes_.size();
    canon_[nf] = modes_.size();
    negflag_[nf] = nf != f;
    modes_.push_back(m);
  }
}

std::size_t ModeSpace::find_label(std::vector<int> diffs) const {
  std::sort(diffs.begin(), diffs.end());
  auto it = std::lower_bound(labels_.begin(), labels_.end(), diffs);
  if (it == labels_.end() || *it != diffs) throw ConfigError("difference tuple is not a mode label");
  return static_cast<std::size_t>(it - labels_.begin());
}

std::size_t ModeSpace::full_index(const std::vector<std::size_t>& labels) const {
  std::size_t f = 0;
  for (std::size_t l : labels) f = f * labels_.size() + l;
  return f;
}

std::vector<std::size_t> ModeSpace::full_labels(std::size_t full) const {
  const int S = species();
  std::vector<std::size_t> out(S);
  for (int s = S - 1; s >= 0; --s) {
    out[s] = full % labels_.size();
    full /= labels_.size();
  }
  return out;
}

std::size_t ModeSpace::negated_full(std::size_t full) const {
  auto ls = full_labels(full);
  for (auto& l : ls) l = neg_label_[l];
  return full_index(ls);
}

double ModeSpace::orbit_size(std::size_t full) const {
  double n = 1.0;
  for (std::size_t l : full_labels(full)) n *= perm_count_[l];
  return n;
}

std::vector<int> ModeSpace::mode_vector(std::size_t mode) const {
  std::vector<int> out;
  for (std::size_t l : full_labels(modes_.at(mode).full))
    out.insert(out.end(), labels_[l].begin(), labels_[l].end());
  return out;
}

std::span<const ModeSpace::Transition> ModeSpace::transitions(std::size_t a, std::size_t b) const {
  const std::size_t ab = a * basis_.local_dim() + b;
  return {trans_.data() + trans_offset_[ab], trans_offset_[ab + 1] - trans_offset_[ab]};
}

void ModeSpace::species_values(const double* k, std::complex<double>* out) const {
  const int N = atoms();
  const int L = basis_.sites();
  const int span = 2 * L - 1;
  std::vector<std::complex<double>> ph(static_cast<std::size_t>(N) * span);
  for (int n = 0; n < N; ++n)
    for (int g = -(L - 1); g <= L - 1; ++g)
      ph[n * span + g + L - 1] = std::polar(1.0, g * k[n]);
  for (std::size_t l = 0; l < labels_.size(); ++l) {
    std::complex<double> acc = 0.0;
    for (const auto& p : perms_[l]) {
      std::complex<double> t = ph[p[0] + L - 1];
      for (int n = 1; n < N; ++n) t *= ph[n * span + p[n] + L - 1];
      acc += t;
    }
    out[l] = acc;
  }
}

std::vector<std::complex<double>> ModeSpace::orbit_sums(const ComplexMatrix& rho) const {
  const std::size_t dim = basis_.dim();
  if (static_cast<std::size_t>(rho.rows()) != dim || static_cast<std::size_t>(rho.cols()) != dim)
    throw ConfigError("density matrix does not match the basis");
  const int S = species();
  const std::size_t nl = labels_.size();
  std::vector<std::complex<double>> G(full_size_, 0.0);
  std::vector<std::vector<std::size_t>> loc(dim);
  for (std::size_t i = 0; i < dim; ++i) loc[i] = basis_.decompose(i);

  std::vector<std::span<const Transition>> t(S);
  std::vector<std::size_t> it(S);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      const std::complex<double> r = rho(i, j);
      if (r == 0.0) continue;
      bool empty = false;
      for (int s = 0; s < S; ++s) {
        t[s] = transitions(loc[i][s], loc[j][s]);
        empty = empty || t[s].empty();
        it[s] = 0;
      }
      if (empty) continue;
      while (true) {
        std::size_t f = 0;
        double w = 1.0;
        for (int s = 0; s < S; ++s) {
          f = f * nl + t[s][it[s]].label;
          w *= t[s][it[s]].weight;
        }
        G[f] += r * w;
        int s = S - 1;
        while (s >= 0 && ++it[s] == t[s].size()) it[s--] = 0;
        if (s < 0) break;
      }
    }
  }
  for (std::size_t f = 0; f < full_size_; ++f)
    if (G[f] != 0.0) G[f] /= orderings_ * orbit_size(f);
  return G;
}

ComplexVector ModeSpace::canonical_from_orbits(const std::vector<std::complex<double>>& G) const {
  ComplexVector g(modes_.size());
  for (std::size_t m = 0; m < modes_.size(); ++m)
    g[m] = modes_[m].self_conjugate ? G[modes_[m].full] : 2.0 * G[modes_[m].full];
  return g;
}

ComplexVector ModeSpace::coherence_sums(const ComplexMatrix& rho) const {
  return canonical_from_orbits(orbit_sums(rho));
}

}  // namespace dimcert
