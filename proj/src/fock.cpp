// Copyright 2026 The dimcert Authors
// SPDX-License-Identifier: Apache-2.0

#include "dimcert/fock.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "dimcert/errors.hpp"

namespace dimcert {

std::string to_string(Statistics s) {
  switch (s) {
    case Statistics::Fermion:
      return "fermion";
    case Statistics::HardCoreBoson:
      return "hardcore_boson";
    case Statistics::Distinguishable:
      return "distinguishable";
  }
  return "unknown";
}

Statistics statistics_from_string(const std::string& s) {
  if (s == "fermion" || s == "fermions") return Statistics::Fermion;
  if (s == "hardcore_boson" || s == "boson" || s == "bosons") return Statistics::HardCoreBoson;
  if (s == "distinguishable") return Statistics::Distinguishable;
  throw ConfigError("unknown statistics '" + s + "'");
}

std::size_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::size_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::size_t>(n - k + i) / static_cast<std::size_t>(i);
  return r;
}

FockBasis::FockBasis(LatticeSpec lattice, SpeciesConfig config) : lattice_(lattice), config_(config) {
  const int L = lattice_.sites;
  const int N = config_.atoms_per_species;
  if (L < 2) throw ConfigError("lattice needs at least 2 sites");
  if (L > 24) throw ConfigError("lattice larger than 24 sites is not supported");
  if (config_.species_count != 2 && config_.species_count != 3)
    throw ConfigError("species count must be 2 or 3");
  if (N < 1) throw ConfigError("atoms per species must be positive");
  if (N > L) throw ConfigError("more atoms per species than sites");
  if (config_.species_count == 3 && N != 1)
    throw ConfigError("three species are supported with one atom each");
  if (config_.statistics == Statistics::Distinguishable && N != 1)
    throw ConfigError("distinguishable statistics requires one atom per species");

  mask_to_index_.assign(std::size_t{1} << L, -1);
  std::vector<int> sel(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) sel[i] = i;
  for (;;) {
    std::uint32_t mask = 0;
    for (int s : sel) mask |= std::uint32_t{1} << s;
    mask_to_index_[mask] = static_cast<std::int64_t>(local_.size());
    local_.push_back(sel);
    masks_.push_back(mask);
    int i = N - 1;
    while (i >= 0 && sel[i] == L - N + i) --i;
    if (i < 0) break;
    ++sel[i];
    for (int j = i + 1; j < N; ++j) sel[j] = sel[j - 1] + 1;
  }

  const int S = config_.species_count;
  stride_.assign(static_cast<std::size_t>(S), 1);
  for (int s = S - 2; s >= 0; --s) stride_[s] = stride_[s + 1] * local_.size();
  dim_ = stride_[0] * local_.size();
}

std::size_t FockBasis::local_index_of_mask(std::uint32_t mask) const {
  if (mask >= mask_to_index_.size() || mask_to_index_[mask] < 0)
    throw ConfigError("occupation pattern is not in the basis");
  return static_cast<std::size_t>(mask_to_index_[mask]);
}

std::size_t FockBasis::local_index(const std::vector<int>& sites) const {
  std::uint32_t mask = 0;
  for (int s : sites) {
    if (s < 0 || s >= lattice_.sites) throw ConfigError("site index out of range");
    std::uint32_t bit = std::uint32_t{1} << s;
    if (mask & bit) throw ConfigError("site occupied twice within a species");
    mask |= bit;
  }
  if (static_cast<int>(sites.size()) != config_.atoms_per_species)
    throw ConfigError("wrong atom count for local state");
  return local_index_of_mask(mask);
}

std::size_t FockBasis::compose(const std::vector<std::size_t>& locals) const {
  std::size_t idx = 0;
  for (std::size_t s = 0; s < stride_.size(); ++s) idx += locals[s] * stride_[s];
  return idx;
}

std::vector<std::size_t> FockBasis::decompose(std::size_t index) const {
  std::vector<std::size_t> out(stride_.size());
  for (std::size_t s = 0; s < stride_.size(); ++s) {
    out[s] = index / stride_[s];
    index %= stride_[s];
  }
  return out;
}

std::size_t FockBasis::local_of(std::size_t index, int species) const {
  return (index / stride_[static_cast<std::size_t>(species)]) % local_.size();
}

HopResult FockBasis::hop(int species, int from, int to, std::size_t state) const {
  const int L = lattice_.sites;
  if (species < 0 || species >= config_.species_count) throw ConfigError("species index out of range");
  if (from < 0 || from >= L || to < 0 || to >= L) throw ConfigError("site index out of range");
  if (state >= dim_) throw ConfigError("state ordinal out of range");
  const std::size_t loc = local_of(state, species);
  const std::uint32_t mask = masks_[loc];
  const std::uint32_t fbit = std::uint32_t{1} << from;
  const std::uint32_t tbit = std::uint32_t{1} << to;
  if (from == to) return {(mask & fbit) ? state : 0, (mask & fbit) ? 1 : 0};
  if (!(mask & fbit) || (mask & tbit)) return {0, 0};
  const std::uint32_t moved = (mask & ~fbit) | tbit;
  int sign = 1;
  if (config_.statistics == Statistics::Fermion) {
    const int lo = std::min(from, to), hi = std::max(from, to);
    const std::uint32_t between = ((std::uint32_t{1} << hi) - 1) & ~((std::uint32_t{1} << (lo + 1)) - 1);
    if (std::popcount(mask & between) % 2) sign = -1;
  }
  const std::size_t nloc = static_cast<std::size_t>(mask_to_index_[moved]);
  const std::size_t target = state + (nloc - loc) * stride_[static_cast<std::size_t>(species)];
  return {target, sign};
}

FockBasis enumerate_basis(const LatticeSpec& lattice, const SpeciesConfig& config) {
  return FockBasis(lattice, config);
}

HopResult hop_element(const FockBasis& basis, int species, int from_site, int to_site, std::size_t state) {
  return basis.hop(species, from_site, to_site, state);
}

}  // namespace dimcert
