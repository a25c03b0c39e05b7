// Copyright 2026 The dimcert Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace dimcert {

enum class Statistics { Fermion, HardCoreBoson, Distinguishable };

std::string to_string(Statistics s);
Statistics statistics_from_string(const std::string& s);

struct LatticeSpec {
  int sites = 2;
  double spacing = 1.0;  // momenta are stored as k*d
};

struct SpeciesConfig {
  int species_count = 2;
  int atoms_per_species = 1;
  Statistics statistics = Statistics::Distinguishable;
};

struct HopResult {
  std::size_t target = 0;
  int sign = 0;  // 0 when the hop is blocked
};

// Occupation basis of `species_count` species with N atoms each on L sites.
// Local states are ascending 0-based site lists in lexicographic order; the
// composite index is species-major (species 0 most significant).
class FockBasis {
 public:
  FockBasis(LatticeSpec lattice, SpeciesConfig config);

  const LatticeSpec& lattice() const { return lattice_; }
  const SpeciesConfig& config() const { return config_; }
  int sites() const { return lattice_.sites; }
  int species() const { return config_.species_count; }
  int atoms() const { return config_.atoms_per_species; }
  int total_atoms() const { return config_.species_count * config_.atoms_per_species; }
  Statistics statistics() const { return config_.statistics; }

  std::size_t local_dim() const { return local_.size(); }
  std::size_t dim() const { return dim_; }

  const std::vector<int>& local_state(std::size_t k) const { return local_[k]; }
  std::uint32_t local_mask(std::size_t k) const { return masks_[k]; }
  // Throws ConfigError when the site list is not a valid local state.
  std::size_t local_index(const std::vector<int>& sites) const;
  std::size_t local_index_of_mask(std::uint32_t mask) const;

  std::size_t compose(const std::vector<std::size_t>& locals) const;
  std::vector<std::size_t> decompose(std::size_t index) const;
  std::size_t local_of(std::size_t index, int species) const;

  // Moves one atom of `species` from `from` to `to` (0-based sites).
  HopResult hop(int species, int from, int to, std::size_t state) const;

 private:
  LatticeSpec lattice_;
  SpeciesConfig config_;
  std::vector<std::vector<int>> local_;
  std::vector<std::uint32_t> masks_;
  std::vector<std::int64_t> mask_to_index_;
  std::vector<std::size_t> stride_;
  std::size_t dim_ = 0;
};

FockBasis enumerate_basis(const LatticeSpec& lattice, const SpeciesConfig& config);

HopResult hop_element(const FockBasis& basis, int species, int from_site, int to_site,
                      std::size_t state);

std::size_t binomial(int n, int k);

}  // namespace dimcert
