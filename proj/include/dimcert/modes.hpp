// Copyright 2026 The dimcert Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "dimcert/fock.hpp"
#include "dimcert/hubbard.hpp"

namespace dimcert {

// Fringe modes of the momentum correlator.
//
// Per species, a label is the sorted multiset of N site differences
// (ket minus bra). A full orbit is one label per species; its basis
// function is the product over species of the sum of exp(i tau.k) over the
// distinct orderings tau of the label. Canonical modes keep one orbit of
// each {O, -O} pair: the one whose concatenated labels are lexicographically
// non-negative. For one atom per species this is exactly the set
// {alpha > 0, or alpha = 0 and beta >= 0, ...}.
class ModeSpace {
 public:
  struct Transition {
    std::uint32_t label;
    double weight;  // signed count of ordering pairs, divided by nothing
  };
  struct Mode {
    std::size_t full;
    bool self_conjugate;
    std::size_t imag_slot;  // index into the imaginary block, or npos
  };
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  explicit ModeSpace(const FockBasis& basis);

  const FockBasis& basis() const { return basis_; }
  int species() const { return basis_.species(); }
  int atoms() const { return basis_.atoms(); }
  double orderings() const { return orderings_; }  // (N!)^S

  std::size_t label_count() const { return labels_.size(); }
  const std::vector<int>& label(std::size_t l) const { return labels_[l]; }
  std::size_t negated_label(std::size_t l) const { return neg_label_[l]; }
  const std::vector<std::vector<int>>& label_orderings(std::size_t l) const { return perms_[l]; }
  std::size_t find_label(std::vector<int> diffs) const;  // sorts; throws if absent
  std::size_t zero_label() const { return zero_label_; }

  std::size_t full_size() const { return full_size_; }
  std::size_t full_index(const std::vector<std::size_t>& labels) const;
  std::vector<std::size_t> full_labels(std::size_t full) const;
  std::size_t negated_full(std::size_t full) const;
  double orbit_size(std::size_t full) const;

  std::size_t mode_count() const { return modes_.size(); }
  std::size_t imag_count() const { return imag_count_; }
  std::size_t real_dim() const { return modes_.size() + imag_count_; }
  const Mode& mode(std::size_t i) const { return modes_[i]; }
  std::size_t zero_mode() const { return zero_mode_; }
  // Canonical mode of a full orbit and whether the orbit is its negation.
  std::size_t canonical_of(std::size_t full) const { return canon_[full]; }
  bool is_negated(std::size_t full) const { return negflag_[full] != 0; }
  // Difference vector of the canonical representative (per species labels
  // concatenated).
  std::vector<int> mode_vector(std::size_t mode) const;

  // Entries of the per-species transition table for local states (a, b),
  // a the bra and b the ket.
  std::span<const Transition> transitions(std::size_t a, std::size_t b) const;

  // Per-species basis values psi_s(l; k_s) for all labels, k_s the N momenta.
  void species_values(const double* k, std::complex<double>* out) const;

  // Coherence sums over full orbits, G(O) = sum_x <x|rho|x+O>.
  std::vector<std::complex<double>> orbit_sums(const ComplexMatrix& rho) const;
  // Canonical coefficients: 2G for ordinary modes, G for self-conjugate ones.
  ComplexVector coherence_sums(const ComplexMatrix& rho) const;
  ComplexVector canonical_from_orbits(const std::vector<std::complex<double>>& G) const;

 private:
  FockBasis basis_;
  double orderings_ = 1.0;
  std::vector<std::vector<int>> labels_;
  std::vector<std::size_t> neg_label_;
  std::vector<std::vector<std::vector<int>>> perms_;
  std::vector<double> perm_count_;
  std::size_t zero_label_ = 0;
  std::size_t full_size_ = 0;
  std::vector<Mode> modes_;
  std::size_t imag_count_ = 0;
  std::size_t zero_mode_ = 0;
  std::vector<std::size_t> canon_;
  std::vector<std::uint8_t> negflag_;
  std::vector<std::uint32_t> trans_offset_;
  std::vector<Transition> trans_;
};

}  // namespace dimcert
