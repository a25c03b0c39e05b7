#include <gtest/gtest.h>

#include <bit>

#include "dimcert/errors.hpp"
#include "dimcert/fock.hpp"

using namespace dimcert;

namespace {

FockBasis make(int L, int N, Statistics st, int S = 2) {
  return FockBasis(LatticeSpec{L, 1.0}, SpeciesConfig{S, N, st});
}

}  // namespace

TEST(Fock, Dimensions) {
  EXPECT_EQ(make(6, 1, Statistics::Distinguishable).dim(), 36u);
  EXPECT_EQ(make(4, 2, Statistics::Fermion).dim(), 36u);
  EXPECT_EQ(make(6, 3, Statistics::HardCoreBoson).dim(), 400u);
  EXPECT_EQ(make(6, 1, Statistics::Distinguishable, 3).dim(), 216u);
  EXPECT_EQ(binomial(8, 4), 70u);
  EXPECT_EQ(binomial(3, 5), 0u);
}

TEST(Fock, ComposeRoundTrip) {
  const auto b = make(5, 2, Statistics::Fermion);
  for (std::size_t i = 0; i < b.dim(); ++i) EXPECT_EQ(b.compose(b.decompose(i)), i);
  for (std::size_t k = 0; k < b.local_dim(); ++k) {
    EXPECT_EQ(b.local_index(b.local_state(k)), k);
    EXPECT_EQ(std::popcount(b.local_mask(k)), 2);
  }
}

TEST(Fock, InvalidLocalState) {
  const auto b = make(4, 2, Statistics::Fermion);
  EXPECT_THROW(b.local_index({1, 1}), ConfigError);
  EXPECT_THROW(b.local_index({0, 7}), ConfigError);
  EXPECT_THROW(b.hop(2, 0, 1, 0), ConfigError);
}

// Fermion hops pick up (-1) per occupied site strictly between the endpoints.
TEST(Fock, FermionHopSigns) {
  const auto b = make(5, 3, Statistics::Fermion);
  for (std::size_t st = 0; st < b.dim(); ++st) {
    const std::uint32_t mask = b.local_mask(b.local_of(st, 0));
    for (int from = 0; from < 5; ++from)
      for (int to = 0; to < 5; ++to) {
        if (from == to) continue;
        const auto h = b.hop(0, from, to, st);
        const bool ok = (mask >> from & 1u) && !(mask >> to & 1u);
        if (!ok) {
          EXPECT_EQ(h.sign, 0);
          continue;
        }
        int between = 0;
        for (int x = std::min(from, to) + 1; x < std::max(from, to); ++x) between += (mask >> x) & 1u;
        EXPECT_EQ(h.sign, between % 2 ? -1 : 1);
        const std::uint32_t moved = (mask & ~(1u << from)) | (1u << to);
        EXPECT_EQ(b.local_mask(b.local_of(h.target, 0)), moved);
        EXPECT_EQ(b.local_of(h.target, 1), b.local_of(st, 1));
      }
  }
}

TEST(Fock, BosonHopsArePositive) {
  const auto b = make(5, 3, Statistics::HardCoreBoson);
  for (std::size_t st = 0; st < b.dim(); ++st)
    for (int from = 0; from < 5; ++from)
      for (int to = 0; to < 5; ++to) {
        if (from == to) continue;
        const auto h = hop_element(b, 1, from, to, st);
        EXPECT_TRUE(h.sign == 0 || h.sign == 1);
      }
}

TEST(Fock, StatisticsNames) {
  for (auto s : {Statistics::Fermion, Statistics::HardCoreBoson, Statistics::Distinguishable})
    EXPECT_EQ(statistics_from_string(to_string(s)), s);
  EXPECT_THROW(statistics_from_string("anyon"), ConfigError);
}
