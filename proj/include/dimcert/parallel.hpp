// Copyright 2026 The dimcert Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace dimcert {

// Worker count from DIMCERT_WORKERS, falling back to hardware concurrency.
unsigned worker_count();

// Calls fn(i) for i in [0, n) on the worker pool. Exceptions are rethrown
// on the calling thread after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

std::uint64_t splitmix64(std::uint64_t x);

// Independent stream for task `index` under a run seed.
inline std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t index, std::uint64_t salt = 0) {
  return std::mt19937_64(splitmix64(splitmix64(seed ^ (salt * 0x9e3779b97f4a7c15ULL)) + index));
}

}  // namespace dimcert
