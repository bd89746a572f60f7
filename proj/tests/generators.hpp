// Copyright 2026 The laughlin Authors
// SPDX-License-Identifier: Apache-2.0

// Small random generators for property tests.

#pragma once

#include <random>
#include <vector>

#include "laughlin/lattice.hpp"

namespace laughlin::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double normal(double sigma = 1.0) { return std::normal_distribution<double>(0.0, sigma)(rng_); }

  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(integer(0, static_cast<int>(v.size()) - 1))];
  }

  /// Random composition of N.
  RodPartition composition(int N) {
    std::vector<int> lengths;
    int run = 1;
    for (int i = 1; i < N; ++i) {
      if (integer(0, 1)) {
        lengths.push_back(run);
        run = 1;
      } else {
        ++run;
      }
    }
    lengths.push_back(run);
    return RodPartition(lengths);
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace laughlin::testing
