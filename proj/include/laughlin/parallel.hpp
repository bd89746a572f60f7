// Copyright 2026 The laughlin Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file parallel.hpp
 * @brief Deterministic OpenMP reductions.
 *
 * Work is cut into fixed-size blocks independent of the thread count; blocks
 * are reduced in parallel and their partial results summed serially in block
 * order, so every reduction is bit-identical for any number of threads.
 */

#pragma once

#include <omp.h>

#include <algorithm>
#include <cstddef>
#include <vector>

namespace laughlin {

inline constexpr std::size_t kReductionBlock = 256;

/// Sets the OpenMP thread count when n > 0.
inline void set_thread_count(int n) {
  if (n > 0) omp_set_num_threads(n);
}

/// Sum of f(i) over [0, n).
template <class F>
double blocked_sum(std::size_t n, F&& f) {
  const std::size_t blocks = (n + kReductionBlock - 1) / kReductionBlock;
  std::vector<double> partial(blocks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kReductionBlock;
    const std::size_t hi = std::min(n, lo + kReductionBlock);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += f(i);
    partial[static_cast<std::size_t>(b)] = s;
  }
  double total = 0.0;
  for (double v : partial) total += v;
  return total;
}

/// Vector-valued sum: f(i, acc) adds the contribution of item i into acc (length width).
template <class F>
std::vector<double> blocked_vector_sum(std::size_t n, std::size_t width, F&& f) {
  const std::size_t blocks = (n + kReductionBlock - 1) / kReductionBlock;
  std::vector<std::vector<double>> partial(blocks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kReductionBlock;
    const std::size_t hi = std::min(n, lo + kReductionBlock);
    std::vector<double> acc(width, 0.0);
    for (std::size_t i = lo; i < hi; ++i) f(i, acc);
    partial[static_cast<std::size_t>(b)] = std::move(acc);
  }
  std::vector<double> total(width, 0.0);
  for (const auto& acc : partial) {
    for (std::size_t k = 0; k < width; ++k) total[k] += acc[k];
  }
  return total;
}

}  // namespace laughlin
