// Copyright 2026 The laughlin Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file plasma.hpp
 * @brief Metropolis sampling of |Psi_N|^2 on the cylinder.
 *
 * log|Psi_N|^2 = 2p sum_{j<k} log|e^{gamma z_k} - e^{gamma z_j}| - sum_k x_k^2,
 * evaluated in the factored form gamma max(x_j, x_k) + log|1 - e^{gamma(z_min - z_max)}|.
 */

#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "laughlin/lattice.hpp"

namespace laughlin {

struct PlasmaState {
  std::vector<double> x;
  std::vector<double> y;  ///< in [0, 2 pi R)
  double log_weight = -std::numeric_limits<double>::infinity();
};

/// log|e^{gamma z_k} - e^{gamma z_j}| without overflow; -inf at coincident points.
[[nodiscard]] double pair_log_modulus(double xj, double yj, double xk, double yk, double gamma) noexcept;

[[nodiscard]] double log_weight(std::span<const double> x, std::span<const double> y, const ModelParams& params);

/// Sorted form: -sum (x_(k) - (k-1) p gamma)^2 + 2p sum_{j<k} log|1 - e^{gamma(z_(j) - z_(k))}|.
/// Differs from log_weight by sum_k ((k-1) p gamma)^2.
[[nodiscard]] double log_weight_sorted(std::span<const double> x, std::span<const double> y,
                                      const ModelParams& params);

/// Wraps y into [0, 2 pi R).
[[nodiscard]] double wrap_y(double y, double gamma) noexcept;

struct McConfig {
  long sweeps = 20000;   ///< recorded sweeps per chain after burn-in (before thinning)
  long burn_in = 2000;
  long thinning = 1;
  double sigma_x = 0.5;
  double sigma_y = 0.5;
  std::uint64_t seed = 1;
  int chains = 4;
  bool tune = true;      ///< pilot runs towards 30-60% acceptance
  int batches = 50;      ///< batch means per chain

  void validate() const;
};

/// What to measure on every recorded sample.
struct McObservables {
  std::vector<double> bin_edges;  ///< x-histogram edges (increasing); empty to skip
  std::vector<int> excess_sites;  ///< k with xbar = (k - 1/2) p gamma
  int y_bins = 16;
};

/// Edges with `bins` equal bins covering [lo, hi].
[[nodiscard]] std::vector<double> uniform_edges(double lo, double hi, int bins);

struct Estimate {
  double mean = 0.0;
  double error = 0.0;  ///< standard error from batch means
};

struct ExcessStats {
  int k = 0;
  double xbar = 0.0;
  std::vector<int> K_values;         ///< -k ... N-k
  std::vector<Estimate> histogram;   ///< P(K = K_values[i])
  Estimate p_zero;                   ///< P(K = 0)
  std::vector<Estimate> tail;        ///< tail[n] = P(|K| >= n), n = 0 ... max
};

struct ChainSummary {
  std::uint64_t seed_index = 0;
  double sigma_x = 0.0;
  double sigma_y = 0.0;
  double acceptance = 0.0;
  bool pathological = false;  ///< acceptance < 1% or > 99%
};

struct McReport {
  ModelParams params;
  McConfig config;
  std::vector<ChainSummary> chains;
  long samples_per_chain = 0;
  std::vector<double> bin_edges;
  std::vector<Estimate> bin_counts;   ///< expected particle count per bin
  std::vector<Estimate> density;      ///< bin_counts / bin width (integrates to N)
  std::vector<ExcessStats> excess;
  std::vector<Estimate> y_marginal;   ///< fraction of particles per y bin
  double y_ks = 0.0;                  ///< max |empirical CDF - uniform CDF| of the y marginal
  double split_rhat = 0.0;            ///< on the log-weight trace
  bool flagged = false;               ///< any chain pathological
  double wall_seconds = 0.0;
};

/// K = #{j : x_j <= xbar} - k at xbar = (k - 1/2) p gamma.
[[nodiscard]] int particle_excess(std::span<const double> x, int k, int p, double gamma);

/// Independent chains (OpenMP over chains); chain c uses seed_seq{seed, c}.
[[nodiscard]] McReport metropolis_run(const ModelParams& params, const McConfig& config,
                                      const McObservables& observables);

/// One chain from a given state, returning every recorded state (for tests).
[[nodiscard]] std::vector<PlasmaState> metropolis_trace(const ModelParams& params, const McConfig& config,
                                                        int chain, long samples);

/// Initial state: x_k = (k-1) p gamma, y_k spread evenly.
[[nodiscard]] PlasmaState initial_state(const ModelParams& params);

/// Bulk density folded modulo p gamma. The bin width must divide p gamma.
struct OscillationReport {
  double amplitude = 0.0;       ///< half peak-to-peak of the period-folded bulk profile
  double folded_contrast = 0.0; ///< amplitude / standard error of the folded profile
  int period_bins = 0;
};

[[nodiscard]] OscillationReport bulk_oscillation(const McReport& report, double bulk_lo, double bulk_hi);

}  // namespace laughlin
