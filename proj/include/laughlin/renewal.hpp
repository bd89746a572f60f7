// Copyright 2026 The laughlin Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file renewal.hpp
 * @brief Renewal-process description of the state: norms C_N, irreducible
 *        weights alpha_n, activity r, waiting-time law p_n = alpha_n r^n,
 *        renewal function u_N = C_N r^N and partition probabilities.
 *
 * Sequences are indexed by particle number: element n holds the value for n,
 * element 0 is a placeholder (C_0 = u_0 = 1, alpha_0 = p_0 = 0).
 */

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "laughlin/expansion.hpp"

namespace laughlin {

struct NormSequence {
  std::vector<double> C;  ///< C[0] = 1, C[N] = ||Psi_N||^2

  [[nodiscard]] int max_N() const noexcept { return static_cast<int>(C.size()) - 1; }
  [[nodiscard]] double operator[](int N) const { return C.at(static_cast<std::size_t>(N)); }
};

/// C_N from amplitude tables; `tables[i]` must hold N = i + 1.
[[nodiscard]] NormSequence norms(std::span<const AmplitudeTable> tables);

struct IrreducibleWeights {
  std::vector<double> alpha;            ///< direct sum over irreducible configs
  std::vector<double> alpha_recursive;  ///< alpha_N = C_N - sum_{k<N} alpha_k C_{N-k}
  double max_residual = 0.0;            ///< max relative |direct - recursive|
};

/// Throws VerificationFailure when the two routes differ by more than `tolerance` (relative to C_n).
[[nodiscard]] IrreducibleWeights irreducible_weights(const NormSequence& norms,
                                                     std::span<const AmplitudeTable> tables,
                                                     double tolerance = 1e-10);

struct ActivitySolution {
  double r = 1.0;
  double mu = 1.0;
  /// Geometric extrapolation of the waiting-time mass beyond the truncation,
  /// p_M q / (1 - q) with q = p_M / p_{M-1}; infinite when q >= 1.
  double tail_mass = 0.0;
  /// Same extrapolation for the first moment, sum_{n > M} n p_n.
  double tail_moment = 0.0;
  /// r(M-1) - r(M): shift of the root when the last weight is dropped.
  double root_bias = 0.0;
  /// |r - r_ext| from the extended-precision recheck (0 when not requested).
  double extended_precision_delta = 0.0;
};

/// Bisection for sum_n alpha_n r^n = 1 on (0, 1] to relative tolerance 1e-12.
/// Throws UnconvergedModel when no root exists in (0, 1].
[[nodiscard]] ActivitySolution solve_activity(std::span<const double> alpha, bool extended_precision = false);

inline constexpr double kDefaultTailThreshold = 0.01;

struct RenewalOptions {
  double alpha_tolerance = 1e-10;
  double tail_threshold = kDefaultTailThreshold;
  bool extended_precision = false;
};

struct RenewalModel {
  int p = 1;
  double gamma = 1.0;
  NormSequence norms;
  std::vector<double> alpha;
  double alpha_residual = 0.0;
  double r = 1.0;
  double mu = 1.0;
  std::vector<double> pn;  ///< p_n = alpha_n r^n
  std::vector<double> uN;  ///< u_N = C_N r^N, uN[0] = 1
  double tail_mass = 0.0;
  double tail_moment = 0.0;
  double root_bias = 0.0;
  double extended_precision_delta = 0.0;
  double c_sub = 1.0;  ///< max C_{N+M} / (C_N C_M) over computed pairs
  bool converged = true;

  [[nodiscard]] int max_N() const noexcept { return static_cast<int>(alpha.size()) - 1; }
  /// Throws UnconvergedModel unless converged or `override_unconverged`.
  void require_converged(bool override_unconverged) const;
};

[[nodiscard]] RenewalModel build_renewal_model(std::span<const AmplitudeTable> tables,
                                               const RenewalOptions& options = {});
/// Expands and builds the model for N = 1 ... params.N.
[[nodiscard]] RenewalModel build_renewal_model(const ModelParams& params, const RenewalOptions& options = {},
                                               const ExpansionLimits& limits = {});

/// Root and mean only, for toy alpha sequences (no norms attached).
[[nodiscard]] RenewalModel renewal_model_from_alpha(std::span<const double> alpha);

struct RenewalFunctionReport {
  std::vector<double> u_direct;       ///< C_N r^N
  std::vector<double> u_convolution;  ///< u_N = sum_k p_k u_{N-k}
  double max_discrepancy = 0.0;
  /// sup_dev[d] = sup_{d <= k <= Nmax} |u_k - 1/mu|
  std::vector<double> sup_deviation;
};

[[nodiscard]] RenewalFunctionReport renewal_function(const RenewalModel& model);

/// u_k for any k >= 0: table value when k <= Nmax, otherwise the convolution
/// recursion driven by the truncated p_n.
[[nodiscard]] double renewal_u(const RenewalModel& model, int k);
[[nodiscard]] std::vector<double> renewal_u_sequence(const RenewalModel& model, int kmax);

/// p_N(X) = prod alpha_{n_i} / C_N.
[[nodiscard]] double partition_probability(const RodPartition& X, const RenewalModel& model, int N);

/// Renewal at a reference point followed by `left` rods; optionally a gap of
/// `gap` particles bridged by the renewal function and then `right` rods.
struct StationaryEvent {
  std::vector<int> left;
  std::optional<int> gap;
  std::vector<int> right;
};

/// mu^{-1} prod p_left, or mu^{-1} prod p_left u_gap prod p_right.
[[nodiscard]] double stationary_event_probability(const StationaryEvent& event, const RenewalModel& model);

struct LongIntervalCheck {
  double exact = 0.0;  ///< P_N(no renewal point in {alpha, ..., beta-1})
  double bound = 0.0;  ///< c_sub * sum_{k >= d} k p_k
  int d = 0;
};

/// Exact finite-N probability from the renewal decomposition
/// sum_{j,n} u_j p_n u_{N-j-n} / u_N over rods covering the window.
[[nodiscard]] LongIntervalCheck long_interval_check(const RenewalModel& model, int N, int window_start,
                                                    int window_end);

}  // namespace laughlin
