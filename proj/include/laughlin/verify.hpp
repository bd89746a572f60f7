// Copyright 2026 The laughlin Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file verify.hpp
 * @brief Self-checks: the parameterised verification suite and the fixed
 *        acceptance criteria.
 */

#pragma once

#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "laughlin/lattice.hpp"

namespace laughlin {

struct CheckResult {
  std::string id;
  std::string title;
  bool passed = false;
  bool skipped = false;
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t seed = 1;
  bool override_unconverged = false;
  /// Called after each check, for incremental printing.
  std::function<void(const CheckResult&)> on_result;
};

/// Checks for one (p, gamma, Nmax): expansion, renewal, correlations and,
/// where the sector is small, Hamiltonian ground states.
[[nodiscard]] std::vector<CheckResult> verify_all(int p, double gamma, int Nmax, const VerifyOptions& options = {});

struct AcceptanceOptions {
  std::uint64_t seed = 20261019;
  long mc_sweeps_small = 20000;  ///< p=3, N=4 run
  long mc_sweeps_large = 20000;  ///< N=32 run
  double mc_time_limit = 600.0;  ///< seconds
  std::set<int> only;            ///< empty runs all
  std::function<void(const CheckResult&)> on_result;
};

inline constexpr int kAcceptanceCriteria = 12;

[[nodiscard]] std::vector<CheckResult> run_acceptance(const AcceptanceOptions& options = {});

/// "PASS  3  title: detail" style line.
[[nodiscard]] std::string format_result(const CheckResult& r);

}  // namespace laughlin
