// Copyright 2026 The laughlin Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file expansion.hpp
 * @brief Exact monomial expansion of prod_{j<k} (Z_k - Z_j)^p and the
 *        Gaussian-weighted orbital amplitudes a_N(m).
 *
 * Coefficients are stored on canonical (weakly increasing) exponent vectors.
 * For odd p the stored value is the coefficient of Z_1^{m_1} ... Z_N^{m_N}
 * with m strictly increasing and factors ordered (Z_k - Z_j), j < k; for even
 * p it is the coefficient of the monomial symmetric function m_lambda.
 *
 * The production kernel builds the N-particle table from the (N-1)-particle
 * table by peeling off one variable: the factors containing Z_1 (or Z_N) are
 * expanded binomially and the remaining (N-1)-variable polynomial is again a
 * Laughlin polynomial, whose coefficient is looked up after sorting.
 */

#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <complex>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "laughlin/lattice.hpp"

namespace laughlin {

using BigInt = boost::multiprecision::cpp_int;

/// Default particle-number cap for exact expansion at a given p.
[[nodiscard]] int default_expansion_cap(int p) noexcept;

struct ExpansionLimits {
  int max_N = 0;                       ///< 0 selects default_expansion_cap(p)
  std::size_t max_configs = 5'000'000;  ///< admissible configs per table
};

class CoefficientTable {
 public:
  CoefficientTable() = default;
  /// Entries must be admissible canonical keys in sorted order; zero coefficients are dropped.
  CoefficientTable(ModelParams params, std::vector<OrbitalConfig> keys, std::vector<BigInt> coeffs);

  [[nodiscard]] const ModelParams& params() const noexcept { return params_; }
  [[nodiscard]] std::size_t size() const noexcept { return keys_.size(); }
  [[nodiscard]] const std::vector<OrbitalConfig>& keys() const noexcept { return keys_; }
  [[nodiscard]] const std::vector<BigInt>& coefficients() const noexcept { return coeffs_; }

  /// Coefficient of a canonical key, zero when absent.
  [[nodiscard]] BigInt coefficient(const OrbitalConfig& m) const;
  [[nodiscard]] const BigInt* find(const OrbitalConfig& m) const;
  [[nodiscard]] const BigInt* find(std::span<const int> m) const;

  friend bool operator==(const CoefficientTable& a, const CoefficientTable& b);

 private:
  ModelParams params_;
  std::vector<OrbitalConfig> keys_;
  std::vector<BigInt> coeffs_;
  std::unordered_map<OrbitalConfig, std::size_t, OrbitalConfigHash> index_;
};

/// One orbital configuration with its amplitudes.
struct AmplitudeEntry {
  OrbitalConfig m;
  OccupationConfig n;
  RodPartition partition;
  double a = 0.0;  ///< a_N(m) = c_N(m) * exp((gamma^2/2)(sum m^2 - root sum m^2))
  double A = 0.0;  ///< occupation-basis amplitude a / sqrt(prod n_k!)
};

class AmplitudeTable {
 public:
  AmplitudeTable() = default;
  AmplitudeTable(ModelParams params, std::vector<AmplitudeEntry> entries);

  [[nodiscard]] const ModelParams& params() const noexcept { return params_; }
  [[nodiscard]] const std::vector<AmplitudeEntry>& entries() const noexcept { return entries_; }
  [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
  /// C_N = sum_n A_N(n)^2, the squared norm on the infinite cylinder.
  [[nodiscard]] double norm() const noexcept { return norm_; }
  [[nodiscard]] int num_sites() const noexcept { return params_.num_orbitals(); }

 private:
  ModelParams params_;
  std::vector<AmplitudeEntry> entries_;
  double norm_ = 0.0;
};

/// Single-step kernel: table for N from the table for N-1 (OpenMP parallel over configs).
[[nodiscard]] CoefficientTable expand_step(const CoefficientTable& previous, const ExpansionLimits& limits = {});
/// Serial reference implementation of expand_step.
[[nodiscard]] CoefficientTable expand_step_serial(const CoefficientTable& previous,
                                                  const ExpansionLimits& limits = {});

/// Coefficient table for params.N (computes all smaller tables on the way).
[[nodiscard]] CoefficientTable expand(const ModelParams& params, const ExpansionLimits& limits = {});
/// Tables for N = 1 ... params.N; element i holds N = i + 1.
[[nodiscard]] std::vector<CoefficientTable> expand_sequence(const ModelParams& params,
                                                            const ExpansionLimits& limits = {});

/// Brute force: multiply the N(N-1)/2 binomially expanded factors one by one
/// and read off the canonical monomials. Exponential cost; N <= 6.
[[nodiscard]] CoefficientTable expand_by_multiplication(const ModelParams& params);

[[nodiscard]] AmplitudeTable amplitudes(const CoefficientTable& table);
[[nodiscard]] AmplitudeTable amplitudes(const CoefficientTable& table, double gamma);

/// Gaussian factor exp((gamma^2/2)(sum m^2 - p^2 sum (j-1)^2)); at most 1 for admissible m.
[[nodiscard]] double gaussian_weight(const OrbitalConfig& m, int p, double gamma);

struct ProductRuleReport {
  std::size_t checked = 0;     ///< number of (key, split) pairs tested
  std::size_t factorizable = 0;  ///< keys with at least one interior renewal point
  std::vector<std::string> violations;
  [[nodiscard]] bool passed() const noexcept { return violations.empty(); }
};

/// Checks c_N(m) = c_k(m_1..m_k) c_{N-k}(m_{k+1}-pk, ..., m_N-pk) at every
/// interior renewal point. `tables[i]` must hold N = i + 1 for all i < N.
[[nodiscard]] ProductRuleReport verify_product_rule(std::span<const CoefficientTable> tables);

/// Worst relative deviation between sum_m c(m) (anti)symmetrised monomial and
/// the directly multiplied product at each point.
[[nodiscard]] double evaluate_oracle(const CoefficientTable& table,
                                     std::span<const std::vector<std::complex<double>>> points);

/// Random points with moduli in [0.6, 1.4] and uniform phases.
[[nodiscard]] std::vector<std::vector<std::complex<double>>> random_oracle_points(int N, int count,
                                                                                  std::uint64_t seed);

// Cache -----------------------------------------------------------------------

inline constexpr const char* kCacheMagic = "LAUGHLIN-COEFF";
inline constexpr int kCacheVersion = 1;

void save_cache(const CoefficientTable& table, const std::filesystem::path& path);
/// Throws CacheError on version/metadata mismatch, malformed entries or checksum failure.
[[nodiscard]] CoefficientTable load_cache(const std::filesystem::path& path,
                                          std::optional<int> expected_p = std::nullopt,
                                          std::optional<int> expected_N = std::nullopt);
/// Conventional file name inside a cache directory, e.g. "coeff_p3_N6.txt".
[[nodiscard]] std::string cache_file_name(int p, int N);

/// 64-bit FNV-1a digest, the running checksum of the cache format.
[[nodiscard]] std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 1469598103934665603ULL) noexcept;

}  // namespace laughlin
