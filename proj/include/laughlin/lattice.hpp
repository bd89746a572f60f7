// Copyright 2026 The laughlin Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file lattice.hpp
 * @brief Orbital-lattice domain types: model parameters, basis labels,
 *        admissibility, renewal points and rod partitions.
 *
 * Orbital k is the lowest-Landau-level function centred at x = k*gamma
 * (magnetic length set to 1). N particles at inverse filling p live on the
 * lattice {0, ..., pN - p}.
 */

#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace laughlin {

struct ModelParams {
  int p = 3;
  double gamma = 1.0;
  int N = 1;

  ModelParams() = default;
  ModelParams(int p_, double gamma_, int N_);

  /// Odd p means fermions, even p bosons.
  [[nodiscard]] bool fermionic() const noexcept { return p % 2 == 1; }
  /// Largest orbital index, pN - p.
  [[nodiscard]] int max_orbital() const noexcept { return p * N - p; }
  /// Number of lattice sites carrying orbitals, pN - p + 1.
  [[nodiscard]] int num_orbitals() const noexcept { return p * N - p + 1; }
  /// Cylinder radius R = 1/gamma.
  [[nodiscard]] double radius() const noexcept { return 1.0 / gamma; }
  /// Same p and gamma, different particle count.
  [[nodiscard]] ModelParams with_N(int n) const { return {p, gamma, n}; }

  void validate() const;
};

/// Sorted orbital indices of N particles (strictly increasing for fermions).
class OrbitalConfig {
 public:
  OrbitalConfig() = default;
  explicit OrbitalConfig(std::vector<int> m);

  [[nodiscard]] std::span<const int> indices() const noexcept { return m_; }
  [[nodiscard]] const std::vector<int>& vec() const noexcept { return m_; }
  [[nodiscard]] std::size_t size() const noexcept { return m_.size(); }
  [[nodiscard]] int operator[](std::size_t i) const { return m_[i]; }
  [[nodiscard]] long long sum() const noexcept;
  [[nodiscard]] long long sum_squares() const noexcept;
  [[nodiscard]] bool has_repeats() const noexcept;
  [[nodiscard]] std::string to_string() const;

  auto operator<=>(const OrbitalConfig&) const = default;

 private:
  std::vector<int> m_;
};

struct OrbitalConfigHash {
  std::size_t operator()(const OrbitalConfig& c) const noexcept;
};

/// Occupation numbers n_0 ... n_{L-1}.
class OccupationConfig {
 public:
  OccupationConfig() = default;
  explicit OccupationConfig(std::vector<int> n);

  static OccupationConfig from_orbitals(const OrbitalConfig& m, int num_sites);
  [[nodiscard]] OrbitalConfig to_orbitals() const;

  [[nodiscard]] std::span<const int> counts() const noexcept { return n_; }
  [[nodiscard]] std::size_t num_sites() const noexcept { return n_.size(); }
  [[nodiscard]] int operator[](std::size_t k) const { return n_[k]; }
  [[nodiscard]] int particles() const noexcept;
  /// prod_k n_k!, the bosonic normalisation factor.
  [[nodiscard]] double factorial_product() const noexcept;

  auto operator<=>(const OccupationConfig&) const = default;

 private:
  std::vector<int> n_;
};

/// Tiling of {0, ..., pN-1} by rods of p*n_i sites, listed left to right.
class RodPartition {
 public:
  RodPartition() = default;
  explicit RodPartition(std::vector<int> lengths);

  [[nodiscard]] const std::vector<int>& lengths() const noexcept { return lengths_; }
  [[nodiscard]] int particles() const noexcept;
  [[nodiscard]] std::size_t num_rods() const noexcept { return lengths_.size(); }
  /// {0, p n_1, p(n_1+n_2), ..., pN}.
  [[nodiscard]] std::vector<int> renewal_set(int p) const;
  /// Inverse of renewal_set; the input must start at 0 and be strictly increasing multiples of p.
  static RodPartition from_renewal_set(std::span<const int> points, int p);
  [[nodiscard]] std::string to_string() const;

  auto operator<=>(const RodPartition&) const = default;

 private:
  std::vector<int> lengths_;
};

/// Throws InvalidArgument when m is not sorted (strictly for fermions) or out of range.
void require_canonical(const OrbitalConfig& m, const ModelParams& params);

/// Partial-sum dominance test with equality at k = N.
[[nodiscard]] bool is_admissible(const OrbitalConfig& m, const ModelParams& params);

/// Renewal points pk at which the dominance partial sum is tight. Includes 0 and pN.
[[nodiscard]] std::vector<int> renewal_points(const OrbitalConfig& m, const ModelParams& params);

/// Same set from the occupation-number criterion (particle count and first
/// moment of the sites left of pk).
[[nodiscard]] std::vector<int> renewal_points(const OccupationConfig& n, int p);

[[nodiscard]] RodPartition partition_of(const OrbitalConfig& m, const ModelParams& params);

/// Default cap on N for compositions; 2^(N-1) partitions are produced.
inline constexpr int kDefaultPartitionCap = 20;

/// All compositions of N in lexicographic order of the length sequence.
[[nodiscard]] std::vector<RodPartition> enumerate_partitions(int N, int cap = kDefaultPartitionCap);

/// Shift every orbital index by p * shift.
[[nodiscard]] OrbitalConfig translate_config(const OrbitalConfig& m, int p, int shift);

/// Depth-first enumeration of admissible canonical configs, lexicographic order.
[[nodiscard]] std::vector<OrbitalConfig> enumerate_admissible(const ModelParams& params);

/// p^2 * sum_{j<N} j^2, the root-config value of sum m_j^2.
[[nodiscard]] long long root_sum_squares(int p, int N) noexcept;

/// (0, p, 2p, ..., p(N-1)).
[[nodiscard]] OrbitalConfig root_config(int p, int N);

}  // namespace laughlin
