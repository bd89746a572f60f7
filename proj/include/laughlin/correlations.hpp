// Copyright 2026 The laughlin Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file correlations.hpp
 * @brief Finite-N and infinite-volume expectations of the Laughlin state.
 *
 * The occupation basis |n> = c*_{m_1} ... c*_{m_N}|0> uses increasing
 * orbital order, so for fermions c_j picks up (-1)^{sum_{i<j} n_i}. Orbital
 * functions follow
 *   psi_k(x, y) = e^{i k gamma y} e^{-(x - k gamma)^2 / 2} / sqrt(2 pi R sqrt(pi)).
 */

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "laughlin/expansion.hpp"
#include "laughlin/renewal.hpp"

namespace laughlin {

// Finite N ----------------------------------------------------------------------

/// <n_k> for k = 0 ... pN - p (OpenMP, deterministic blocked reduction).
[[nodiscard]] std::vector<double> occupation_finite(const AmplitudeTable& table);
/// Serial reference for occupation_finite.
[[nodiscard]] std::vector<double> occupation_finite_serial(const AmplitudeTable& table);

/// <prod_i n_{s_i}> with repeated sites allowed.
[[nodiscard]] double diagonal_moment(const AmplitudeTable& table, std::span<const int> sites);

/// Wick-ordered monomial c*_{creators[0]} c*_{creators[1]} ... c_{annihilators[0]} c_{annihilators[1]} ...
struct Observable {
  std::vector<int> creators;
  std::vector<int> annihilators;

  static Observable number(int k);
  /// c*_{k1} c*_{k2} c_{n2} c_{n1}.
  static Observable pair_hop(int k1, int k2, int n2, int n1);
  /// Tokens "c*K" and "cK" separated by spaces, creators first.
  static Observable parse(const std::string& text);
  [[nodiscard]] std::string to_string() const;
};

/// Throws InvalidArgument for malformed observables (unequal creator and
/// annihilator counts, empty, negative sites).
[[nodiscard]] double moments_finite(const AmplitudeTable& table, const Observable& observable);

// Quasi-state decomposition ---------------------------------------------------------

struct QuasiStateDecomposition {
  ModelParams params;
  std::vector<OccupationConfig> basis;   ///< configs of the amplitude table
  std::vector<double> amplitudes;        ///< A_N(n) on the basis
  double norm = 0.0;                     ///< C_N
  std::vector<RodPartition> partitions;  ///< all of P_N, lexicographic
  std::vector<double> weights;           ///< p_N(X) = ||u_X||^2 / C_N
  std::vector<Eigen::MatrixXd> omega;    ///< omega_X; empty when p_N(X) = 0

  [[nodiscard]] Eigen::MatrixXd reconstruction() const;  ///< sum_X p_N(X) omega_X
  [[nodiscard]] Eigen::MatrixXd projector() const;       ///< |Psi><Psi| / C_N
  [[nodiscard]] double reconstruction_error() const;     ///< max-norm difference
  [[nodiscard]] std::optional<std::size_t> index_of(const RodPartition& X) const;
  [[nodiscard]] std::optional<std::size_t> basis_index(const OccupationConfig& n) const;
  /// omega_X(a) for a diagonal observable given by its values on the basis.
  [[nodiscard]] double diagonal_expectation(std::size_t X, std::span<const double> values) const;
};

inline constexpr std::size_t kQuasiStateMaxDim = 2000;

[[nodiscard]] QuasiStateDecomposition quasi_state(const AmplitudeTable& table,
                                                  std::size_t max_dim = kQuasiStateMaxDim);

// Rods and the infinite-volume state -----------------------------------------------

struct RodExpectations {
  int p = 1;
  std::vector<double> alpha;                ///< alpha[n]
  std::vector<std::vector<double>> nu;      ///< nu[n][s], s < pn; empty if skipped
  std::vector<std::vector<double>> pair;    ///< pair[n][s * pn + t] = rod value of n_s n_t
  std::vector<int> skipped;                 ///< rod sizes with alpha_n = 0

  [[nodiscard]] int max_n() const noexcept { return static_cast<int>(nu.size()) - 1; }
  [[nodiscard]] bool available(int n) const noexcept {
    return n >= 1 && n <= max_n() && !nu[static_cast<std::size_t>(n)].empty();
  }
  [[nodiscard]] double nu_at(int n, int s) const;
  [[nodiscard]] double pair_at(int n, int s, int t) const;
};

/// Per-rod occupations and pair moments from irreducible configs; `tables[i]` holds N = i + 1.
[[nodiscard]] RodExpectations rod_expectations(std::span<const AmplitudeTable> tables);

/// <n_k> for k = 0 ... p-1; period-p extension gives all k.
[[nodiscard]] std::vector<double> occupation_infinite(const RenewalModel& model, const RodExpectations& rods,
                                                      bool override_unconverged = false);

struct PairCorrelation {
  double moment = 0.0;     ///< <n_k n_l>
  double product = 0.0;    ///< <n_k><n_l>
  double truncated = 0.0;  ///< moment - product
  double error_estimate = 0.0;
};

[[nodiscard]] PairCorrelation pair_infinite(const RenewalModel& model, const RodExpectations& rods, int k, int l,
                                            bool override_unconverged = false);

struct FiniteInfiniteComparison {
  double finite_table = 0.0;    ///< from the amplitude table
  double finite_renewal = 0.0;  ///< sum u_j p_n u_{N-j-n} / u_N nu_n(k - pj)
  double infinite = 0.0;
  double epsilon = 0.0;         ///< bound on |finite - infinite| from renewal terms
};

/// Site k of the N-particle system against the infinite-volume value.
/// The model and rods must cover all n <= N.
[[nodiscard]] FiniteInfiniteComparison compare_finite_infinite(const AmplitudeTable& table,
                                                               const RenewalModel& model,
                                                               const RodExpectations& rods, int k);

// Continuum --------------------------------------------------------------------------

struct OccupationProfile {
  std::vector<double> values;
  int first_site = 0;
  bool periodic = false;  ///< values has length p and repeats
  [[nodiscard]] double at(int k) const;
};

[[nodiscard]] OccupationProfile finite_profile(std::vector<double> occupations);
[[nodiscard]] OccupationProfile periodic_profile(std::vector<double> occupations);

/// rho_1(x) = (2 pi R)^{-1} pi^{-1/2} sum_k <n_k> exp(-(x - k gamma)^2).
[[nodiscard]] std::vector<double> density_profile(const OccupationProfile& occupations, std::span<const double> x,
                                                  double gamma);

/// rho_1(z; z') = sum_k <n_k> psi_k(z) conj(psi_k(z')).
[[nodiscard]] std::complex<double> one_particle_matrix(const OccupationProfile& occupations, double gamma, double x,
                                                       double y, double xp, double yp);

struct OffDiagonalGrid {
  double x_min = -2.0;
  double x_max = 8.0;
  int nx = 41;
  int ny = 8;
};

struct OffDiagonalReport {
  double K_fit = 0.0;       ///< max over the grid of |rho_1(z;z')| e^{(x-x')^2/4}
  double K_analytic = 0.0;  ///< (2 pi R sqrt(pi))^{-1} sup_c sum_k <n_k> e^{-(c - k gamma)^2}
  std::size_t points = 0;
  bool passed = false;      ///< K_fit <= K_analytic
};

[[nodiscard]] OffDiagonalReport offdiag_bound_check(const AmplitudeTable& table, const OffDiagonalGrid& grid = {});

// Finite domains --------------------------------------------------------------------

/// ||psi_k||^2_Lambda for Lambda = [a, b] x [0, 2 pi R], k = 0 ... num_sites - 1.
[[nodiscard]] std::vector<double> orbital_domain_weights(int num_sites, double gamma, double a, double b);

struct DomainResult {
  double a = 0.0;
  double b = 0.0;
  std::vector<double> weights;      ///< w_k
  double norm = 0.0;                ///< C_N^Lambda
  std::vector<double> occupations;  ///< <c*_k J c_k> / <J>
};

/// Throws InvalidArgument for an empty domain (a >= b).
[[nodiscard]] DomainResult domain_weighted(const AmplitudeTable& table, double a, double b);

/// P(m particles have x < xbar), m = 0 ... N.
[[nodiscard]] std::vector<double> particle_count_distribution(const AmplitudeTable& table, double xbar);

/// Expected particle count in each bin [edges[i], edges[i+1]).
[[nodiscard]] std::vector<double> expected_bin_counts(const OccupationProfile& occupations, double gamma,
                                                      std::span<const double> edges);

// Periodicity -------------------------------------------------------------------------

struct PeriodTestOptions {
  double tolerance = 1e-8;
  double margin_factor = 10.0;
  int pair_distance_max = 0;  ///< 0 selects 2p
};

struct PeriodTestResult {
  int period = 1;
  double margin = 0.0;  ///< smallest deviation among shifts shorter than the period
  bool conclusive = false;
  bool used_pair_moments = false;
  std::vector<double> occupation_deviation;  ///< index s = shift, s = 1 ... p-1
  std::vector<double> pair_deviation;
};

/// `occupations` is one period (length p); `pair_rows[k]` lists correlations
/// attached to site k (same length for every k), used when occupations are flat.
[[nodiscard]] PeriodTestResult period_test(std::span<const double> occupations,
                                           std::span<const std::vector<double>> pair_rows,
                                           const PeriodTestOptions& options = {});

[[nodiscard]] PeriodTestResult period_test(const RenewalModel& model, const RodExpectations& rods,
                                           const PeriodTestOptions& options = {},
                                           bool override_unconverged = false);

// Reports ----------------------------------------------------------------------------

struct CorrelationRow {
  std::string quantity;
  double coordinate = 0.0;
  double value = 0.0;
  std::string source;  ///< "finite", "infinite" or "domain"
  double error_estimate = 0.0;
};

struct CorrelationReport {
  int p = 1;
  double gamma = 1.0;
  std::optional<int> N;  ///< empty for infinite volume
  std::optional<std::pair<double, double>> domain;
  std::vector<CorrelationRow> rows;
};

}  // namespace laughlin
