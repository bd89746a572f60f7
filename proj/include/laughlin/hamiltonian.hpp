// Copyright 2026 The laughlin Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file hamiltonian.hpp
 * @brief Parent Hamiltonian on the orbital lattice, the monomer-dimer model,
 *        the Tao-Thouless state and its perturbation series.
 *
 * Operators act on a fixed-N Fock sector spanned by occupation states
 * |n> = c*_{m_1} ... c*_{m_N}|0> with m increasing. All matrices are real.
 */

#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "laughlin/eigensolver.hpp"
#include "laughlin/expansion.hpp"

namespace laughlin {

/// Physicists' Hermite polynomial H_n(t).
[[nodiscard]] double hermite(int n, double t) noexcept;

enum class FormFactorVariant { ParityMatched, FullSum };

class FormFactor {
 public:
  FormFactor(int p, double gamma, FormFactorVariant variant = FormFactorVariant::ParityMatched);

  /// F(t) = sum_k H_k(t) e^{-t^2/4}.
  [[nodiscard]] double operator()(double t) const noexcept;
  [[nodiscard]] int p() const noexcept { return p_; }
  [[nodiscard]] double gamma() const noexcept { return gamma_; }
  [[nodiscard]] FormFactorVariant variant() const noexcept { return variant_; }

 private:
  int p_;
  double gamma_;
  FormFactorVariant variant_;
};

[[nodiscard]] double form_factor(double t, const ModelParams& params,
                                 FormFactorVariant variant = FormFactorVariant::ParityMatched);

inline constexpr std::size_t kSectorCap = 200000;

class SectorBasis {
 public:
  /// Every N-particle occupation state on `num_sites` sites, in lexicographic
  /// order of the sorted orbital list. `momentum` keeps only states with
  /// sum of orbitals equal to it.
  static SectorBasis build(int num_sites, int N, bool fermionic, std::optional<long long> momentum = std::nullopt,
                           std::size_t cap = kSectorCap);
  /// The sector on {0, ..., pN - p}.
  static SectorBasis for_model(const ModelParams& params, std::optional<long long> momentum = std::nullopt,
                               std::size_t cap = kSectorCap);

  [[nodiscard]] std::size_t size() const noexcept { return states_.size(); }
  [[nodiscard]] int num_sites() const noexcept { return num_sites_; }
  [[nodiscard]] int particles() const noexcept { return N_; }
  [[nodiscard]] bool fermionic() const noexcept { return fermionic_; }
  [[nodiscard]] const std::vector<OrbitalConfig>& states() const noexcept { return states_; }
  [[nodiscard]] const OrbitalConfig& operator[](std::size_t i) const { return states_[i]; }
  [[nodiscard]] std::optional<std::size_t> index_of(const OrbitalConfig& m) const;

 private:
  int num_sites_ = 0;
  int N_ = 0;
  bool fermionic_ = true;
  std::vector<OrbitalConfig> states_;
  std::unordered_map<OrbitalConfig, std::size_t, OrbitalConfigHash> index_;
};

struct SparseOperator {
  SparseMatrix matrix;

  [[nodiscard]] Eigen::Index rows() const noexcept { return matrix.rows(); }
  [[nodiscard]] Eigen::Index cols() const noexcept { return matrix.cols(); }
  [[nodiscard]] Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
  [[nodiscard]] Eigen::MatrixXd dense() const { return Eigen::MatrixXd(matrix); }
  /// max |H_ij - H_ji|.
  [[nodiscard]] double max_asymmetry() const;
  [[nodiscard]] double max_abs_entry() const;
};

/// max |A_ij - B_ij|; throws InvalidArgument on shape mismatch.
[[nodiscard]] double max_entry_difference(const SparseOperator& a, const SparseOperator& b);

/// Result of applying a normal-ordered monomial to a basis state.
struct MonomialImage {
  OrbitalConfig state;
  double coefficient = 0.0;
};

/// c*_{creators[0]} ... c_{annihilators[0]} ... |m>, rightmost factor first.
/// Empty when the image vanishes.
[[nodiscard]] std::optional<MonomialImage> apply_monomial(const OrbitalConfig& m, std::span<const int> creators,
                                                          std::span<const int> annihilators, bool fermionic);

struct HamiltonianBuild {
  SparseOperator pairwise;  ///< ordered four-index sum
  SparseOperator bond;      ///< sum_s B_s* B_s
  double max_deviation = 0.0;
};

[[nodiscard]] SparseOperator build_H_pairwise(const SectorBasis& basis, const FormFactor& F);
[[nodiscard]] SparseOperator build_H_bond(const SectorBasis& basis, const FormFactor& F);
[[nodiscard]] HamiltonianBuild build_H(const ModelParams& params, const SectorBasis& basis,
                                       FormFactorVariant variant = FormFactorVariant::ParityMatched);

/// Psi_N in the sector basis (occupation-basis amplitudes; zero off the table).
[[nodiscard]] Eigen::VectorXd sector_vector(const AmplitudeTable& table, const SectorBasis& basis);

struct KernelInfo {
  int dimension = 0;
  std::vector<double> lowest;  ///< eigenvalues found, ascending
  double threshold = 0.0;
};

/// Eigenvalues at most `relative_tolerance * max(1, max|H_ij|)` count as zero.
[[nodiscard]] KernelInfo kernel_dimension(const SparseOperator& H, double relative_tolerance = 1e-9,
                                          const LanczosOptions& options = {});

struct GroundCheck {
  double residual = 0.0;  ///< ||H psi|| / ||psi||
  KernelInfo kernel;
};

/// Throws InvalidArgument for a zero vector or mismatched dimensions.
[[nodiscard]] GroundCheck ground_check(const SparseOperator& H, const Eigen::VectorXd& psi, bool with_kernel = true);

/// Lowest `count` eigenvalues (Lanczos).
[[nodiscard]] std::vector<double> spectrum(const SparseOperator& H, int count, const LanczosOptions& options = {});

// Monomer-dimer model (p = 3) ---------------------------------------------------------

struct MonomerDimer {
  SectorBasis basis;
  SparseOperator H;            ///< n n terms plus D*_j D_j
  SparseOperator H_expanded;   ///< four-term expanded form
  Eigen::VectorXd psi;         ///< Psi^MD
  std::size_t terms = 0;       ///< number of monomer-dimer partitions
};

/// Throws InvalidArgument unless p = 3.
[[nodiscard]] MonomerDimer build_monomer_dimer(const ModelParams& params);

// Tao-Thouless state and perturbation series (p = 3) ---------------------------------

[[nodiscard]] Eigen::VectorXd tao_thouless(const ModelParams& params, const SectorBasis& basis);
/// e^{-gamma^2/2} n_k n_{k+1} + 4 e^{-2 gamma^2} n_k n_{k+2}.
[[nodiscard]] SparseOperator build_HTT(const ModelParams& params, const SectorBasis& basis);
/// Factor relating H_L to the normalisation of H^TT: the n_k n_{k+1} coefficient
/// of H_L is 16 gamma^2 e^{-gamma^2/2}.
[[nodiscard]] double tt_normalisation(double gamma) noexcept;

struct PerturbationResult {
  std::vector<Eigen::VectorXd> partial_sums;  ///< order 0 ... order
  std::vector<double> distance;               ///< ||S_n - Psi_N|| / ||Psi_N||, Psi_N with <Psi^TT, Psi_N> = 1
  bool decreasing = true;
  bool diverging = false;                     ///< last distance larger than the first
};

/// Throws VerificationFailure if the restriction of H^TT off Psi^TT is singular.
[[nodiscard]] PerturbationResult perturbation_series(const ModelParams& params, int order);

}  // namespace laughlin
