// Copyright 2026 The laughlin Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file eigensolver.hpp
 * @brief Lanczos iteration with full reorthogonalisation and locking, for the
 *        lowest eigenpairs of small symmetric sparse operators.
 *
 * Converged Ritz vectors are locked and later Krylov spaces are kept
 * orthogonal to them, so degenerate eigenvalues are returned with their
 * multiplicity.
 */

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <functional>
#include <vector>

namespace laughlin {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct LanczosOptions {
  double tolerance = 1e-10;   ///< residual ||H v - theta v|| relative to max(1, ||H||)
  int max_restarts = 200;
  int krylov_dim = 60;        ///< per restart, capped by the free dimension
  std::uint64_t seed = 12345;
};

struct EigenResult {
  std::vector<double> values;            ///< ascending
  std::vector<Eigen::VectorXd> vectors;
  std::vector<double> residuals;
  int matvecs = 0;
  bool converged = false;
};

/// Lowest `count` eigenpairs of the symmetric operator given by `matvec`.
/// Throws VerificationFailure when `count` pairs do not converge.
[[nodiscard]] EigenResult lanczos_lowest(const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& matvec,
                                         Eigen::Index dim, int count, const LanczosOptions& options = {});

[[nodiscard]] EigenResult lanczos_lowest(const SparseMatrix& H, int count, const LanczosOptions& options = {});

/// Dense reference: all eigenvalues, ascending.
[[nodiscard]] std::vector<double> dense_eigenvalues(const SparseMatrix& H);

}  // namespace laughlin
