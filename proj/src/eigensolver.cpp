// Copyright 2026 The laughlin Authors
// SPDX-License-Identifier: Apache-2.0

#include "laughlin/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "laughlin/errors.hpp"

namespace laughlin {

namespace {

// Two passes of Gram-Schmidt against the union of both sets. Treating the sets
// one after the other lets the locked component grow geometrically.
void orthogonalize(Eigen::VectorXd& v, const std::vector<Eigen::VectorXd>& first,
                   const std::vector<Eigen::VectorXd>& second = {}) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& b : first) v -= b.dot(v) * b;
    for (const auto& b : second) v -= b.dot(v) * b;
  }
}

}  // namespace

EigenResult lanczos_lowest(const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& matvec,
                           Eigen::Index dim, int count, const LanczosOptions& options) {
  if (count < 1 || count > dim) throw InvalidArgument("lanczos: eigenvalue count must be in [1, dim]");
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss;

  EigenResult res;
  std::vector<Eigen::VectorXd> locked;
  Eigen::VectorXd w(dim);

  // Norm estimate for scale-aware tolerances.
  double scale = 1.0;
  {
    Eigen::VectorXd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v(i) = gauss(rng);
    v.normalize();
    for (int it = 0; it < 20; ++it) {
      matvec(v, w);
      ++res.matvecs;
      const double nrm = w.norm();
      if (nrm == 0.0) break;
      scale = std::max(scale, nrm);
      v = w / nrm;
    }
  }
  const double tol = options.tolerance * scale;

  Eigen::VectorXd start(dim);
  for (Eigen::Index i = 0; i < dim; ++i) start(i) = gauss(rng);

  int restarts = 0;
  while (static_cast<int>(locked.size()) < count) {
    const Eigen::Index free_dim = dim - static_cast<Eigen::Index>(locked.size());
    const int m = static_cast<int>(std::min<Eigen::Index>(options.krylov_dim, free_dim));

    orthogonalize(start, locked);
    if (start.norm() < 1e-12) {
      for (Eigen::Index i = 0; i < dim; ++i) start(i) = gauss(rng);
      orthogonalize(start, locked);
    }
    // Rayleigh-Ritz on the full projection V^T H V; the three-term relation is
    // only used to generate the basis, so a near-breakdown cannot corrupt the
    // Ritz values.
    std::vector<Eigen::VectorXd> V;
    std::vector<Eigen::VectorXd> HV;
    V.push_back(start.normalized());
    for (int j = 0; j < m; ++j) {
      matvec(V[static_cast<std::size_t>(j)], w);
      ++res.matvecs;
      HV.push_back(w);
      orthogonalize(w, locked, V);
      const double b = w.norm();
      if (j + 1 == m || b < 1e-10 * scale) break;
      V.push_back(w / b);
    }

    const auto k = static_cast<Eigen::Index>(V.size());
    Eigen::MatrixXd T(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
      for (Eigen::Index j = 0; j <= i; ++j) {
        const double tij = 0.5 * (V[static_cast<std::size_t>(i)].dot(HV[static_cast<std::size_t>(j)]) +
                                  V[static_cast<std::size_t>(j)].dot(HV[static_cast<std::size_t>(i)]));
        T(i, j) = T(j, i) = tij;
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);

    // Only the lowest Ritz pair is locked per cycle, so that a degenerate
    // partner is never skipped in favour of a higher converged pair.
    Eigen::VectorXd x = Eigen::VectorXd::Zero(dim);
    for (Eigen::Index i = 0; i < k; ++i) x += es.eigenvectors()(i, 0) * V[static_cast<std::size_t>(i)];
    orthogonalize(x, locked);
    x.normalize();
    matvec(x, w);
    ++res.matvecs;
    const double theta = x.dot(w);
    const double resid = (w - theta * x).norm();
    if (resid > tol) {
      if (++restarts > options.max_restarts) {
        throw VerificationFailure("lanczos: no convergence after " + std::to_string(options.max_restarts) +
                                  " restarts");
      }
      start = x;
    } else {
      locked.push_back(x);
      res.values.push_back(theta);
      res.residuals.push_back(resid);
      for (Eigen::Index i = 0; i < dim; ++i) start(i) = gauss(rng);
    }
  }

  // Sort ascending; locking can emit a later pair slightly below an earlier one.
  std::vector<std::size_t> order(res.values.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return res.values[a] < res.values[b]; });
  EigenResult sorted;
  sorted.matvecs = res.matvecs;
  sorted.converged = true;
  for (std::size_t i : order) {
    sorted.values.push_back(res.values[i]);
    sorted.vectors.push_back(locked[i]);
    sorted.residuals.push_back(res.residuals[i]);
  }
  return sorted;
}

EigenResult lanczos_lowest(const SparseMatrix& H, int count, const LanczosOptions& options) {
  if (H.rows() != H.cols()) throw InvalidArgument("lanczos: operator must be square");
  return lanczos_lowest([&](const Eigen::VectorXd& x, Eigen::VectorXd& y) { y.noalias() = H * x; }, H.rows(), count,
                        options);
}

std::vector<double> dense_eigenvalues(const SparseMatrix& H) {
  const Eigen::MatrixXd D = Eigen::MatrixXd(H);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(D, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return std::vector<double>(ev.data(), ev.data() + ev.size());
}

}  // namespace laughlin
