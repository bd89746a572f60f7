// Copyright 2026 The laughlin Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "laughlin/errors.hpp"
#include "laughlin/hamiltonian.hpp"

using namespace laughlin;

namespace {

Eigen::VectorXd psi_for(const ModelParams& P, const SectorBasis& basis) {
  return sector_vector(amplitudes(expand(P), P.gamma), basis);
}

long long fibonacci(int n) {
  long long a = 0, b = 1;
  for (int i = 0; i < n; ++i) {
    const long long c = a + b;
    a = b;
    b = c;
  }
  return a;
}

}  // namespace

TEST_CASE("Hermite polynomials") {
  testing::Gen g(3);
  for (int trial = 0; trial < 50; ++trial) {
    const double t = g.real(-3.0, 3.0);
    CHECK(hermite(0, t) == 1.0);
    CHECK(hermite(1, t) == doctest::Approx(2 * t));
    CHECK(hermite(2, t) == doctest::Approx(4 * t * t - 2));
    CHECK(hermite(3, t) == doctest::Approx(8 * t * t * t - 12 * t));
    CHECK(hermite(4, t) == doctest::Approx(16 * std::pow(t, 4) - 48 * t * t + 12));
    // H_n' = 2n H_{n-1}
    const int n = g.integer(1, 8);
    const double h = 1e-5;
    CHECK((hermite(n, t + h) - hermite(n, t - h)) / (2 * h) ==
          doctest::Approx(2 * n * hermite(n - 1, t)).epsilon(1e-6));
  }
}

TEST_CASE("form factors") {
  for (double t : {-1.5, 0.0, 0.7, 2.0}) {
    const double e = std::exp(-t * t / 4);
    CHECK(form_factor(t, ModelParams(1, 1.0, 2)) == 0.0);
    CHECK(form_factor(t, ModelParams(2, 1.0, 2)) == doctest::Approx(e));
    CHECK(form_factor(t, ModelParams(3, 1.0, 2)) == doctest::Approx(2 * t * e));
    CHECK(form_factor(t, ModelParams(3, 1.0, 2), FormFactorVariant::FullSum) ==
          doctest::Approx((1 + 2 * t + 4 * t * t - 2) * e));
    // Parity: F(-t) = (-1)^{p+1} F(t) for the parity-matched variant.
    for (int p = 1; p <= 5; ++p) {
      const FormFactor F(p, 1.0);
      CHECK(F(-t) == doctest::Approx(p % 2 == 1 ? -F(t) : F(t)).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(FormFactor(0, 1.0), InvalidArgument);
}

TEST_CASE("sector basis") {
  const SectorBasis b = SectorBasis::build(6, 3, true);
  CHECK(b.size() == 20);
  for (std::size_t i = 0; i < b.size(); ++i) CHECK(*b.index_of(b[i]) == i);
  for (std::size_t i = 1; i < b.size(); ++i) CHECK(b[i - 1].vec() < b[i].vec());
  CHECK(SectorBasis::build(4, 2, false).size() == 10);
  const SectorBasis k = SectorBasis::build(7, 3, true, 9);
  for (const auto& m : k.states()) {
    CHECK(m.sum() == 9);
  }
  CHECK_FALSE(b.index_of(OrbitalConfig({0, 1})).has_value());
  CHECK_THROWS_AS((void)SectorBasis::build(3, 4, true), InvalidArgument);
  CHECK_THROWS_AS((void)SectorBasis::build(40, 12, true, std::nullopt, 1000), ResourceLimit);
}

TEST_CASE("monomial action") {
  const OrbitalConfig m({0, 2, 3});
  const int an[1] = {2};
  const int cr[1] = {1};
  const auto img = apply_monomial(m, cr, an, true);
  REQUIRE(img);
  CHECK(img->state == OrbitalConfig({0, 1, 3}));
  CHECK(img->coefficient == doctest::Approx(1.0));
  const int an3[1] = {3};
  const int cr3[1] = {1};
  const auto img3 = apply_monomial(m, cr3, an3, true);
  REQUIRE(img3);
  // c*_1 c_3 |0 2 3>: removing 3 passes two particles, inserting 1 passes one.
  CHECK(img3->coefficient == doctest::Approx(-1.0));
  const int an_missing[1] = {1};
  CHECK_FALSE(apply_monomial(m, {}, an_missing, true).has_value());
  const int cr_occupied[1] = {0};
  CHECK_FALSE(apply_monomial(m, cr_occupied, {}, true).has_value());
  const auto bos = apply_monomial(OrbitalConfig({1, 1}), cr_occupied, an_missing, false);
  REQUIRE(bos);
  CHECK(bos->coefficient == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("two-particle spectrum") {
  for (double g : {0.6, 1.0, 1.7}) {
    const ModelParams P(3, g, 2);
    const SectorBasis basis = SectorBasis::for_model(P, 3);
    REQUIRE(basis.size() == 2);
    const HamiltonianBuild H = build_H(P, basis);
    const auto ev = dense_eigenvalues(H.pairwise.matrix);
    const FormFactor F(3, g);
    CHECK(std::abs(ev[0]) < 1e-12);
    CHECK(ev[1] == doctest::Approx(4 * (F(g) * F(g) + F(3 * g) * F(3 * g))).epsilon(1e-12));
  }
}

TEST_CASE("parent Hamiltonian ground states") {
  for (int p = 2; p <= 3; ++p) {
    for (int N = 1; N <= 4; ++N) {
      const ModelParams P(p, 0.9, N);
      const SectorBasis basis = SectorBasis::for_model(P);
      const HamiltonianBuild H = build_H(P, basis);
      CHECK(H.pairwise.max_asymmetry() < 1e-13);
      CHECK(H.max_deviation <= 1e-12);
      CHECK(max_entry_difference(H.pairwise, H.bond) <= 1e-12);
      const GroundCheck gc = ground_check(H.pairwise, psi_for(P, basis));
      CHECK(gc.residual < 1e-8);
      CHECK(gc.kernel.dimension == 1);
      // Positive semidefinite, and Lanczos agrees with the dense reference.
      const auto dense = dense_eigenvalues(H.pairwise.matrix);
      CHECK(dense.front() > -1e-10);
      const int count = std::min<int>(4, static_cast<int>(dense.size()));
      const auto low = spectrum(H.pairwise, count);
      for (int i = 0; i < count; ++i) {
        CHECK(low[static_cast<std::size_t>(i)] ==
              doctest::Approx(dense[static_cast<std::size_t>(i)]).epsilon(1e-8).scale(1.0));
      }
    }
  }
}

TEST_CASE("negative controls") {
  const ModelParams P(3, 1.0, 4);
  const SectorBasis basis = SectorBasis::for_model(P);
  const HamiltonianBuild H = build_H(P, basis);
  testing::Gen g(17);
  Eigen::VectorXd v(static_cast<Eigen::Index>(basis.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = g.normal();
  CHECK(ground_check(H.pairwise, v, false).residual > 1e-3);
  // A state built for another gamma is not annihilated.
  CHECK(ground_check(H.pairwise, psi_for(ModelParams(3, 1.3, 4), basis), false).residual > 1e-6);
  CHECK_THROWS_AS((void)ground_check(H.pairwise, Eigen::VectorXd::Zero(v.size())), InvalidArgument);
  CHECK_THROWS_AS((void)ground_check(H.pairwise, Eigen::VectorXd::Ones(3)), InvalidArgument);
}

TEST_CASE("full-sum form factor") {
  for (int N = 2; N <= 4; ++N) {
    const ModelParams P(3, 1.0, N);
    const SectorBasis basis = SectorBasis::for_model(P);
    const HamiltonianBuild H = build_H(P, basis, FormFactorVariant::FullSum);
    CHECK(H.max_deviation <= 1e-12);
    CHECK(dense_eigenvalues(H.pairwise.matrix).front() > -1e-10);
    const GroundCheck gc = ground_check(H.pairwise, psi_for(P, basis));
    CHECK(gc.residual < 1e-8);
    CHECK(gc.kernel.dimension == 1);
  }
}

TEST_CASE("monomer-dimer model") {
  for (int N = 1; N <= 7; ++N) {
    const ModelParams P(3, 1.0, N);
    const MonomerDimer md = build_monomer_dimer(P);
    CHECK(md.terms == static_cast<std::size_t>(fibonacci(N + 1)));
    CHECK(max_entry_difference(md.H, md.H_expanded) <= 1e-12);
    CHECK(md.H.max_asymmetry() < 1e-13);
    CHECK(ground_check(md.H, md.psi, false).residual < 1e-10);
    for (std::size_t i = 0; i < md.basis.size(); ++i) {
      if (md.psi[static_cast<Eigen::Index>(i)] == 0.0) continue;
      const auto& o = md.basis[i].vec();
      for (std::size_t a = 0; a < o.size(); ++a) {
        for (std::size_t b = a + 1; b < o.size(); ++b) CHECK(o[b] - o[a] != 2);
      }
    }
    if (N <= 5) {
      CHECK(dense_eigenvalues(md.H.matrix).front() > -1e-10);
      CHECK(kernel_dimension(md.H).dimension == 1);
    }
  }
  CHECK_THROWS_AS((void)build_monomer_dimer(ModelParams(2, 1.0, 3)), InvalidArgument);
}

TEST_CASE("Tao-Thouless Hamiltonian") {
  for (int N = 2; N <= 4; ++N) {
    const ModelParams P(3, 1.0, N);
    const SectorBasis basis = SectorBasis::for_model(P);
    const SparseOperator HTT = build_HTT(P, basis);
    const Eigen::VectorXd tt = tao_thouless(P, basis);
    CHECK(tt.norm() == doctest::Approx(1.0));
    CHECK(HTT.apply(tt).norm() < 1e-15);
    const Eigen::MatrixXd D = HTT.dense();
    CHECK((D - Eigen::MatrixXd(D.diagonal().asDiagonal())).norm() == 0.0);
    CHECK(D.diagonal().minCoeff() >= 0.0);
    // Only the root state is free of nearest and next-nearest neighbours.
    int zeros = 0;
    for (Eigen::Index i = 0; i < D.rows(); ++i) zeros += D(i, i) == 0.0 ? 1 : 0;
    CHECK(zeros == 1);
  }
  CHECK(tt_normalisation(1.5) == doctest::Approx(36.0));
  // The remainder shrinks relative to H^TT as gamma grows.
  double prev = std::numeric_limits<double>::infinity();
  for (double g : {1.0, 2.0, 3.0}) {
    const ModelParams P(3, g, 3);
    const SectorBasis basis = SectorBasis::for_model(P);
    const SparseOperator HTT = build_HTT(P, basis);
    const SparseOperator HL = build_H_pairwise(basis, FormFactor(3, g));
    const SparseOperator V{SparseMatrix(HL.matrix / tt_normalisation(g) - HTT.matrix)};
    const double ratio = V.max_abs_entry() / HTT.max_abs_entry();
    CHECK(ratio < prev);
    prev = ratio;
  }
  CHECK(prev < 0.1);
}

TEST_CASE("perturbation series") {
  const PerturbationResult good = perturbation_series(ModelParams(3, 2.0, 3), 4);
  REQUIRE(good.distance.size() == 5);
  CHECK(good.decreasing);
  CHECK_FALSE(good.diverging);
  CHECK(good.distance.back() < 1e-6);
  const PerturbationResult bad = perturbation_series(ModelParams(3, 0.3, 3), 4);
  CHECK(bad.diverging);
  CHECK_FALSE(bad.decreasing);
  CHECK(perturbation_series(ModelParams(3, 2.0, 3), 0).partial_sums.size() == 1);
  CHECK_THROWS_AS((void)perturbation_series(ModelParams(2, 2.0, 3), 2), InvalidArgument);
  CHECK_THROWS_AS((void)perturbation_series(ModelParams(3, 2.0, 3), -1), InvalidArgument);
}
