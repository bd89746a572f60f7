// Copyright 2026 The laughlin Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "laughlin/errors.hpp"
#include "laughlin/renewal.hpp"
#include "oracles.hpp"

using namespace laughlin;

namespace {

std::vector<AmplitudeTable> tables_for(int p, double g, int Nmax) {
  std::vector<AmplitudeTable> out;
  for (const auto& t : expand_sequence(ModelParams(p, g, Nmax))) out.push_back(amplitudes(t, g));
  return out;
}

}  // namespace

TEST_CASE("norms against closed forms and quadrature") {
  for (double g : {0.6, 1.0, 1.4}) {
    const auto C3 = norms(tables_for(3, g, 2));
    CHECK(C3[0] == 1.0);
    CHECK(C3[1] == 1.0);
    CHECK(C3[2] == doctest::Approx(1 + 9 * std::exp(-4 * g * g)).epsilon(1e-14));
    CHECK(C3[2] == doctest::Approx(testing::two_particle_norm(g, 3)).epsilon(1e-9));
    const auto C2 = norms(tables_for(2, g, 2));
    CHECK(C2[2] == doctest::Approx(1 + 2 * std::exp(-2 * g * g)).epsilon(1e-14));
    CHECK(C2[2] == doctest::Approx(testing::two_particle_norm(g, 2)).epsilon(1e-9));
  }
}

TEST_CASE("irreducible weights") {
  for (double g : {0.7, 1.0}) {
    const auto t = tables_for(3, g, 6);
    const auto w = irreducible_weights(norms(t), t);
    CHECK(w.alpha[1] == 1.0);
    CHECK(w.alpha[2] == doctest::Approx(9 * std::exp(-4 * g * g)).epsilon(1e-13));
    CHECK(w.max_residual < 1e-10);
    for (std::size_t n = 1; n < w.alpha.size(); ++n) {
      CHECK(w.alpha[n] >= 0.0);
      CHECK(w.alpha[n] == doctest::Approx(w.alpha_recursive[n]).epsilon(1e-10));
    }
  }
  const auto t1 = tables_for(1, 1.0, 6);
  const auto w1 = irreducible_weights(norms(t1), t1);
  CHECK(w1.alpha[1] == 1.0);
  for (std::size_t n = 2; n < w1.alpha.size(); ++n) CHECK(w1.alpha[n] == 0.0);
}

TEST_CASE("activity") {
  const std::vector<double> trivial = {0, 1, 0, 0};
  const auto a = solve_activity(trivial);
  CHECK(a.r == 1.0);
  CHECK(a.mu == 1.0);

  const std::vector<double> fib = {0, 1, 1};
  const auto b = solve_activity(fib);
  const double golden = (std::sqrt(5.0) - 1) / 2;
  CHECK(b.r == doctest::Approx(golden).epsilon(1e-12));
  CHECK(b.mu == doctest::Approx(golden + 2 * golden * golden).epsilon(1e-12));
  CHECK(b.mu == doctest::Approx(1.3819660).epsilon(1e-7));

  const auto c = solve_activity(fib, true);
  CHECK(c.extended_precision_delta < 1e-12);

  CHECK_THROWS_AS((void)solve_activity(std::vector<double>{0, 0, 1}), InvalidArgument);
  CHECK_THROWS_AS((void)solve_activity(std::vector<double>{0, 1, -0.5}), InvalidArgument);
  CHECK_THROWS_AS((void)solve_activity(std::vector<double>{0}), InvalidArgument);
}

TEST_CASE("activity root is a root, for random weights") {
  testing::Gen g(3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> alpha(static_cast<std::size_t>(g.integer(2, 9)), 0.0);
    alpha[1] = 1.0;
    for (std::size_t n = 2; n < alpha.size(); ++n) alpha[n] = g.real(0.0, 2.0);
    const auto s = solve_activity(alpha);
    double sum = 0.0;
    double mu = 0.0;
    for (std::size_t n = 1; n < alpha.size(); ++n) {
      sum += alpha[n] * std::pow(s.r, static_cast<double>(n));
      mu += static_cast<double>(n) * alpha[n] * std::pow(s.r, static_cast<double>(n));
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-11));
    CHECK(mu == doctest::Approx(s.mu).epsilon(1e-11));
    CHECK(s.r > 0.0);
    CHECK(s.r <= 1.0);
    CHECK(s.mu >= 1.0 - 1e-12);
  }
}

TEST_CASE("renewal function of the two-rod toy model") {
  const std::vector<double> fib = {0, 1, 1};
  const RenewalModel m = renewal_model_from_alpha(fib);
  const double r = (std::sqrt(5.0) - 1) / 2;
  CHECK(renewal_u(m, 0) == 1.0);
  CHECK(renewal_u(m, 1) == doctest::Approx(r).epsilon(1e-12));
  CHECK(renewal_u(m, 2) == doctest::Approx(0.7639320).epsilon(1e-7));
  CHECK(renewal_u(m, 2) == doctest::Approx(2 * r * r).epsilon(1e-12));
  // Beyond the stored range the convolution continues and converges to 1/mu.
  CHECK(renewal_u(m, 60) == doctest::Approx(1.0 / m.mu).epsilon(1e-10));
  CHECK_THROWS_AS((void)renewal_u(m, -1), InvalidArgument);
}

TEST_CASE("filled level renewal model") {
  const RenewalModel m = build_renewal_model(tables_for(1, 1.0, 10));
  CHECK(m.r == 1.0);
  CHECK(m.mu == 1.0);
  CHECK(m.tail_mass == 0.0);
  for (int N = 0; N <= 10; ++N) CHECK(m.uN[static_cast<std::size_t>(N)] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("renewal model for p = 3, gamma = 1") {
  const RenewalModel m = build_renewal_model(tables_for(3, 1.0, 8));
  CHECK(m.r == doctest::Approx(0.8731983332).epsilon(1e-9));
  CHECK(m.mu == doctest::Approx(1.12792605).epsilon(1e-8));
  CHECK(m.converged);
  const auto rf = renewal_function(m);
  CHECK(rf.max_discrepancy < 1e-10);
  for (int N = 1; N <= 8; ++N) {
    for (int M = 1; N + M <= 8; ++M) CHECK(m.norms[N + M] >= m.norms[N] * m.norms[M]);
  }
  CHECK(m.c_sub >= 1.0);
  double total = 0.0;
  for (double v : m.pn) {
    CHECK(v >= 0.0);
    total += v;
  }
  CHECK(total <= 1.0 + 1e-12);
  // |u_N - 1/mu| shrinks over the computed range.
  CHECK(rf.sup_deviation[8] < rf.sup_deviation[1]);
  CHECK(std::abs(m.uN[8] - 1 / m.mu) < std::abs(m.uN[1] - 1 / m.mu));
}

TEST_CASE("tail mass decreases with the truncation") {
  double prev = std::numeric_limits<double>::infinity();
  const auto all = tables_for(3, 1.0, 8);
  for (int M = 3; M <= 8; ++M) {
    const std::vector<AmplitudeTable> t(all.begin(), all.begin() + M);
    const RenewalModel m = build_renewal_model(t);
    CHECK(m.tail_mass >= 0.0);
    CHECK(m.tail_mass < prev);
    prev = m.tail_mass;
  }
}

TEST_CASE("unconverged models are flagged") {
  const RenewalModel m = build_renewal_model(tables_for(3, 0.3, 3));
  CHECK_FALSE(m.converged);
  CHECK_THROWS_AS(m.require_converged(false), UnconvergedModel);
  CHECK_NOTHROW(m.require_converged(true));
}

TEST_CASE("partition probabilities") {
  for (double g : {0.8, 1.0}) {
    const RenewalModel m = build_renewal_model(tables_for(3, g, 8));
    const double w = 9 * std::exp(-4 * g * g);
    CHECK(partition_probability(RodPartition({1, 1}), m, 2) == doctest::Approx(1 / (1 + w)).epsilon(1e-13));
    CHECK(partition_probability(RodPartition({2}), m, 2) == doctest::Approx(w / (1 + w)).epsilon(1e-13));
    for (int N = 1; N <= 8; ++N) {
      double s = 0.0;
      for (const auto& X : enumerate_partitions(N)) {
        const double pX = partition_probability(X, m, N);
        s += pX;
        // Equivalent form prod p_n / u_N.
        double prod = 1.0;
        for (int n : X.lengths()) prod *= m.pn[static_cast<std::size_t>(n)];
        CHECK(pX == doctest::Approx(prod / m.uN[static_cast<std::size_t>(N)]).epsilon(1e-10));
      }
      CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(partition_probability(RodPartition({N}), m, N) == doctest::Approx(m.alpha[static_cast<std::size_t>(N)] / m.norms[N]));
    }
    CHECK_THROWS_AS((void)partition_probability(RodPartition({1, 2}), m, 4), InvalidArgument);
  }
  for (int p = 2; p <= 3; ++p) {
    const auto t = tables_for(p, 1.0, 6);
    const RenewalModel m = build_renewal_model(t);
    // Partition weights from summing amplitudes by partition.
    for (int N = 2; N <= 6; ++N) {
      std::map<RodPartition, double> mass;
      const auto& table = t[static_cast<std::size_t>(N - 1)];
      for (const auto& e : table.entries()) mass[e.partition] += e.A * e.A / table.norm();
      for (const auto& [X, v] : mass) CHECK(v == doctest::Approx(partition_probability(X, m, N)).epsilon(1e-10));
    }
  }
}

TEST_CASE("stationary events") {
  const RenewalModel m = build_renewal_model(tables_for(3, 1.0, 8));
  CHECK(stationary_event_probability({}, m) == doctest::Approx(1 / m.mu));
  CHECK(stationary_event_probability({{1}, std::nullopt, {}}, m) == doctest::Approx(m.pn[1] / m.mu));
  CHECK(stationary_event_probability({{1, 2}, std::nullopt, {}}, m) == doctest::Approx(m.pn[1] * m.pn[2] / m.mu));
  CHECK(stationary_event_probability({{1}, 3, {2}}, m) ==
        doctest::Approx(m.pn[1] * renewal_u(m, 3) * m.pn[2] / m.mu));
  CHECK_THROWS_AS((void)stationary_event_probability({{0}, std::nullopt, {}}, m), InvalidArgument);
  CHECK_THROWS_AS((void)stationary_event_probability({{1}, std::nullopt, {1}}, m), InvalidArgument);
  // Summing over the first rod length recovers P(renewal at 0).
  double s = 0.0;
  for (int n = 1; n <= m.max_N(); ++n) s += stationary_event_probability({{n}, std::nullopt, {}}, m);
  CHECK(s == doctest::Approx(1 / m.mu).epsilon(1e-10));
}

TEST_CASE("long intervals against direct enumeration") {
  const auto t = tables_for(3, 1.0, 8);
  const RenewalModel m = build_renewal_model(t);
  for (int N : {4, 6, 8}) {
    const auto& table = t[static_cast<std::size_t>(N - 1)];
    for (int start = 1; start < 3 * N; start += 2) {
      for (int end = start + 3; end <= 3 * N; end += 3) {
        double direct = 0.0;
        for (const auto& e : table.entries()) {
          bool none = true;
          for (int pt : e.partition.renewal_set(3)) none = none && !(pt >= start && pt < end);
          if (none) direct += e.A * e.A / table.norm();
        }
        const auto c = long_interval_check(m, N, start, end);
        CHECK(c.exact == doctest::Approx(direct).epsilon(1e-10));
        CHECK(c.exact <= c.bound + 1e-15);
      }
    }
  }
  CHECK_THROWS_AS((void)long_interval_check(m, 9, 0, 3), InvalidArgument);
  CHECK_THROWS_AS((void)long_interval_check(m, 4, 5, 5), InvalidArgument);
}

TEST_CASE("missing tables are rejected") {
  auto t = tables_for(3, 1.0, 4);
  t.erase(t.begin() + 1);
  CHECK_THROWS_AS((void)build_renewal_model(t), InvalidArgument);
}
