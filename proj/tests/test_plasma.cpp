// Copyright 2026 The laughlin Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <complex>
#include <numeric>

#include "generators.hpp"
#include "laughlin/correlations.hpp"
#include "laughlin/errors.hpp"
#include "laughlin/parallel.hpp"
#include "laughlin/plasma.hpp"
#include "oracles.hpp"

using namespace laughlin;

namespace {

constexpr double kPi = 3.14159265358979323846;

double direct_log_weight(const std::vector<double>& x, const std::vector<double>& y, int p, double g) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    s -= x[k] * x[k];
    for (std::size_t j = 0; j < k; ++j) {
      const auto zk = std::exp(g * std::complex<double>(x[k], y[k]));
      const auto zj = std::exp(g * std::complex<double>(x[j], y[j]));
      s += 2 * p * std::log(std::abs(zk - zj));
    }
  }
  return s;
}

}  // namespace

TEST_CASE("log weight against the direct product") {
  testing::Gen g(2);
  for (int trial = 0; trial < 200; ++trial) {
    const int p = g.integer(1, 3);
    const int N = g.integer(1, 6);
    const double gamma = g.real(0.4, 1.6);
    const ModelParams P(p, gamma, N);
    std::vector<double> x, y;
    for (int k = 0; k < N; ++k) {
      x.push_back(g.real(-3.0, 3.0 + p * gamma * N));
      y.push_back(g.real(0.0, 2 * kPi / gamma));
    }
    const double lw = log_weight(x, y, P);
    CHECK(lw == doctest::Approx(direct_log_weight(x, y, p, gamma)).epsilon(1e-10));
    // Label exchange.
    std::vector<double> xs = x, ys = y;
    std::reverse(xs.begin(), xs.end());
    std::reverse(ys.begin(), ys.end());
    CHECK(log_weight(xs, ys, P) == doctest::Approx(lw).epsilon(1e-12));
    // Rigid rotation around the cylinder.
    const double shift = g.real(0.0, 10.0);
    for (auto& v : ys) v = wrap_y(v + shift, gamma);
    CHECK(log_weight(xs, ys, P) == doctest::Approx(lw).epsilon(1e-10));
    // Sorted form.
    double offset = 0.0;
    for (int k = 0; k < N; ++k) offset += std::pow(k * p * gamma, 2);
    CHECK(log_weight_sorted(x, y, P) == doctest::Approx(lw - offset).epsilon(1e-10).scale(1.0));
  }
  const ModelParams one(3, 1.0, 1);
  const std::vector<double> x1 = {1.7}, y1 = {2.0};
  CHECK(log_weight(x1, y1, one) == doctest::Approx(-1.7 * 1.7));
  CHECK(std::isinf(pair_log_modulus(0.3, 0.2, 0.3, 0.2, 1.0)));
  // Far apart in x: no overflow, dominated by gamma max(x).
  CHECK(pair_log_modulus(-400.0, 0.0, 900.0, 1.0, 1.0) == doctest::Approx(900.0));
}

TEST_CASE("wrap and excess") {
  const double c = 2 * kPi;
  CHECK(wrap_y(-0.5, 1.0) == doctest::Approx(c - 0.5));
  CHECK(wrap_y(c + 0.25, 1.0) == doctest::Approx(0.25));
  CHECK(wrap_y(c, 1.0) == 0.0);
  const std::vector<double> x = {-0.2, 1.0, 2.9, 3.1, 7.0};
  CHECK(particle_excess(x, 0, 3, 1.0) == 0);   // xbar = -1.5
  CHECK(particle_excess(x, 1, 3, 1.0) == 1);   // xbar = 1.5
  CHECK(particle_excess(x, 2, 3, 1.0) == 2);   // xbar = 4.5
  CHECK(particle_excess(x, 5, 3, 1.0) == 0);
  const auto e = uniform_edges(0.0, 1.0, 4);
  CHECK(e == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  CHECK_THROWS_AS((void)uniform_edges(1.0, 1.0, 3), InvalidArgument);
}

TEST_CASE("configuration checks") {
  const ModelParams P(3, 1.0, 2);
  McConfig c;
  c.sweeps = 10;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = McConfig{};
  c.sigma_x = -1;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = McConfig{};
  McObservables bad;
  bad.bin_edges = {0.0, 1.0, 0.5};
  CHECK_THROWS_AS((void)metropolis_run(P, c, bad), InvalidArgument);
  McObservables far;
  far.excess_sites = {3};
  CHECK_THROWS_AS((void)metropolis_run(P, c, far), InvalidArgument);
}

TEST_CASE("single particle is Gaussian in x and uniform in y") {
  const ModelParams P(3, 1.0, 1);
  McConfig c;
  c.burn_in = 500;
  c.thinning = 2;
  const auto trace = metropolis_trace(P, c, 0, 40000);
  double m = 0.0, v = 0.0;
  for (const auto& s : trace) m += s.x[0];
  m /= static_cast<double>(trace.size());
  for (const auto& s : trace) v += (s.x[0] - m) * (s.x[0] - m);
  v /= static_cast<double>(trace.size());
  CHECK(std::abs(m) < 0.05);
  CHECK(v == doctest::Approx(0.5).epsilon(0.05));
  for (const auto& s : trace) CHECK(s.log_weight == doctest::Approx(-s.x[0] * s.x[0]).epsilon(1e-12).scale(1.0));
}

TEST_CASE("zero proposal width leaves the chain in place") {
  const ModelParams P(3, 1.0, 3);
  McConfig c;
  c.sigma_x = 0.0;
  c.sigma_y = 0.0;
  c.tune = false;
  c.burn_in = 10;
  const auto trace = metropolis_trace(P, c, 0, 20);
  const PlasmaState init = initial_state(P);
  for (const auto& s : trace) {
    CHECK(s.x == init.x);
    CHECK(s.y == init.y);
  }
}

TEST_CASE("two-particle sampling against exact expectations") {
  const double g = 1.0;
  const ModelParams P(3, g, 2);
  const auto table = amplitudes(expand(P), g);
  McConfig c;
  c.sweeps = 40000;
  c.burn_in = 1000;
  c.seed = 99;
  McObservables obs;
  obs.bin_edges = uniform_edges(-3.0, 6.0, 6);
  obs.excess_sites = {0, 1, 2};
  const McReport rep = metropolis_run(P, c, obs);
  CHECK_FALSE(rep.flagged);
  CHECK(rep.split_rhat < 1.05);
  const auto exact = expected_bin_counts(finite_profile(occupation_finite(table)), g, obs.bin_edges);
  for (std::size_t i = 0; i < exact.size(); ++i) {
    CHECK(std::abs(rep.bin_counts[i].mean - exact[i]) <= 4 * rep.bin_counts[i].error + 1e-3);
  }
  // P(K = 0) at xbar = 1.5: from the count distribution and from continuum quadrature.
  const auto& mid = rep.excess[1];
  CHECK(mid.xbar == doctest::Approx(1.5));
  const double pk = particle_count_distribution(table, 1.5)[1];
  const double lo = -8.0, hi = 14.0;
  const double quad = testing::two_particle_integral(g, 3, lo, hi, 1600,
                                                      [](double a, double b) { return (a <= 1.5) != (b <= 1.5); }) /
                      testing::two_particle_integral(g, 3, lo, hi, 1600);
  CHECK(pk == doctest::Approx(quad).epsilon(2e-3));
  CHECK(std::abs(mid.p_zero.mean - pk) <= 4 * mid.p_zero.error);
  // Histogram over K sums to one; k = 0 gives K >= 0.
  for (const auto& ex : rep.excess) {
    double s = 0.0;
    for (const auto& h : ex.histogram) s += h.mean;
    CHECK(s == doctest::Approx(1.0));
    CHECK(ex.tail.front().mean == doctest::Approx(1.0));
  }
  CHECK(rep.excess[0].K_values.front() == 0);
  CHECK(rep.y_ks < 0.02);
  double ysum = 0.0;
  for (const auto& b : rep.y_marginal) ysum += b.mean;
  CHECK(ysum == doctest::Approx(1.0));
}

TEST_CASE("runs are reproducible across thread counts") {
  const ModelParams P(3, 1.0, 4);
  McConfig c;
  c.sweeps = 2000;
  c.burn_in = 200;
  c.chains = 3;
  McObservables obs;
  obs.bin_edges = uniform_edges(-3.0, 12.0, 15);
  obs.excess_sites = {2};
  set_thread_count(1);
  const McReport a = metropolis_run(P, c, obs);
  set_thread_count(3);
  const McReport b = metropolis_run(P, c, obs);
  set_thread_count(1);
  for (std::size_t i = 0; i < a.bin_counts.size(); ++i) {
    CHECK(a.bin_counts[i].mean == b.bin_counts[i].mean);
    CHECK(a.bin_counts[i].error == b.bin_counts[i].error);
  }
  CHECK(a.split_rhat == b.split_rhat);
  CHECK(a.excess[0].p_zero.mean == b.excess[0].p_zero.mean);
  for (std::size_t i = 0; i < a.chains.size(); ++i) CHECK(a.chains[i].sigma_x == b.chains[i].sigma_x);
  c.seed = 2;
  const McReport d = metropolis_run(P, c, obs);
  CHECK(d.bin_counts[5].mean != a.bin_counts[5].mean);
}

TEST_CASE("bulk oscillation of a synthetic periodic profile") {
  McReport rep;
  rep.bin_edges = uniform_edges(0.0, 12.0, 48);
  for (int i = 0; i < 48; ++i) {
    const double x = 0.125 + 0.25 * i;
    rep.density.push_back({0.3 + 0.1 * std::cos(2 * kPi * x / 3.0), 0.001});
  }
  rep.params = ModelParams(3, 1.0, 4);
  const auto osc = bulk_oscillation(rep, 0.0, 12.0);
  CHECK(osc.period_bins == 12);
  CHECK(osc.amplitude == doctest::Approx(0.1).epsilon(0.02));
  CHECK(osc.folded_contrast > 50);
}
