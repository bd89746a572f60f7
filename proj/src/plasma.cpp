// Copyright 2026 The laughlin Authors
// SPDX-License-Identifier: Apache-2.0

#include "laughlin/plasma.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "laughlin/errors.hpp"

namespace laughlin {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double circumference(double gamma) { return kTwoPi / gamma; }

class Chain {
 public:
  Chain(const ModelParams& params, std::uint64_t seed, std::uint64_t chain, double sx, double sy)
      : params_(params), state_(initial_state(params)), sigma_x_(sx), sigma_y_(sy) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffULL), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(chain & 0xffffffffULL), static_cast<std::uint32_t>(chain >> 32)};
    rng_.seed(seq);
    sigma_y_ = std::min(sigma_y_, 0.5 * circumference(params.gamma));
  }

  void sweep() {
    const int N = params_.N;
    for (int s = 0; s < N; ++s) {
      const auto i = static_cast<std::size_t>(pick_(rng_) % static_cast<std::uint64_t>(N));
      const double xi = state_.x[i];
      const double yi = state_.y[i];
      const double xn = xi + sigma_x_ * gauss_(rng_);
      const double yn = wrap_y(yi + sigma_y_ * (2.0 * unif_(rng_) - 1.0), params_.gamma);
      double delta = -(xn * xn - xi * xi);
      double pair = 0.0;
      for (std::size_t j = 0; j < state_.x.size(); ++j) {
        if (j == i) continue;
        pair += pair_log_modulus(xn, yn, state_.x[j], state_.y[j], params_.gamma) -
                pair_log_modulus(xi, yi, state_.x[j], state_.y[j], params_.gamma);
      }
      delta += 2.0 * params_.p * pair;
      ++proposed_;
      if (std::isfinite(delta) && std::log(unif_(rng_)) < delta) {
        state_.x[i] = xn;
        state_.y[i] = yn;
        state_.log_weight += delta;
        ++accepted_;
      } else if (std::isnan(delta)) {
        throw VerificationFailure("plasma: non-finite log-weight difference");
      }
    }
    if (++sweeps_ % 128 == 0) state_.log_weight = log_weight(state_.x, state_.y, params_);
  }

  void tune() {
    if (sigma_x_ == 0.0 && sigma_y_ == 0.0) return;
    for (int round = 0; round < 40; ++round) {
      reset_counts();
      for (int s = 0; s < 50; ++s) sweep();
      const double a = acceptance();
      if (a >= 0.3 && a <= 0.6) break;
      const double f = a < 0.3 ? 0.6 : 1.5;
      sigma_x_ *= f;
      sigma_y_ = std::min(sigma_y_ * f, 0.5 * circumference(params_.gamma));
    }
    reset_counts();
  }

  void reset_counts() {
    accepted_ = 0;
    proposed_ = 0;
  }
  [[nodiscard]] double acceptance() const {
    return proposed_ ? static_cast<double>(accepted_) / static_cast<double>(proposed_) : 0.0;
  }
  [[nodiscard]] const PlasmaState& state() const { return state_; }
  [[nodiscard]] double sigma_x() const { return sigma_x_; }
  [[nodiscard]] double sigma_y() const { return sigma_y_; }

 private:
  ModelParams params_;
  PlasmaState state_;
  double sigma_x_;
  double sigma_y_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> gauss_;
  std::uniform_real_distribution<double> unif_{0.0, 1.0};
  std::uniform_int_distribution<std::uint64_t> pick_;
  long accepted_ = 0;
  long proposed_ = 0;
  long sweeps_ = 0;
};

// Layout of the per-sample observable vector.
struct Layout {
  std::size_t nbins = 0;
  std::size_t excess_off = 0;
  std::size_t excess_width = 0;  // N + 1 per site
  std::size_t y_off = 0;
  std::size_t dim = 0;
};

}  // namespace

double pair_log_modulus(double xj, double yj, double xk, double yk, double gamma) noexcept {
  double xmin = xj;
  double xmax = xk;
  double dy = yj - yk;
  if (xj > xk) {
    xmin = xk;
    xmax = xj;
    dy = -dy;
  }
  const double a = gamma * (xmin - xmax);
  const double b = gamma * dy;
  const double em1 = std::expm1(a);
  const double s = std::sin(0.5 * b);
  const double mod2 = em1 * em1 + 4.0 * std::exp(a) * s * s;
  if (mod2 <= 0.0) return -std::numeric_limits<double>::infinity();
  return gamma * xmax + 0.5 * std::log(mod2);
}

double log_weight(std::span<const double> x, std::span<const double> y, const ModelParams& params) {
  if (x.size() != y.size()) throw InvalidArgument("log_weight: coordinate arrays differ in length");
  double pair = 0.0;
  double gauss = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    gauss += x[k] * x[k];
    for (std::size_t j = 0; j < k; ++j) pair += pair_log_modulus(x[j], y[j], x[k], y[k], params.gamma);
  }
  return 2.0 * params.p * pair - gauss;
}

double log_weight_sorted(std::span<const double> x, std::span<const double> y, const ModelParams& params) {
  if (x.size() != y.size()) throw InvalidArgument("log_weight_sorted: coordinate arrays differ in length");
  std::vector<std::size_t> order(x.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  double s = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const double d = x[order[k]] - static_cast<double>(k) * params.p * params.gamma;
    s -= d * d;
    for (std::size_t j = 0; j < k; ++j) {
      const double a = params.gamma * (x[order[j]] - x[order[k]]);
      const double b = params.gamma * (y[order[j]] - y[order[k]]);
      const double em1 = std::expm1(a);
      const double sn = std::sin(0.5 * b);
      s += params.p * std::log(em1 * em1 + 4.0 * std::exp(a) * sn * sn);
    }
  }
  return s;
}

double wrap_y(double y, double gamma) noexcept {
  const double c = circumference(gamma);
  double w = std::fmod(y, c);
  if (w < 0.0) w += c;
  if (w >= c) w = 0.0;
  return w;
}

void McConfig::validate() const {
  if (sweeps < 1 || burn_in < 0 || thinning < 1) throw InvalidArgument("mcmc: sweeps >= 1, burn_in >= 0, thinning >= 1");
  if (sigma_x < 0.0 || sigma_y < 0.0) throw InvalidArgument("mcmc: proposal widths must be >= 0");
  if (chains < 1) throw InvalidArgument("mcmc: need at least one chain");
  if (batches < 2) throw InvalidArgument("mcmc: need at least two batches");
  if (sweeps / thinning < batches) throw InvalidArgument("mcmc: fewer recorded samples than batches");
}

std::vector<double> uniform_edges(double lo, double hi, int bins) {
  if (!(hi > lo) || bins < 1) throw InvalidArgument("histogram: need hi > lo and bins >= 1");
  std::vector<double> e(static_cast<std::size_t>(bins) + 1);
  for (int i = 0; i <= bins; ++i) e[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / bins;
  return e;
}

int particle_excess(std::span<const double> x, int k, int p, double gamma) {
  if (k < 0 || k > static_cast<int>(x.size())) throw InvalidArgument("particle excess: site index out of range");
  const double xbar = (k - 0.5) * p * gamma;
  int left = 0;
  for (double v : x) left += v <= xbar ? 1 : 0;
  return left - k;
}

PlasmaState initial_state(const ModelParams& params) {
  params.validate();
  PlasmaState s;
  const double c = circumference(params.gamma);
  for (int k = 0; k < params.N; ++k) {
    s.x.push_back(k * params.p * params.gamma);
    s.y.push_back(c * (k + 0.5) / params.N);
  }
  s.log_weight = log_weight(s.x, s.y, params);
  return s;
}

std::vector<PlasmaState> metropolis_trace(const ModelParams& params, const McConfig& config, int chain,
                                          long samples) {
  params.validate();
  Chain ch(params, config.seed, static_cast<std::uint64_t>(chain), config.sigma_x, config.sigma_y);
  if (config.tune) ch.tune();
  for (long s = 0; s < config.burn_in; ++s) ch.sweep();
  std::vector<PlasmaState> out;
  for (long s = 0; s < samples; ++s) {
    for (long t = 0; t < config.thinning; ++t) ch.sweep();
    out.push_back(ch.state());
  }
  return out;
}

McReport metropolis_run(const ModelParams& params, const McConfig& config, const McObservables& obs) {
  params.validate();
  config.validate();
  if (obs.y_bins < 1) throw InvalidArgument("mcmc: y_bins must be >= 1");
  for (std::size_t i = 1; i < obs.bin_edges.size(); ++i) {
    if (!(obs.bin_edges[i] > obs.bin_edges[i - 1])) throw InvalidArgument("mcmc: bin edges must increase");
  }
  for (int k : obs.excess_sites) {
    if (k < 0 || k > params.N) throw InvalidArgument("mcmc: excess site outside 0..N");
  }
  const auto t0 = std::chrono::steady_clock::now();
  const int N = params.N;

  Layout L;
  L.nbins = obs.bin_edges.empty() ? 0 : obs.bin_edges.size() - 1;
  L.excess_off = L.nbins;
  L.excess_width = static_cast<std::size_t>(N) + 1;
  L.y_off = L.excess_off + obs.excess_sites.size() * L.excess_width;
  L.dim = L.y_off + static_cast<std::size_t>(obs.y_bins);

  const long samples = config.sweeps / config.thinning;
  const int B = config.batches;
  const double circ = circumference(params.gamma);

  McReport rep;
  rep.params = params;
  rep.config = config;
  rep.samples_per_chain = samples;
  rep.bin_edges = obs.bin_edges;
  rep.chains.resize(static_cast<std::size_t>(config.chains));

  // batch_means[c][b] is the mean observable vector of batch b in chain c.
  std::vector<std::vector<std::vector<double>>> batch_means(static_cast<std::size_t>(config.chains));
  std::vector<std::vector<double>> traces(static_cast<std::size_t>(config.chains));

#pragma omp parallel for schedule(static, 1)
  for (int c = 0; c < config.chains; ++c) {
    Chain ch(params, config.seed, static_cast<std::uint64_t>(c), config.sigma_x, config.sigma_y);
    if (config.tune) ch.tune();
    for (long s = 0; s < config.burn_in; ++s) ch.sweep();
    ch.reset_counts();

    auto& bm = batch_means[static_cast<std::size_t>(c)];
    bm.assign(static_cast<std::size_t>(B), std::vector<double>(L.dim, 0.0));
    auto& trace = traces[static_cast<std::size_t>(c)];
    trace.reserve(static_cast<std::size_t>(samples));
    std::vector<double> v(L.dim);
    std::vector<long> batch_sizes(static_cast<std::size_t>(B), 0);
    for (long s = 0; s < samples; ++s) {
      for (long t = 0; t < config.thinning; ++t) ch.sweep();
      const PlasmaState& st = ch.state();
      trace.push_back(st.log_weight);
      std::fill(v.begin(), v.end(), 0.0);
      for (int j = 0; j < N; ++j) {
        const double xj = st.x[static_cast<std::size_t>(j)];
        if (L.nbins) {
          const auto it = std::upper_bound(obs.bin_edges.begin(), obs.bin_edges.end(), xj);
          if (it != obs.bin_edges.begin() && it != obs.bin_edges.end()) {
            v[static_cast<std::size_t>(it - obs.bin_edges.begin() - 1)] += 1.0;
          }
        }
        auto yb = static_cast<std::size_t>(st.y[static_cast<std::size_t>(j)] / circ * obs.y_bins);
        yb = std::min(yb, static_cast<std::size_t>(obs.y_bins) - 1);
        v[L.y_off + yb] += 1.0 / N;
      }
      for (std::size_t e = 0; e < obs.excess_sites.size(); ++e) {
        const int k = obs.excess_sites[e];
        const int K = particle_excess(st.x, k, params.p, params.gamma);
        v[L.excess_off + e * L.excess_width + static_cast<std::size_t>(K + k)] = 1.0;
      }
      const auto b = static_cast<std::size_t>((s * B) / samples);
      for (std::size_t d = 0; d < L.dim; ++d) bm[b][d] += v[d];
      ++batch_sizes[b];
    }
    for (std::size_t b = 0; b < bm.size(); ++b) {
      for (double& x : bm[b]) x /= static_cast<double>(batch_sizes[b]);
    }
    auto& cs = rep.chains[static_cast<std::size_t>(c)];
    cs.seed_index = static_cast<std::uint64_t>(c);
    cs.sigma_x = ch.sigma_x();
    cs.sigma_y = ch.sigma_y();
    cs.acceptance = ch.acceptance();
    cs.pathological = cs.acceptance < 0.01 || cs.acceptance > 0.99;
  }

  // Pool the batches of all chains in chain order.
  std::vector<const std::vector<double>*> pool;
  for (const auto& chain : batch_means) {
    for (const auto& b : chain) pool.push_back(&b);
  }
  const double nb = static_cast<double>(pool.size());
  auto estimate = [&](const std::function<double(const std::vector<double>&)>& f) {
    double m = 0.0;
    for (const auto* b : pool) m += f(*b);
    m /= nb;
    double var = 0.0;
    for (const auto* b : pool) {
      const double d = f(*b) - m;
      var += d * d;
    }
    var /= (nb - 1.0);
    return Estimate{m, std::sqrt(var / nb)};
  };

  for (std::size_t i = 0; i < L.nbins; ++i) {
    const Estimate e = estimate([&](const std::vector<double>& b) { return b[i]; });
    const double w = obs.bin_edges[i + 1] - obs.bin_edges[i];
    rep.bin_counts.push_back(e);
    rep.density.push_back({e.mean / w, e.error / w});
  }
  for (std::size_t e = 0; e < obs.excess_sites.size(); ++e) {
    ExcessStats ex;
    ex.k = obs.excess_sites[e];
    ex.xbar = (ex.k - 0.5) * params.p * params.gamma;
    const std::size_t off = L.excess_off + e * L.excess_width;
    for (int K = -ex.k; K <= N - ex.k; ++K) {
      ex.K_values.push_back(K);
      const auto idx = off + static_cast<std::size_t>(K + ex.k);
      ex.histogram.push_back(estimate([&](const std::vector<double>& b) { return b[idx]; }));
    }
    ex.p_zero = ex.histogram[static_cast<std::size_t>(ex.k)];
    const int nmax = std::max(ex.k, N - ex.k);
    for (int n = 0; n <= nmax; ++n) {
      ex.tail.push_back(estimate([&](const std::vector<double>& b) {
        double s = 0.0;
        for (int K = -ex.k; K <= N - ex.k; ++K) {
          if (std::abs(K) >= n) s += b[off + static_cast<std::size_t>(K + ex.k)];
        }
        return s;
      }));
    }
    rep.excess.push_back(std::move(ex));
  }
  double cdf = 0.0;
  for (int i = 0; i < obs.y_bins; ++i) {
    const auto idx = L.y_off + static_cast<std::size_t>(i);
    const Estimate e = estimate([&](const std::vector<double>& b) { return b[idx]; });
    rep.y_marginal.push_back(e);
    cdf += e.mean;
    rep.y_ks = std::max(rep.y_ks, std::abs(cdf - static_cast<double>(i + 1) / obs.y_bins));
  }

  // Split-chain potential scale reduction on the log-weight trace.
  {
    std::vector<std::span<const double>> halves;
    for (const auto& t : traces) {
      const std::size_t h = t.size() / 2;
      if (h < 2) continue;
      halves.emplace_back(t.data(), h);
      halves.emplace_back(t.data() + h, h);
    }
    if (halves.size() >= 2) {
      const double n = static_cast<double>(halves.front().size());
      std::vector<double> means;
      double W = 0.0;
      for (const auto& h : halves) {
        double m = 0.0;
        for (double v : h) m += v;
        m /= n;
        double s2 = 0.0;
        for (double v : h) s2 += (v - m) * (v - m);
        W += s2 / (n - 1.0);
        means.push_back(m);
      }
      W /= static_cast<double>(halves.size());
      double mm = 0.0;
      for (double m : means) mm += m;
      mm /= static_cast<double>(means.size());
      double Bn = 0.0;
      for (double m : means) Bn += (m - mm) * (m - mm);
      Bn /= static_cast<double>(means.size() - 1);
      const double var_plus = (n - 1.0) / n * W + Bn;
      rep.split_rhat = W > 0.0 ? std::sqrt(var_plus / W) : 1.0;
    }
  }
  rep.flagged = std::any_of(rep.chains.begin(), rep.chains.end(), [](const ChainSummary& c) { return c.pathological; });
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

OscillationReport bulk_oscillation(const McReport& report, double bulk_lo, double bulk_hi) {
  if (report.bin_edges.size() < 2) throw InvalidArgument("oscillation: report has no density histogram");
  const double w = report.bin_edges[1] - report.bin_edges[0];
  const double period = report.params.p * report.params.gamma;
  const long P = std::lround(period / w);
  if (P < 2 || std::abs(P * w - period) > 1e-9 * period) {
    throw InvalidArgument("oscillation: bin width must divide p gamma into at least two bins");
  }
  std::vector<double> sum(static_cast<std::size_t>(P), 0.0);
  std::vector<double> err2(static_cast<std::size_t>(P), 0.0);
  std::vector<int> cnt(static_cast<std::size_t>(P), 0);
  for (std::size_t i = 0; i + 1 < report.bin_edges.size(); ++i) {
    const double c = 0.5 * (report.bin_edges[i] + report.bin_edges[i + 1]);
    if (c < bulk_lo || c > bulk_hi) continue;
    long ph = static_cast<long>(std::floor(c / w)) % P;
    if (ph < 0) ph += P;
    sum[static_cast<std::size_t>(ph)] += report.density[i].mean;
    err2[static_cast<std::size_t>(ph)] += report.density[i].error * report.density[i].error;
    ++cnt[static_cast<std::size_t>(ph)];
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double max_err = 0.0;
  for (long ph = 0; ph < P; ++ph) {
    const auto u = static_cast<std::size_t>(ph);
    if (cnt[u] == 0) throw InvalidArgument("oscillation: bulk window shorter than one period");
    const double m = sum[u] / cnt[u];
    lo = std::min(lo, m);
    hi = std::max(hi, m);
    max_err = std::max(max_err, std::sqrt(err2[u]) / cnt[u]);
  }
  OscillationReport r;
  r.period_bins = static_cast<int>(P);
  r.amplitude = 0.5 * (hi - lo);
  r.folded_contrast = max_err > 0.0 ? r.amplitude / max_err : std::numeric_limits<double>::infinity();
  return r;
}

}  // namespace laughlin
