// Copyright 2026 The laughlin Authors
// SPDX-License-Identifier: Apache-2.0

#include "laughlin/renewal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "laughlin/errors.hpp"

namespace laughlin {

namespace {

void check_table_sequence(std::span<const AmplitudeTable> tables) {
  if (tables.empty()) throw InvalidArgument("no amplitude tables supplied");
  for (std::size_t i = 0; i < tables.size(); ++i) {
    if (tables[i].params().N != static_cast<int>(i) + 1) {
      throw InvalidArgument("missing table: expected N = " + std::to_string(i + 1) + " at position " +
                            std::to_string(i));
    }
    if (tables[i].params().p != tables[0].params().p || tables[i].params().gamma != tables[0].params().gamma) {
      throw InvalidArgument("amplitude tables disagree on p or gamma");
    }
  }
}

template <class T>
T activity_equation(std::span<const double> alpha, T r) {
  T s = 0;
  T rn = 1;
  for (std::size_t n = 1; n < alpha.size(); ++n) {
    rn *= r;
    s += static_cast<T>(alpha[n]) * rn;
  }
  return s;
}

template <class T>
T bisect_root(std::span<const double> alpha) {
  if (activity_equation<T>(alpha, T(1)) == 1) return 1;
  T lo = 0;
  T hi = 1;
  for (int it = 0; it < 200; ++it) {
    const T mid = (lo + hi) / 2;
    if (activity_equation<T>(alpha, mid) < 1) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 4 * std::numeric_limits<T>::epsilon() * hi) break;
  }
  return (lo + hi) / 2;
}

}  // namespace

NormSequence norms(std::span<const AmplitudeTable> tables) {
  check_table_sequence(tables);
  NormSequence ns;
  ns.C.push_back(1.0);
  for (const auto& t : tables) ns.C.push_back(t.norm());
  return ns;
}

IrreducibleWeights irreducible_weights(const NormSequence& ns, std::span<const AmplitudeTable> tables,
                                       double tolerance) {
  check_table_sequence(tables);
  const int M = static_cast<int>(tables.size());
  if (ns.max_N() < M) throw InvalidArgument("norm sequence shorter than table sequence");

  IrreducibleWeights w;
  w.alpha.assign(static_cast<std::size_t>(M + 1), 0.0);
  w.alpha_recursive.assign(static_cast<std::size_t>(M + 1), 0.0);
  for (int n = 1; n <= M; ++n) {
    double s = 0.0;
    for (const auto& e : tables[static_cast<std::size_t>(n - 1)].entries()) {
      if (e.partition.num_rods() == 1) s += e.A * e.A;
    }
    w.alpha[static_cast<std::size_t>(n)] = s;

    double rec = ns[n];
    for (int k = 1; k < n; ++k) rec -= w.alpha_recursive[static_cast<std::size_t>(k)] * ns[n - k];
    w.alpha_recursive[static_cast<std::size_t>(n)] = rec;

    const double residual = std::abs(s - rec) / ns[n];
    w.max_residual = std::max(w.max_residual, residual);
  }
  if (w.max_residual > tolerance) {
    throw VerificationFailure("irreducible weights: direct and recursive routes differ by " +
                              std::to_string(w.max_residual));
  }
  return w;
}

ActivitySolution solve_activity(std::span<const double> alpha, bool extended_precision) {
  if (alpha.size() < 2 || !(alpha[1] > 0.0)) throw InvalidArgument("solve_activity requires alpha_1 > 0");
  for (std::size_t n = 1; n < alpha.size(); ++n) {
    if (alpha[n] < 0.0 || !std::isfinite(alpha[n])) throw InvalidArgument("alpha_n must be finite and nonnegative");
  }
  if (activity_equation<double>(alpha, 1.0) < 1.0) {
    throw UnconvergedModel("no root of sum alpha_n r^n = 1 in (0,1]: sum alpha_n = " +
                           std::to_string(activity_equation<double>(alpha, 1.0)));
  }

  ActivitySolution s;
  s.r = bisect_root<double>(alpha);
  double mu = 0.0;
  double rn = 1.0;
  std::vector<double> pn(alpha.size(), 0.0);
  for (std::size_t n = 1; n < alpha.size(); ++n) {
    rn *= s.r;
    pn[n] = alpha[n] * rn;
    mu += static_cast<double>(n) * pn[n];
  }
  s.mu = mu;

  const std::size_t M = alpha.size() - 1;
  if (M >= 2) {
    const double last = pn[M];
    const double prev = pn[M - 1];
    if (last == 0.0) {
      s.tail_mass = 0.0;
    } else if (prev == 0.0) {
      s.tail_mass = std::numeric_limits<double>::infinity();
      s.tail_moment = s.tail_mass;
    } else {
      const double q = last / prev;
      if (q >= 1.0) {
        s.tail_mass = std::numeric_limits<double>::infinity();
        s.tail_moment = s.tail_mass;
      } else {
        const double Md = static_cast<double>(M);
        s.tail_mass = last * q / (1.0 - q);
        s.tail_moment = last * (Md * q / (1.0 - q) + q / ((1.0 - q) * (1.0 - q)));
      }
    }
    s.root_bias = bisect_root<double>(alpha.first(M)) - s.r;
  } else {
    s.tail_mass = 0.0;
  }

  if (extended_precision) {
    const long double r_ext = bisect_root<long double>(alpha);
    s.extended_precision_delta = static_cast<double>(std::abs(r_ext - static_cast<long double>(s.r)));
  }
  return s;
}

void RenewalModel::require_converged(bool override_unconverged) const {
  if (converged || override_unconverged) return;
  throw UnconvergedModel("renewal model unconverged: estimated tail mass " + std::to_string(tail_mass) +
                         " exceeds threshold; increase N or pass the override flag");
}

namespace {

void fill_from_alpha(RenewalModel& m, bool extended_precision, double tail_threshold) {
  const ActivitySolution s = solve_activity(m.alpha, extended_precision);
  m.r = s.r;
  m.mu = s.mu;
  m.tail_mass = s.tail_mass;
  m.tail_moment = s.tail_moment;
  m.root_bias = s.root_bias;
  m.extended_precision_delta = s.extended_precision_delta;
  m.converged = s.tail_mass <= tail_threshold;
  m.pn.assign(m.alpha.size(), 0.0);
  double rn = 1.0;
  for (std::size_t n = 1; n < m.alpha.size(); ++n) {
    rn *= m.r;
    m.pn[n] = m.alpha[n] * rn;
  }
}

}  // namespace

RenewalModel build_renewal_model(std::span<const AmplitudeTable> tables, const RenewalOptions& options) {
  check_table_sequence(tables);
  RenewalModel m;
  m.p = tables[0].params().p;
  m.gamma = tables[0].params().gamma;
  m.norms = norms(tables);
  IrreducibleWeights w = irreducible_weights(m.norms, tables, options.alpha_tolerance);
  m.alpha = std::move(w.alpha);
  m.alpha_residual = w.max_residual;
  fill_from_alpha(m, options.extended_precision, options.tail_threshold);

  const int M = m.max_N();
  m.uN.assign(static_cast<std::size_t>(M + 1), 1.0);
  double rn = 1.0;
  for (int n = 1; n <= M; ++n) {
    rn *= m.r;
    m.uN[static_cast<std::size_t>(n)] = m.norms[n] * rn;
  }
  m.c_sub = 1.0;
  for (int a = 1; a <= M; ++a) {
    for (int b = 1; a + b <= M; ++b) {
      m.c_sub = std::max(m.c_sub, m.norms[a + b] / (m.norms[a] * m.norms[b]));
    }
  }
  return m;
}

RenewalModel build_renewal_model(const ModelParams& params, const RenewalOptions& options,
                                 const ExpansionLimits& limits) {
  const auto coeffs = expand_sequence(params, limits);
  std::vector<AmplitudeTable> tables;
  tables.reserve(coeffs.size());
  for (const auto& c : coeffs) tables.push_back(amplitudes(c, params.gamma));
  return build_renewal_model(tables, options);
}

RenewalModel renewal_model_from_alpha(std::span<const double> alpha) {
  RenewalModel m;
  m.alpha.assign(alpha.begin(), alpha.end());
  fill_from_alpha(m, false, kDefaultTailThreshold);
  // Norms and u follow from the renewal equation C_N = sum_k alpha_k C_{N-k}.
  const int M = m.max_N();
  m.norms.C.assign(static_cast<std::size_t>(M + 1), 1.0);
  for (int N = 1; N <= M; ++N) {
    double c = 0.0;
    for (int k = 1; k <= N; ++k) c += m.alpha[static_cast<std::size_t>(k)] * m.norms[N - k];
    m.norms.C[static_cast<std::size_t>(N)] = c;
  }
  m.uN.assign(static_cast<std::size_t>(M + 1), 1.0);
  double rn = 1.0;
  for (int n = 1; n <= M; ++n) {
    rn *= m.r;
    m.uN[static_cast<std::size_t>(n)] = m.norms[n] * rn;
  }
  m.c_sub = 1.0;
  for (int a = 1; a <= M; ++a) {
    for (int b = 1; a + b <= M; ++b) m.c_sub = std::max(m.c_sub, m.norms[a + b] / (m.norms[a] * m.norms[b]));
  }
  return m;
}

RenewalFunctionReport renewal_function(const RenewalModel& model) {
  const int M = model.max_N();
  RenewalFunctionReport rep;
  rep.u_direct = model.uN;
  rep.u_convolution.assign(static_cast<std::size_t>(M + 1), 0.0);
  rep.u_convolution[0] = 1.0;
  for (int N = 1; N <= M; ++N) {
    double u = 0.0;
    for (int k = 1; k <= N; ++k) u += model.pn[static_cast<std::size_t>(k)] * rep.u_convolution[static_cast<std::size_t>(N - k)];
    rep.u_convolution[static_cast<std::size_t>(N)] = u;
    rep.max_discrepancy = std::max(rep.max_discrepancy, std::abs(u - rep.u_direct[static_cast<std::size_t>(N)]));
  }
  rep.sup_deviation.assign(static_cast<std::size_t>(M + 1), 0.0);
  double sup = 0.0;
  for (int d = M; d >= 0; --d) {
    sup = std::max(sup, std::abs(rep.u_direct[static_cast<std::size_t>(d)] - 1.0 / model.mu));
    rep.sup_deviation[static_cast<std::size_t>(d)] = sup;
  }
  return rep;
}

std::vector<double> renewal_u_sequence(const RenewalModel& model, int kmax) {
  if (kmax < 0) throw InvalidArgument("renewal_u_sequence: negative index");
  const int M = model.max_N();
  std::vector<double> u(static_cast<std::size_t>(kmax + 1), 0.0);
  for (int k = 0; k <= kmax; ++k) {
    if (k <= M) {
      u[static_cast<std::size_t>(k)] = model.uN.at(static_cast<std::size_t>(k));
      continue;
    }
    double s = 0.0;
    for (int j = 1; j <= M; ++j) s += model.pn[static_cast<std::size_t>(j)] * u[static_cast<std::size_t>(k - j)];
    u[static_cast<std::size_t>(k)] = s;
  }
  return u;
}

double renewal_u(const RenewalModel& model, int k) {
  if (k < 0) throw InvalidArgument("renewal_u: negative index");
  if (k <= model.max_N()) return model.uN.at(static_cast<std::size_t>(k));
  return renewal_u_sequence(model, k).back();
}

double partition_probability(const RodPartition& X, const RenewalModel& model, int N) {
  if (X.particles() != N) {
    throw InvalidArgument("partition " + X.to_string() + " does not sum to N = " + std::to_string(N));
  }
  if (N > model.max_N()) throw InvalidArgument("N exceeds the renewal model range");
  double prod = 1.0;
  for (int n : X.lengths()) prod *= model.alpha.at(static_cast<std::size_t>(n));
  return prod / model.norms[N];
}

double stationary_event_probability(const StationaryEvent& event, const RenewalModel& model) {
  auto rod_product = [&](const std::vector<int>& rods) {
    double prod = 1.0;
    for (int n : rods) {
      if (n < 1) throw InvalidArgument("stationary event: rod lengths must be positive");
      prod *= n <= model.max_N() ? model.pn[static_cast<std::size_t>(n)] : 0.0;
    }
    return prod;
  };
  double prob = rod_product(event.left) / model.mu;
  if (event.gap) {
    if (*event.gap < 0) throw InvalidArgument("stationary event: negative gap");
    prob *= renewal_u(model, *event.gap) * rod_product(event.right);
  } else if (!event.right.empty()) {
    throw InvalidArgument("stationary event: right window requires a gap");
  }
  return prob;
}

LongIntervalCheck long_interval_check(const RenewalModel& model, int N, int window_start, int window_end) {
  const int p = model.p;
  if (N < 1 || N > model.max_N()) throw InvalidArgument("long_interval_check: N outside model range");
  if (window_start < 0 || window_end <= window_start || window_end > p * N) {
    throw InvalidArgument("long_interval_check: window must satisfy 0 <= start < end <= pN");
  }
  LongIntervalCheck c;
  c.d = (window_end - window_start) / p;
  // A rod [pj, p(j+n)) covers the window without a renewal point inside iff
  // pj < start and p(j+n) >= end.
  const double uN = model.uN[static_cast<std::size_t>(N)];
  for (int j = 0; p * j < window_start; ++j) {
    for (int n = 1; j + n <= N; ++n) {
      if (p * (j + n) < window_end) continue;
      c.exact += model.uN[static_cast<std::size_t>(j)] * model.pn[static_cast<std::size_t>(n)] *
                 model.uN[static_cast<std::size_t>(N - j - n)] / uN;
    }
  }
  double tail = 0.0;
  for (int k = std::max(c.d, 1); k <= model.max_N(); ++k) tail += k * model.pn[static_cast<std::size_t>(k)];
  c.bound = model.c_sub * tail;
  return c;
}

}  // namespace laughlin
