// Copyright 2026 The laughlin Authors
// SPDX-License-Identifier: Apache-2.0

#include "laughlin/expansion.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

#include "laughlin/errors.hpp"

namespace laughlin {

int default_expansion_cap(int p) noexcept {
  if (p <= 2) return 10;
  if (p == 3) return 8;
  return 6;
}

// ---------------------------------------------------------------------------

CoefficientTable::CoefficientTable(ModelParams params, std::vector<OrbitalConfig> keys,
                                   std::vector<BigInt> coeffs)
    : params_(params) {
  if (keys.size() != coeffs.size()) throw InvalidArgument("key/coefficient count mismatch");
  keys_.reserve(keys.size());
  coeffs_.reserve(coeffs.size());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (coeffs[i] == 0) continue;
    if (!keys_.empty() && !(keys_.back() < keys[i])) {
      throw InvalidArgument("coefficient table keys must be strictly increasing");
    }
    require_canonical(keys[i], params_);
    if (!is_admissible(keys[i], params_)) {
      throw InvalidArgument("inadmissible key " + keys[i].to_string() + " in coefficient table");
    }
    keys_.push_back(std::move(keys[i]));
    coeffs_.push_back(std::move(coeffs[i]));
  }
  index_.reserve(keys_.size());
  for (std::size_t i = 0; i < keys_.size(); ++i) index_.emplace(keys_[i], i);
}

BigInt CoefficientTable::coefficient(const OrbitalConfig& m) const {
  const BigInt* c = find(m);
  return c ? *c : BigInt(0);
}

const BigInt* CoefficientTable::find(const OrbitalConfig& m) const {
  auto it = index_.find(m);
  return it == index_.end() ? nullptr : &coeffs_[it->second];
}

const BigInt* CoefficientTable::find(std::span<const int> m) const {
  return find(OrbitalConfig(std::vector<int>(m.begin(), m.end())));
}

bool operator==(const CoefficientTable& a, const CoefficientTable& b) {
  return a.params_.p == b.params_.p && a.params_.N == b.params_.N && a.keys_ == b.keys_ &&
         a.coeffs_ == b.coeffs_;
}

// ---------------------------------------------------------------------------

double gaussian_weight(const OrbitalConfig& m, int p, double gamma) {
  const auto N = static_cast<int>(m.size());
  const double exponent =
      0.5 * gamma * gamma * static_cast<double>(m.sum_squares() - root_sum_squares(p, N));
  return std::exp(exponent);
}

AmplitudeTable::AmplitudeTable(ModelParams params, std::vector<AmplitudeEntry> entries)
    : params_(params), entries_(std::move(entries)) {
  // Ordered summation keeps C_N independent of thread count.
  double s = 0.0;
  for (const auto& e : entries_) s += e.A * e.A;
  norm_ = s;
}

AmplitudeTable amplitudes(const CoefficientTable& table) {
  return amplitudes(table, table.params().gamma);
}

AmplitudeTable amplitudes(const CoefficientTable& table, double gamma) {
  ModelParams params = table.params();
  params.gamma = gamma;
  params.validate();
  const auto& keys = table.keys();
  const auto& coeffs = table.coefficients();
  std::vector<AmplitudeEntry> entries(keys.size());

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(keys.size()); ++i) {
    const auto u = static_cast<std::size_t>(i);
    AmplitudeEntry e;
    e.m = keys[u];
    e.n = OccupationConfig::from_orbitals(e.m, params.num_orbitals());
    e.partition = partition_of(e.m, params);
    e.a = coeffs[u].convert_to<double>() * gaussian_weight(e.m, params.p, gamma);
    e.A = params.fermionic() ? e.a : e.a / std::sqrt(e.n.factorial_product());
    entries[u] = std::move(e);
  }
  return AmplitudeTable(params, std::move(entries));
}

// ---------------------------------------------------------------------------

namespace {

long long binomial(int n, int k) {
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// Sort t in place. Returns the permutation sign (antisymmetric case, 0 on a
/// repeated entry) or 1 (symmetric case).
int sort_with_sign(std::vector<int>& t, bool antisymmetric) {
  int sign = 1;
  for (std::size_t i = 1; i < t.size(); ++i) {
    int v = t[i];
    std::size_t j = i;
    while (j > 0 && t[j - 1] > v) {
      t[j] = t[j - 1];
      --j;
      sign = -sign;
    }
    t[j] = v;
  }
  if (!antisymmetric) return 1;
  if (std::adjacent_find(t.begin(), t.end()) != t.end()) return 0;
  return sign;
}

/// Coefficient of the canonical monomial m in the N-particle polynomial,
/// computed from the (N-1)-particle table.
BigInt coefficient_from_previous(const OrbitalConfig& m, const CoefficientTable& previous, int p,
                                 bool fermionic) {
  const auto N = static_cast<int>(m.size());
  const auto& idx = m.vec();
  std::vector<long long> binom(static_cast<std::size_t>(p + 1));
  for (int e = 0; e <= p; ++e) binom[static_cast<std::size_t>(e)] = binomial(p, e) * ((e % 2) ? -1 : 1);

  // Peel Z_1 (budget m_1) or Z_N (budget p(N-1) - m_N), whichever is cheaper.
  const int budget_first = idx.front();
  const int budget_last = p * (N - 1) - idx.back();
  const bool peel_first = budget_first <= budget_last;
  const int budget = peel_first ? budget_first : budget_last;
  if (budget < 0) return 0;

  // Remaining variables: positions 1..N-1 (peel first) or 0..N-2 (peel last).
  const int offset = peel_first ? 1 : 0;
  const int count = N - 1;
  std::vector<int> lo(static_cast<std::size_t>(count)), hi(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const int mi = idx[static_cast<std::size_t>(i + offset)];
    if (peel_first) {
      // t = m_i - p + e >= 0
      lo[static_cast<std::size_t>(i)] = std::max(0, p - mi);
      hi[static_cast<std::size_t>(i)] = p;
    } else {
      // t = m_i - e >= 0
      lo[static_cast<std::size_t>(i)] = 0;
      hi[static_cast<std::size_t>(i)] = std::min(p, mi);
    }
  }
  // Suffix sums of bounds for pruning.
  std::vector<int> lo_suffix(static_cast<std::size_t>(count + 1), 0), hi_suffix(static_cast<std::size_t>(count + 1), 0);
  for (int i = count - 1; i >= 0; --i) {
    lo_suffix[static_cast<std::size_t>(i)] = lo_suffix[static_cast<std::size_t>(i + 1)] + lo[static_cast<std::size_t>(i)];
    hi_suffix[static_cast<std::size_t>(i)] = hi_suffix[static_cast<std::size_t>(i + 1)] + hi[static_cast<std::size_t>(i)];
  }
  if (budget < lo_suffix[0] || budget > hi_suffix[0]) return 0;

  BigInt total = 0;
  std::vector<int> e(static_cast<std::size_t>(count), 0);
  std::vector<int> t(static_cast<std::size_t>(count));

  auto leaf = [&]() {
    long long factor = 1;
    for (int i = 0; i < count; ++i) {
      const int ei = e[static_cast<std::size_t>(i)];
      factor *= binom[static_cast<std::size_t>(ei)];
      const int mi = idx[static_cast<std::size_t>(i + offset)];
      t[static_cast<std::size_t>(i)] = peel_first ? mi - p + ei : mi - ei;
    }
    const int sign = sort_with_sign(t, fermionic);
    if (sign == 0) return;
    const BigInt* c = previous.find(std::span<const int>(t));
    if (!c) return;
    if (sign * factor > 0) {
      total += (*c) * static_cast<long long>(std::llabs(factor));
    } else {
      total -= (*c) * static_cast<long long>(std::llabs(factor));
    }
  };

  auto rec = [&](auto&& self, int i, int remaining) -> void {
    if (i == count) {
      if (remaining == 0) leaf();
      return;
    }
    const auto u = static_cast<std::size_t>(i);
    const int from = std::max(lo[u], remaining - hi_suffix[u + 1]);
    const int to = std::min(hi[u], remaining - lo_suffix[u + 1]);
    for (int v = from; v <= to; ++v) {
      e[u] = v;
      self(self, i + 1, remaining - v);
    }
  };
  rec(rec, 0, budget);
  return total;
}

int resolve_cap(int p, const ExpansionLimits& limits) {
  return limits.max_N > 0 ? limits.max_N : default_expansion_cap(p);
}

CoefficientTable base_table(const ModelParams& params) {
  return CoefficientTable(params.with_N(1), {OrbitalConfig({0})}, {BigInt(1)});
}

template <bool Parallel>
CoefficientTable expand_step_impl(const CoefficientTable& previous, const ExpansionLimits& limits) {
  const ModelParams params = previous.params().with_N(previous.params().N + 1);
  const int cap = resolve_cap(params.p, limits);
  if (params.N > cap) {
    throw ResourceLimit("expansion: N = " + std::to_string(params.N) + " exceeds cap " +
                        std::to_string(cap) + " for p = " + std::to_string(params.p));
  }
  std::vector<OrbitalConfig> candidates = enumerate_admissible(params);
  if (candidates.size() > limits.max_configs) {
    throw ResourceLimit("expansion: " + std::to_string(candidates.size()) +
                        " admissible configs exceed the configured budget");
  }
  std::vector<BigInt> coeffs(candidates.size());
  const bool fermionic = params.fermionic();
  const auto n = static_cast<std::ptrdiff_t>(candidates.size());

  if constexpr (Parallel) {
#pragma omp parallel for schedule(dynamic, 8)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      coeffs[static_cast<std::size_t>(i)] =
          coefficient_from_previous(candidates[static_cast<std::size_t>(i)], previous, params.p, fermionic);
    }
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      coeffs[static_cast<std::size_t>(i)] =
          coefficient_from_previous(candidates[static_cast<std::size_t>(i)], previous, params.p, fermionic);
    }
  }
  return CoefficientTable(params, std::move(candidates), std::move(coeffs));
}

}  // namespace

CoefficientTable expand_step(const CoefficientTable& previous, const ExpansionLimits& limits) {
  return expand_step_impl<true>(previous, limits);
}

CoefficientTable expand_step_serial(const CoefficientTable& previous, const ExpansionLimits& limits) {
  return expand_step_impl<false>(previous, limits);
}

std::vector<CoefficientTable> expand_sequence(const ModelParams& params, const ExpansionLimits& limits) {
  params.validate();
  const int cap = resolve_cap(params.p, limits);
  if (params.N > cap) {
    throw ResourceLimit("expansion: N = " + std::to_string(params.N) + " exceeds cap " +
                        std::to_string(cap) + " for p = " + std::to_string(params.p));
  }
  std::vector<CoefficientTable> tables;
  tables.reserve(static_cast<std::size_t>(params.N));
  tables.push_back(base_table(params));
  while (tables.back().params().N < params.N) tables.push_back(expand_step(tables.back(), limits));
  return tables;
}

CoefficientTable expand(const ModelParams& params, const ExpansionLimits& limits) {
  auto tables = expand_sequence(params, limits);
  return std::move(tables.back());
}

CoefficientTable expand_by_multiplication(const ModelParams& params) {
  params.validate();
  const int N = params.N;
  const int p = params.p;
  if (N > 6) throw ResourceLimit("expand_by_multiplication is limited to N <= 6");

  using Poly = std::map<std::vector<int>, BigInt>;
  Poly poly;
  poly.emplace(std::vector<int>(static_cast<std::size_t>(N), 0), BigInt(1));

  for (int k = 1; k < N; ++k) {
    for (int j = 0; j < k; ++j) {
      // (Z_k - Z_j)^p = sum_e C(p,e) (-Z_j)^e Z_k^(p-e)
      Poly next;
      for (const auto& [exps, c] : poly) {
        for (int e = 0; e <= p; ++e) {
          auto x = exps;
          x[static_cast<std::size_t>(j)] += e;
          x[static_cast<std::size_t>(k)] += p - e;
          BigInt term = c * binomial(p, e);
          if (e % 2) term = -term;
          auto [it, inserted] = next.emplace(std::move(x), term);
          if (!inserted) it->second += term;
        }
      }
      poly.clear();
      for (auto& [x, c] : next) {
        if (c != 0) poly.emplace(x, std::move(c));
      }
    }
  }

  std::vector<OrbitalConfig> keys;
  std::vector<BigInt> coeffs;
  for (const auto& [x, c] : poly) {
    const bool sorted = std::is_sorted(x.begin(), x.end());
    if (!sorted) continue;
    if (params.fermionic() && std::adjacent_find(x.begin(), x.end()) != x.end()) continue;
    keys.emplace_back(x);
    coeffs.push_back(c);
  }
  // std::map iterates in lexicographic order, matching the table's key order.
  return CoefficientTable(params, std::move(keys), std::move(coeffs));
}

// ---------------------------------------------------------------------------

ProductRuleReport verify_product_rule(std::span<const CoefficientTable> tables) {
  if (tables.empty()) throw InvalidArgument("verify_product_rule: no tables");
  const CoefficientTable& top = tables.back();
  const ModelParams& params = top.params();
  const int N = params.N;
  const int p = params.p;
  if (static_cast<int>(tables.size()) < N) {
    throw InvalidArgument("verify_product_rule: missing sub-table, need all N' <= " + std::to_string(N));
  }
  for (int i = 0; i < N; ++i) {
    if (tables[static_cast<std::size_t>(i)].params().N != i + 1 || tables[static_cast<std::size_t>(i)].params().p != p) {
      throw InvalidArgument("verify_product_rule: tables must be ordered N = 1, 2, ... with equal p");
    }
  }

  ProductRuleReport report;
  for (std::size_t e = 0; e < top.size(); ++e) {
    const auto& m = top.keys()[e].vec();
    const BigInt& c = top.coefficients()[e];
    long long partial = 0;
    bool factorizable = false;
    for (int k = 1; k < N; ++k) {
      partial += m[static_cast<std::size_t>(k - 1)];
      if (partial != static_cast<long long>(p) * k * (k - 1) / 2) continue;
      factorizable = true;
      std::vector<int> left(m.begin(), m.begin() + k);
      std::vector<int> right(m.begin() + k, m.end());
      for (int& v : right) v -= p * k;
      const BigInt cl = tables[static_cast<std::size_t>(k - 1)].coefficient(OrbitalConfig(left));
      const BigInt cr = tables[static_cast<std::size_t>(N - k - 1)].coefficient(OrbitalConfig(right));
      ++report.checked;
      if (cl * cr != c) {
        report.violations.push_back(top.keys()[e].to_string() + " split at " + std::to_string(p * k) + ": " +
                                    c.str() + " != " + cl.str() + " * " + cr.str());
      }
    }
    if (factorizable) ++report.factorizable;
  }
  return report;
}

// ---------------------------------------------------------------------------

namespace {

using Real = boost::multiprecision::cpp_bin_float_50;
using Complex = boost::multiprecision::cpp_complex_50;

Complex determinant(std::vector<Complex> a, int n) {
  Complex det = 1;
  auto at = [&](int r, int c) -> Complex& { return a[static_cast<std::size_t>(r * n + c)]; };
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r) {
      if (abs(at(r, col)) > abs(at(pivot, col))) pivot = r;
    }
    if (abs(at(pivot, col)) == 0) return Complex(0);
    if (pivot != col) {
      for (int c = 0; c < n; ++c) std::swap(at(col, c), at(pivot, c));
      det = -det;
    }
    const Complex d = at(col, col);
    det *= d;
    for (int r = col + 1; r < n; ++r) {
      const Complex f = at(r, col) / d;
      for (int c = col; c < n; ++c) at(r, c) -= f * at(col, c);
    }
  }
  return det;
}

// Ryser's formula.
Complex permanent(const std::vector<Complex>& a, int n) {
  Complex total = 0;
  const unsigned full = 1u << n;
  for (unsigned s = 1; s < full; ++s) {
    Complex prod = 1;
    for (int r = 0; r < n; ++r) {
      Complex row = 0;
      for (int c = 0; c < n; ++c) {
        if (s & (1u << c)) row += a[static_cast<std::size_t>(r * n + c)];
      }
      prod *= row;
    }
    const int bits = __builtin_popcount(s);
    if ((n - bits) % 2) {
      total -= prod;
    } else {
      total += prod;
    }
  }
  return total;
}

}  // namespace

double evaluate_oracle(const CoefficientTable& table,
                       std::span<const std::vector<std::complex<double>>> points) {
  const ModelParams& params = table.params();
  const int N = params.N;
  const int p = params.p;
  const int top = params.num_orbitals();
  double worst = 0.0;
  for (const auto& z : points) {
    if (static_cast<int>(z.size()) != N) throw InvalidArgument("oracle point has wrong dimension");
    for (const auto& v : z) {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw InvalidArgument("oracle point is not finite");
    }
    std::vector<Complex> zc;
    for (const auto& v : z) zc.emplace_back(v.real(), v.imag());
    Complex product = 1;
    for (int k = 1; k < N; ++k) {
      for (int j = 0; j < k; ++j) {
        const Complex d = zc[static_cast<std::size_t>(k)] - zc[static_cast<std::size_t>(j)];
        for (int e = 0; e < p; ++e) product *= d;
      }
    }
    // powers[j][e] = z_j^e
    std::vector<std::vector<Complex>> powers(static_cast<std::size_t>(N));
    for (int j = 0; j < N; ++j) {
      auto& row = powers[static_cast<std::size_t>(j)];
      row.resize(static_cast<std::size_t>(top));
      row[0] = 1;
      for (int e = 1; e < top; ++e) row[static_cast<std::size_t>(e)] = row[static_cast<std::size_t>(e - 1)] * zc[static_cast<std::size_t>(j)];
    }
    Complex sum = 0;
    std::vector<Complex> mat(static_cast<std::size_t>(N * N));
    for (std::size_t e = 0; e < table.size(); ++e) {
      const auto& m = table.keys()[e];
      for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) {
          mat[static_cast<std::size_t>(i * N + j)] = powers[static_cast<std::size_t>(j)][static_cast<std::size_t>(m[static_cast<std::size_t>(i)])];
        }
      }
      const Real c(table.coefficients()[e]);
      if (params.fermionic()) {
        sum += c * determinant(mat, N);
      } else {
        const double fact = OccupationConfig::from_orbitals(m, params.num_orbitals()).factorial_product();
        sum += c * permanent(mat, N) / Real(fact);
      }
    }
    const double prod_abs = static_cast<double>(abs(product));
    const double sum_abs = static_cast<double>(abs(sum));
    if (!std::isfinite(prod_abs) || !std::isfinite(sum_abs)) {
      throw InvalidArgument("evaluate_oracle: overflow at extreme point");
    }
    const Real scale = std::max(Real(abs(product)), Real(1e-300));
    worst = std::max(worst, static_cast<double>(Real(abs(sum - product)) / scale));
  }
  return worst;
}

std::vector<std::vector<std::complex<double>>> random_oracle_points(int N, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> radius(0.6, 1.4);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
  std::vector<std::vector<std::complex<double>>> pts(static_cast<std::size_t>(count));
  for (auto& z : pts) {
    z.resize(static_cast<std::size_t>(N));
    for (auto& v : z) v = std::polar(radius(rng), phase(rng));
  }
  return pts;
}

}  // namespace laughlin
