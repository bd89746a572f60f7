// Copyright 2026 The laughlin Authors
// SPDX-License-Identifier: Apache-2.0

#include "laughlin/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "laughlin/errors.hpp"

namespace laughlin {

ModelParams::ModelParams(int p_, double gamma_, int N_) : p(p_), gamma(gamma_), N(N_) {
  validate();
}

void ModelParams::validate() const {
  if (p < 1) throw InvalidArgument("p must be >= 1, got " + std::to_string(p));
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw InvalidArgument("gamma must be a positive finite number");
  }
  if (N < 1) throw InvalidArgument("N must be >= 1, got " + std::to_string(N));
}

// ---------------------------------------------------------------------------

OrbitalConfig::OrbitalConfig(std::vector<int> m) : m_(std::move(m)) {}

long long OrbitalConfig::sum() const noexcept {
  return std::accumulate(m_.begin(), m_.end(), 0LL);
}

long long OrbitalConfig::sum_squares() const noexcept {
  long long s = 0;
  for (int v : m_) s += static_cast<long long>(v) * v;
  return s;
}

bool OrbitalConfig::has_repeats() const noexcept {
  return std::adjacent_find(m_.begin(), m_.end()) != m_.end();
}

std::string OrbitalConfig::to_string() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < m_.size(); ++i) os << (i ? "," : "") << m_[i];
  os << ')';
  return os.str();
}

std::size_t OrbitalConfigHash::operator()(const OrbitalConfig& c) const noexcept {
  // FNV-1a over the indices.
  std::uint64_t h = 1469598103934665603ULL;
  for (int v : c.indices()) {
    h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(v));
    h *= 1099511628211ULL;
  }
  return static_cast<std::size_t>(h);
}

// ---------------------------------------------------------------------------

OccupationConfig::OccupationConfig(std::vector<int> n) : n_(std::move(n)) {
  for (int v : n_) {
    if (v < 0) throw InvalidArgument("occupation numbers must be nonnegative");
  }
}

OccupationConfig OccupationConfig::from_orbitals(const OrbitalConfig& m, int num_sites) {
  std::vector<int> n(static_cast<std::size_t>(num_sites), 0);
  for (int k : m.indices()) {
    if (k < 0 || k >= num_sites) throw InvalidArgument("orbital index out of lattice range");
    ++n[static_cast<std::size_t>(k)];
  }
  return OccupationConfig(std::move(n));
}

OrbitalConfig OccupationConfig::to_orbitals() const {
  std::vector<int> m;
  for (std::size_t k = 0; k < n_.size(); ++k) {
    for (int c = 0; c < n_[k]; ++c) m.push_back(static_cast<int>(k));
  }
  return OrbitalConfig(std::move(m));
}

int OccupationConfig::particles() const noexcept {
  return std::accumulate(n_.begin(), n_.end(), 0);
}

double OccupationConfig::factorial_product() const noexcept {
  double f = 1.0;
  for (int v : n_) {
    for (int i = 2; i <= v; ++i) f *= i;
  }
  return f;
}

// ---------------------------------------------------------------------------

RodPartition::RodPartition(std::vector<int> lengths) : lengths_(std::move(lengths)) {
  if (lengths_.empty()) throw InvalidArgument("a rod partition needs at least one rod");
  for (int n : lengths_) {
    if (n < 1) throw InvalidArgument("rod lengths must be positive");
  }
}

int RodPartition::particles() const noexcept {
  return std::accumulate(lengths_.begin(), lengths_.end(), 0);
}

std::vector<int> RodPartition::renewal_set(int p) const {
  std::vector<int> r{0};
  int acc = 0;
  for (int n : lengths_) {
    acc += n;
    r.push_back(p * acc);
  }
  return r;
}

RodPartition RodPartition::from_renewal_set(std::span<const int> points, int p) {
  if (points.size() < 2 || points.front() != 0) {
    throw InvalidArgument("renewal set must start at 0 and contain at least two points");
  }
  std::vector<int> lengths;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const int gap = points[i] - points[i - 1];
    if (gap <= 0 || gap % p != 0) throw InvalidArgument("renewal points must be increasing multiples of p");
    lengths.push_back(gap / p);
  }
  return RodPartition(std::move(lengths));
}

std::string RodPartition::to_string() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < lengths_.size(); ++i) os << (i ? "," : "") << lengths_[i];
  os << ']';
  return os.str();
}

// ---------------------------------------------------------------------------

long long root_sum_squares(int p, int N) noexcept {
  long long s = 0;
  for (long long j = 0; j < N; ++j) s += j * j;
  return static_cast<long long>(p) * p * s;
}

OrbitalConfig root_config(int p, int N) {
  std::vector<int> m(static_cast<std::size_t>(N));
  for (int j = 0; j < N; ++j) m[static_cast<std::size_t>(j)] = p * j;
  return OrbitalConfig(std::move(m));
}

void require_canonical(const OrbitalConfig& m, const ModelParams& params) {
  if (static_cast<int>(m.size()) != params.N) {
    throw InvalidArgument("config " + m.to_string() + " has length " + std::to_string(m.size()) +
                          ", expected N = " + std::to_string(params.N));
  }
  const auto idx = m.indices();
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] < 0 || idx[i] > params.max_orbital()) {
      throw InvalidArgument("config " + m.to_string() + " leaves the lattice {0..pN-p}");
    }
    if (i > 0) {
      if (idx[i] < idx[i - 1]) throw InvalidArgument("config " + m.to_string() + " is not sorted");
      if (params.fermionic() && idx[i] == idx[i - 1]) {
        throw InvalidArgument("fermionic config " + m.to_string() + " has a repeated orbital");
      }
    }
  }
}

bool is_admissible(const OrbitalConfig& m, const ModelParams& params) {
  if (static_cast<int>(m.size()) != params.N) {
    throw InvalidArgument("config length does not match N");
  }
  const int p = params.p;
  long long partial = 0;
  for (int k = 1; k <= params.N; ++k) {
    partial += m[static_cast<std::size_t>(k - 1)];
    const long long bound = static_cast<long long>(p) * k * (k - 1) / 2;
    if (partial < bound) return false;
    if (k == params.N && partial != bound) return false;
  }
  return true;
}

std::vector<int> renewal_points(const OrbitalConfig& m, const ModelParams& params) {
  require_canonical(m, params);
  if (!is_admissible(m, params)) {
    throw InvalidArgument("renewal points requested for inadmissible config " + m.to_string());
  }
  const int p = params.p;
  std::vector<int> r{0};
  long long partial = 0;
  for (int k = 1; k <= params.N; ++k) {
    partial += m[static_cast<std::size_t>(k - 1)];
    if (partial == static_cast<long long>(p) * k * (k - 1) / 2) r.push_back(p * k);
  }
  return r;
}

std::vector<int> renewal_points(const OccupationConfig& n, int p) {
  const int N = n.particles();
  std::vector<int> r{0};
  for (int k = 1; k <= N; ++k) {
    long long count = 0;
    long long moment = 0;
    const int upto = std::min<int>(p * k, static_cast<int>(n.num_sites()));
    for (int j = 0; j < upto; ++j) {
      count += n[static_cast<std::size_t>(j)];
      moment += static_cast<long long>(j) * n[static_cast<std::size_t>(j)];
    }
    if (count == k && moment == static_cast<long long>(p) * k * (k - 1) / 2) r.push_back(p * k);
  }
  return r;
}

RodPartition partition_of(const OrbitalConfig& m, const ModelParams& params) {
  const auto r = renewal_points(m, params);
  return RodPartition::from_renewal_set(r, params.p);
}

std::vector<RodPartition> enumerate_partitions(int N, int cap) {
  if (N < 1) throw InvalidArgument("N must be >= 1");
  if (N > cap) {
    throw ResourceLimit("enumerate_partitions: N = " + std::to_string(N) + " exceeds cap " +
                        std::to_string(cap));
  }
  std::vector<RodPartition> out;
  out.reserve(std::size_t{1} << (N - 1));
  std::vector<int> current;
  // Lexicographic: smaller first part first.
  auto rec = [&](auto&& self, int remaining) -> void {
    if (remaining == 0) {
      out.emplace_back(current);
      return;
    }
    for (int n = 1; n <= remaining; ++n) {
      current.push_back(n);
      self(self, remaining - n);
      current.pop_back();
    }
  };
  rec(rec, N);
  return out;
}

OrbitalConfig translate_config(const OrbitalConfig& m, int p, int shift) {
  std::vector<int> v(m.vec());
  for (int& x : v) x += p * shift;
  return OrbitalConfig(std::move(v));
}

std::vector<OrbitalConfig> enumerate_admissible(const ModelParams& params) {
  params.validate();
  const int N = params.N;
  const int p = params.p;
  const int top = params.max_orbital();
  const int step = params.fermionic() ? 1 : 0;
  const long long target = static_cast<long long>(p) * N * (N - 1) / 2;

  std::vector<OrbitalConfig> out;
  std::vector<int> m(static_cast<std::size_t>(N));

  // Smallest / largest sum achievable by positions k..N-1 given m[k-1] = prev.
  auto min_tail = [&](int prev, int count) {
    long long s = 0;
    int v = prev;
    for (int i = 0; i < count; ++i) {
      v += step;
      s += v;
    }
    return s;
  };
  auto max_tail = [&](int count) {
    long long s = 0;
    for (int i = 0; i < count; ++i) s += top - step * i;
    return s;
  };

  auto rec = [&](auto&& self, int k, int lo, long long partial) -> void {
    if (k == N) {
      if (partial == target) out.emplace_back(m);
      return;
    }
    const int remaining_after = N - k - 1;
    for (int v = lo; v <= top; ++v) {
      const long long s = partial + v;
      if (s < static_cast<long long>(p) * (k + 1) * k / 2) continue;
      if (s + min_tail(v, remaining_after) > target) break;
      if (s + max_tail(remaining_after) < target) continue;
      m[static_cast<std::size_t>(k)] = v;
      self(self, k + 1, v + step, s);
    }
  };
  rec(rec, 0, 0, 0);
  return out;
}

}  // namespace laughlin
