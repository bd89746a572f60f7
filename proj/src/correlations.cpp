// Copyright 2026 The laughlin Authors
// SPDX-License-Identifier: Apache-2.0

#include "laughlin/correlations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <unordered_map>

#include "laughlin/errors.hpp"
#include "laughlin/parallel.hpp"

namespace laughlin {

namespace {

constexpr double kPi = 3.14159265358979323846;

void accumulate_occupation(const AmplitudeEntry& e, std::vector<double>& acc) {
  const double w = e.A * e.A;
  for (int k : e.m.indices()) acc[static_cast<std::size_t>(k)] += w;
}

/// Applies the Wick-ordered monomial to |n>; returns the coefficient, zero if annihilated.
double apply_observable(std::vector<int>& n, const Observable& obs, bool fermionic) {
  double coeff = 1.0;
  auto parity_before = [&](int j) {
    int s = 0;
    for (int i = 0; i < j; ++i) s += n[static_cast<std::size_t>(i)];
    return (s % 2) ? -1.0 : 1.0;
  };
  const int L = static_cast<int>(n.size());
  for (auto it = obs.annihilators.rbegin(); it != obs.annihilators.rend(); ++it) {
    const int j = *it;
    if (j >= L || n[static_cast<std::size_t>(j)] == 0) return 0.0;
    if (fermionic) {
      coeff *= parity_before(j);
    } else {
      coeff *= std::sqrt(static_cast<double>(n[static_cast<std::size_t>(j)]));
    }
    --n[static_cast<std::size_t>(j)];
  }
  for (auto it = obs.creators.rbegin(); it != obs.creators.rend(); ++it) {
    const int j = *it;
    if (j >= L) return 0.0;
    if (fermionic) {
      if (n[static_cast<std::size_t>(j)] == 1) return 0.0;
      coeff *= parity_before(j);
    } else {
      coeff *= std::sqrt(static_cast<double>(n[static_cast<std::size_t>(j)] + 1));
    }
    ++n[static_cast<std::size_t>(j)];
  }
  return coeff;
}

std::unordered_map<OrbitalConfig, std::size_t, OrbitalConfigHash> config_index(const AmplitudeTable& table) {
  std::unordered_map<OrbitalConfig, std::size_t, OrbitalConfigHash> idx;
  idx.reserve(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) idx.emplace(table.entries()[i].m, i);
  return idx;
}

double erf_interval(double lo, double hi) {
  // (1/sqrt(pi)) int_lo^hi e^{-s^2} ds, using erfc on the side away from the origin.
  if (lo >= 0.0) return 0.5 * (std::erfc(lo) - std::erfc(hi));
  if (hi <= 0.0) return 0.5 * (std::erfc(-hi) - std::erfc(-lo));
  return 0.5 * (std::erf(hi) - std::erf(lo));
}

}  // namespace

std::vector<double> occupation_finite(const AmplitudeTable& table) {
  const auto& entries = table.entries();
  auto acc = blocked_vector_sum(entries.size(), static_cast<std::size_t>(table.num_sites()),
                                [&](std::size_t i, std::vector<double>& a) { accumulate_occupation(entries[i], a); });
  for (double& v : acc) v /= table.norm();
  return acc;
}

std::vector<double> occupation_finite_serial(const AmplitudeTable& table) {
  std::vector<double> acc(static_cast<std::size_t>(table.num_sites()), 0.0);
  for (const auto& e : table.entries()) accumulate_occupation(e, acc);
  for (double& v : acc) v /= table.norm();
  return acc;
}

double diagonal_moment(const AmplitudeTable& table, std::span<const int> sites) {
  for (int s : sites) {
    if (s < 0) throw InvalidArgument("diagonal_moment: negative site");
  }
  const auto& entries = table.entries();
  const int L = table.num_sites();
  const double s = blocked_sum(entries.size(), [&](std::size_t i) {
    double v = entries[i].A * entries[i].A;
    for (int k : sites) v *= k < L ? entries[i].n[static_cast<std::size_t>(k)] : 0;
    return v;
  });
  return s / table.norm();
}

// ---------------------------------------------------------------------------

Observable Observable::number(int k) { return Observable{{k}, {k}}; }

Observable Observable::pair_hop(int k1, int k2, int n2, int n1) { return Observable{{k1, k2}, {n2, n1}}; }

Observable Observable::parse(const std::string& text) {
  std::istringstream in(text);
  std::string tok;
  Observable obs;
  bool seen_annihilator = false;
  while (in >> tok) {
    const bool dagger = tok.rfind("c*", 0) == 0;
    if (!dagger && tok.rfind('c', 0) != 0) throw InvalidArgument("malformed observable token '" + tok + "'");
    const std::string digits = tok.substr(dagger ? 2 : 1);
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) {
      throw InvalidArgument("malformed observable token '" + tok + "'");
    }
    const int site = std::stoi(digits);
    if (dagger) {
      if (seen_annihilator) throw InvalidArgument("malformed observable: not Wick ordered");
      obs.creators.push_back(site);
    } else {
      seen_annihilator = true;
      obs.annihilators.push_back(site);
    }
  }
  return obs;
}

std::string Observable::to_string() const {
  std::string s;
  for (int k : creators) s += (s.empty() ? "" : " ") + std::string("c*") + std::to_string(k);
  for (int k : annihilators) s += (s.empty() ? "" : " ") + std::string("c") + std::to_string(k);
  return s;
}

double moments_finite(const AmplitudeTable& table, const Observable& obs) {
  if (obs.creators.empty() || obs.creators.size() != obs.annihilators.size()) {
    throw InvalidArgument("malformed observable: needs equal, nonzero numbers of creators and annihilators");
  }
  long long in_sum = 0;
  long long out_sum = 0;
  for (int k : obs.creators) {
    if (k < 0) throw InvalidArgument("malformed observable: negative site");
    out_sum += k;
  }
  for (int k : obs.annihilators) {
    if (k < 0) throw InvalidArgument("malformed observable: negative site");
    in_sum += k;
  }
  // Momentum conservation around the cylinder.
  if (in_sum != out_sum) return 0.0;

  const auto idx = config_index(table);
  const auto& entries = table.entries();
  const bool fermionic = table.params().fermionic();
  const double s = blocked_sum(entries.size(), [&](std::size_t i) {
    const auto counts = entries[i].n.counts();
    std::vector<int> n(counts.begin(), counts.end());
    const double c = apply_observable(n, obs, fermionic);
    if (c == 0.0) return 0.0;
    const auto it = idx.find(OccupationConfig(std::move(n)).to_orbitals());
    if (it == idx.end()) return 0.0;
    return entries[it->second].A * c * entries[i].A;
  });
  return s / table.norm();
}

// ---------------------------------------------------------------------------

Eigen::MatrixXd QuasiStateDecomposition::reconstruction() const {
  const auto d = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t x = 0; x < partitions.size(); ++x) {
    if (omega[x].size() == 0) continue;
    m += weights[x] * omega[x];
  }
  return m;
}

Eigen::MatrixXd QuasiStateDecomposition::projector() const {
  const Eigen::Map<const Eigen::VectorXd> v(amplitudes.data(), static_cast<Eigen::Index>(amplitudes.size()));
  return v * v.transpose() / norm;
}

double QuasiStateDecomposition::reconstruction_error() const {
  return (reconstruction() - projector()).cwiseAbs().maxCoeff();
}

std::optional<std::size_t> QuasiStateDecomposition::index_of(const RodPartition& X) const {
  const auto it = std::lower_bound(partitions.begin(), partitions.end(), X);
  if (it == partitions.end() || *it != X) return std::nullopt;
  return static_cast<std::size_t>(it - partitions.begin());
}

std::optional<std::size_t> QuasiStateDecomposition::basis_index(const OccupationConfig& n) const {
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (basis[i] == n) return i;
  }
  return std::nullopt;
}

double QuasiStateDecomposition::diagonal_expectation(std::size_t X, std::span<const double> values) const {
  if (X >= omega.size() || omega[X].size() == 0) throw InvalidArgument("omega_X undefined for this partition");
  if (values.size() != basis.size()) throw InvalidArgument("observable length does not match the basis");
  double s = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i) s += omega[X](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) * values[i];
  return s;
}

QuasiStateDecomposition quasi_state(const AmplitudeTable& table, std::size_t max_dim) {
  if (table.size() > max_dim) {
    throw ResourceLimit("quasi_state: sector dimension " + std::to_string(table.size()) + " exceeds cap " +
                        std::to_string(max_dim));
  }
  const ModelParams& params = table.params();
  QuasiStateDecomposition q;
  q.params = params;
  q.norm = table.norm();
  q.partitions = enumerate_partitions(params.N);
  std::sort(q.partitions.begin(), q.partitions.end());
  const std::size_t P = q.partitions.size();
  const auto d = static_cast<Eigen::Index>(table.size());

  // u_Y as dense vectors on the table basis.
  std::vector<Eigen::VectorXd> u(P, Eigen::VectorXd::Zero(d));
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto& e = table.entries()[i];
    q.basis.push_back(e.n);
    q.amplitudes.push_back(e.A);
    const auto pos = std::lower_bound(q.partitions.begin(), q.partitions.end(), e.partition);
    u[static_cast<std::size_t>(pos - q.partitions.begin())](static_cast<Eigen::Index>(i)) = e.A;
  }

  std::vector<std::vector<int>> renewal(P);
  for (std::size_t x = 0; x < P; ++x) renewal[x] = q.partitions[x].renewal_set(params.p);

  q.weights.assign(P, 0.0);
  q.omega.assign(P, Eigen::MatrixXd());
  std::vector<double> unorm(P);
  for (std::size_t x = 0; x < P; ++x) {
    unorm[x] = u[x].squaredNorm();
    q.weights[x] = unorm[x] / q.norm;
    if (unorm[x] > 0.0) q.omega[x] = Eigen::MatrixXd::Zero(d, d);
  }

  // Each ordered pair (Y, Z) belongs to the X with R(X) = R(Y) cap R(Z).
  for (std::size_t y = 0; y < P; ++y) {
    if (unorm[y] == 0.0) continue;
    for (std::size_t z = 0; z < P; ++z) {
      if (unorm[z] == 0.0) continue;
      std::vector<int> common;
      std::set_intersection(renewal[y].begin(), renewal[y].end(), renewal[z].begin(), renewal[z].end(),
                            std::back_inserter(common));
      const RodPartition X = RodPartition::from_renewal_set(common, params.p);
      const auto x = static_cast<std::size_t>(std::lower_bound(q.partitions.begin(), q.partitions.end(), X) -
                                              q.partitions.begin());
      if (unorm[x] == 0.0) {
        throw VerificationFailure("quasi_state: pair contributes to a partition with zero weight " + X.to_string());
      }
      q.omega[x].noalias() += u[y] * u[z].transpose() / unorm[x];
    }
  }
  return q;
}

// ---------------------------------------------------------------------------

double RodExpectations::nu_at(int n, int s) const {
  if (!available(n)) throw InvalidArgument("rod size " + std::to_string(n) + " unavailable");
  if (s < 0 || s >= p * n) return 0.0;
  return nu[static_cast<std::size_t>(n)][static_cast<std::size_t>(s)];
}

double RodExpectations::pair_at(int n, int s, int t) const {
  if (!available(n)) throw InvalidArgument("rod size " + std::to_string(n) + " unavailable");
  const int w = p * n;
  if (s < 0 || s >= w || t < 0 || t >= w) return 0.0;
  return pair[static_cast<std::size_t>(n)][static_cast<std::size_t>(s * w + t)];
}

RodExpectations rod_expectations(std::span<const AmplitudeTable> tables) {
  if (tables.empty()) throw InvalidArgument("rod_expectations: no tables");
  RodExpectations r;
  r.p = tables[0].params().p;
  const int M = static_cast<int>(tables.size());
  r.alpha.assign(static_cast<std::size_t>(M + 1), 0.0);
  r.nu.assign(static_cast<std::size_t>(M + 1), {});
  r.pair.assign(static_cast<std::size_t>(M + 1), {});
  for (int n = 1; n <= M; ++n) {
    const auto& t = tables[static_cast<std::size_t>(n - 1)];
    if (t.params().N != n || t.params().p != r.p) throw InvalidArgument("rod_expectations: tables must be N = 1, 2, ...");
    const int w = r.p * n;
    std::vector<double> nu(static_cast<std::size_t>(w), 0.0);
    std::vector<double> pair(static_cast<std::size_t>(w * w), 0.0);
    double alpha = 0.0;
    for (const auto& e : t.entries()) {
      if (e.partition.num_rods() != 1) continue;
      const double a2 = e.A * e.A;
      alpha += a2;
      const auto counts = e.n.counts();
      for (int s = 0; s < static_cast<int>(counts.size()); ++s) {
        const int ns = counts[static_cast<std::size_t>(s)];
        if (ns == 0) continue;
        nu[static_cast<std::size_t>(s)] += a2 * ns;
        for (int u = 0; u < static_cast<int>(counts.size()); ++u) {
          const int nu_ = counts[static_cast<std::size_t>(u)];
          if (nu_ != 0) pair[static_cast<std::size_t>(s * w + u)] += a2 * ns * nu_;
        }
      }
    }
    r.alpha[static_cast<std::size_t>(n)] = alpha;
    if (alpha == 0.0) {
      r.skipped.push_back(n);
      continue;
    }
    for (double& v : nu) v /= alpha;
    for (double& v : pair) v /= alpha;
    r.nu[static_cast<std::size_t>(n)] = std::move(nu);
    r.pair[static_cast<std::size_t>(n)] = std::move(pair);
  }
  return r;
}

namespace {

int floor_div(int a, int b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

/// mu^{-1} sum_n p_n sum_j nu_n(k + pj): probability weight of site k in the stationary rod process.
double stationary_occupation(const RenewalModel& model, const RodExpectations& rods, int k) {
  const int p = model.p;
  const int M = std::min(model.max_N(), rods.max_n());
  double s = 0.0;
  for (int n = 1; n <= M; ++n) {
    if (!rods.available(n)) continue;
    double inner = 0.0;
    // Rods start at multiples of p at or left of k.
    const int k0 = k - p * floor_div(k, p);
    for (int j = 0; j < n; ++j) inner += rods.nu_at(n, k0 + p * j);
    s += model.pn[static_cast<std::size_t>(n)] * inner;
  }
  return s / model.mu;
}

}  // namespace

std::vector<double> occupation_infinite(const RenewalModel& model, const RodExpectations& rods,
                                        bool override_unconverged) {
  model.require_converged(override_unconverged);
  if (rods.p != model.p) throw InvalidArgument("rod expectations and renewal model disagree on p");
  std::vector<double> occ(static_cast<std::size_t>(model.p));
  for (int k = 0; k < model.p; ++k) occ[static_cast<std::size_t>(k)] = stationary_occupation(model, rods, k);
  return occ;
}

PairCorrelation pair_infinite(const RenewalModel& model, const RodExpectations& rods, int k, int l,
                              bool override_unconverged) {
  model.require_converged(override_unconverged);
  if (rods.p != model.p) throw InvalidArgument("rod expectations and renewal model disagree on p");
  const int p = model.p;
  if (k > l) std::swap(k, l);
  const int shift = p * floor_div(k, p);
  k -= shift;
  l -= shift;
  const int M = std::min(model.max_N(), rods.max_n());
  const auto u = renewal_u_sequence(model, l / p + 2);

  double moment = 0.0;
  for (int n = 1; n <= M; ++n) {
    if (!rods.available(n)) continue;
    const double pn = model.pn[static_cast<std::size_t>(n)];
    // Rod A starts at P = p i <= k and ends at E = P + pn > k.
    for (int P = 0; P > k - p * n; P -= p) {
      const int E = P + p * n;
      if (l < E) {
        moment += pn * rods.pair_at(n, k - P, l - P);
        continue;
      }
      const double nu_k = rods.nu_at(n, k - P);
      if (nu_k == 0.0) continue;
      // Rod B starts at E + p g <= l.
      for (int g = 0; E + p * g <= l; ++g) {
        const int PB = E + p * g;
        for (int m = 1; m <= M; ++m) {
          if (!rods.available(m) || l >= PB + p * m) continue;
          moment += pn * nu_k * u[static_cast<std::size_t>(g)] * model.pn[static_cast<std::size_t>(m)] *
                    rods.nu_at(m, l - PB);
        }
      }
    }
  }
  PairCorrelation c;
  c.moment = moment / model.mu;
  c.product = stationary_occupation(model, rods, k) * stationary_occupation(model, rods, l);
  c.truncated = c.moment - c.product;
  c.error_estimate = 2.0 * model.c_sub * model.tail_moment / model.mu;
  return c;
}

FiniteInfiniteComparison compare_finite_infinite(const AmplitudeTable& table, const RenewalModel& model,
                                                 const RodExpectations& rods, int k) {
  const int N = table.params().N;
  const int p = model.p;
  if (table.params().p != p) throw InvalidArgument("table and model disagree on p");
  if (model.max_N() < N || rods.max_n() < N) throw InvalidArgument("renewal model must cover n <= N");
  if (k < 0 || k >= table.num_sites()) throw InvalidArgument("site outside the lattice");

  FiniteInfiniteComparison c;
  c.finite_table = occupation_finite(table)[static_cast<std::size_t>(k)];
  c.infinite = stationary_occupation(model, rods, k);
  const double uN = model.uN[static_cast<std::size_t>(N)];
  for (int n = 1; n <= std::min(model.max_N(), rods.max_n()); ++n) {
    if (!rods.available(n)) continue;
    const double pn = model.pn[static_cast<std::size_t>(n)];
    for (int j = floor_div(k, p); p * (j + n) > k; --j) {
      const double nu = rods.nu_at(n, k - p * j);
      if (nu == 0.0) continue;
      const bool fits = j >= 0 && j + n <= N;
      if (fits) {
        const double ratio = model.uN[static_cast<std::size_t>(j)] * model.uN[static_cast<std::size_t>(N - j - n)] / uN;
        c.finite_renewal += ratio * pn * nu;
        c.epsilon += pn / model.mu * nu * std::abs(model.mu * ratio - 1.0);
      } else {
        c.epsilon += pn / model.mu * nu;
      }
    }
  }
  return c;
}

// ---------------------------------------------------------------------------

double OccupationProfile::at(int k) const {
  if (values.empty()) return 0.0;
  if (periodic) {
    const int p = static_cast<int>(values.size());
    return values[static_cast<std::size_t>(((k - first_site) % p + p) % p)];
  }
  const int i = k - first_site;
  if (i < 0 || i >= static_cast<int>(values.size())) return 0.0;
  return values[static_cast<std::size_t>(i)];
}

OccupationProfile finite_profile(std::vector<double> occupations) {
  return OccupationProfile{std::move(occupations), 0, false};
}

OccupationProfile periodic_profile(std::vector<double> occupations) {
  return OccupationProfile{std::move(occupations), 0, true};
}

namespace {

/// Sites whose Gaussians matter at x (|x - k gamma| < 9).
std::pair<int, int> site_window(const OccupationProfile& occ, double gamma, double x) {
  int lo = static_cast<int>(std::floor((x - 9.0) / gamma));
  int hi = static_cast<int>(std::ceil((x + 9.0) / gamma));
  if (!occ.periodic) {
    lo = std::max(lo, occ.first_site);
    hi = std::min(hi, occ.first_site + static_cast<int>(occ.values.size()) - 1);
  }
  return {lo, hi};
}

}  // namespace

std::vector<double> density_profile(const OccupationProfile& occ, std::span<const double> x, double gamma) {
  if (!(gamma > 0.0)) throw InvalidArgument("gamma must be positive");
  const double pref = gamma / (2.0 * kPi) / std::sqrt(kPi);
  std::vector<double> rho(x.size(), 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(x.size()); ++i) {
    const double xi = x[static_cast<std::size_t>(i)];
    const auto [lo, hi] = site_window(occ, gamma, xi);
    double s = 0.0;
    for (int k = lo; k <= hi; ++k) s += occ.at(k) * std::exp(-(xi - k * gamma) * (xi - k * gamma));
    rho[static_cast<std::size_t>(i)] = pref * s;
  }
  return rho;
}

std::complex<double> one_particle_matrix(const OccupationProfile& occ, double gamma, double x, double y, double xp,
                                         double yp) {
  const double R = 1.0 / gamma;
  const double pref = 1.0 / (2.0 * kPi * R * std::sqrt(kPi));
  const double c = 0.5 * (x + xp);
  const auto [lo, hi] = site_window(occ, gamma, c);
  std::complex<double> s = 0.0;
  for (int k = lo; k <= hi; ++k) {
    const double g = std::exp(-0.5 * (x - k * gamma) * (x - k * gamma) - 0.5 * (xp - k * gamma) * (xp - k * gamma));
    s += occ.at(k) * g * std::polar(1.0, k * gamma * (y - yp));
  }
  return pref * s;
}

OffDiagonalReport offdiag_bound_check(const AmplitudeTable& table, const OffDiagonalGrid& grid) {
  if (grid.nx < 2 || grid.ny < 1 || !(grid.x_max > grid.x_min)) throw InvalidArgument("offdiag grid malformed");
  const double gamma = table.params().gamma;
  const OccupationProfile occ = finite_profile(occupation_finite(table));
  const double R = 1.0 / gamma;
  const double circumference = 2.0 * kPi * R;
  const double dx = (grid.x_max - grid.x_min) / (grid.nx - 1);

  OffDiagonalReport rep;
  // Analytic constant: |rho(z;z')| <= e^{-(x-x')^2/4} pref sum_k <n_k> e^{-(c - k gamma)^2}, c = (x+x')/2.
  const double pref = 1.0 / (2.0 * kPi * R * std::sqrt(kPi));
  const int fine = 20 * grid.nx;
  for (int i = 0; i <= fine; ++i) {
    const double c = grid.x_min + (grid.x_max - grid.x_min) * i / fine;
    const auto [lo, hi] = site_window(occ, gamma, c);
    double s = 0.0;
    for (int k = lo; k <= hi; ++k) s += occ.at(k) * std::exp(-(c - k * gamma) * (c - k * gamma));
    rep.K_analytic = std::max(rep.K_analytic, pref * s);
  }
  // Midpoints between fine samples can exceed the sampled sup slightly; the
  // grid below only visits midpoints (x + x')/2 on the fine lattice.
  for (int i = 0; i < grid.nx; ++i) {
    const double x = grid.x_min + i * dx;
    for (int j = 0; j < grid.nx; ++j) {
      const double xp = grid.x_min + j * dx;
      for (int t = 0; t < grid.ny; ++t) {
        const double y = circumference * t / grid.ny;
        const double v = std::abs(one_particle_matrix(occ, gamma, x, y, xp, 0.0));
        rep.K_fit = std::max(rep.K_fit, v * std::exp(0.25 * (x - xp) * (x - xp)));
        ++rep.points;
      }
    }
  }
  rep.passed = rep.K_fit <= rep.K_analytic * (1.0 + 1e-12);
  return rep;
}

// ---------------------------------------------------------------------------

std::vector<double> orbital_domain_weights(int num_sites, double gamma, double a, double b) {
  if (!(a < b)) throw InvalidArgument("empty domain: need a < b");
  std::vector<double> w(static_cast<std::size_t>(num_sites));
  for (int k = 0; k < num_sites; ++k) w[static_cast<std::size_t>(k)] = erf_interval(a - k * gamma, b - k * gamma);
  return w;
}

DomainResult domain_weighted(const AmplitudeTable& table, double a, double b) {
  DomainResult r;
  r.a = a;
  r.b = b;
  const int L = table.num_sites();
  r.weights = orbital_domain_weights(L, table.params().gamma, a, b);
  const auto& entries = table.entries();
  // acc[0..L-1]: sum A^2 n_k prod w^{n - e_k}; acc[L]: C_N^Lambda.
  auto acc = blocked_vector_sum(entries.size(), static_cast<std::size_t>(L + 1), [&](std::size_t i, std::vector<double>& v) {
    const auto& e = entries[i];
    const auto m = e.m.indices();
    double full = e.A * e.A;
    for (int k : m) full *= r.weights[static_cast<std::size_t>(k)];
    v[static_cast<std::size_t>(L)] += full;
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (j > 0 && m[j] == m[j - 1]) continue;
      const int k = m[j];
      double prod = e.A * e.A * e.n[static_cast<std::size_t>(k)];
      bool skipped = false;
      for (int s : m) {
        if (s == k && !skipped) {
          skipped = true;
          continue;
        }
        prod *= r.weights[static_cast<std::size_t>(s)];
      }
      v[static_cast<std::size_t>(k)] += prod;
    }
  });
  r.norm = acc[static_cast<std::size_t>(L)];
  if (!(r.norm > 0.0)) throw InvalidArgument("domain carries no weight");
  r.occupations.assign(acc.begin(), acc.begin() + L);
  for (double& v : r.occupations) v /= r.norm;
  return r;
}

std::vector<double> particle_count_distribution(const AmplitudeTable& table, double xbar) {
  const int N = table.params().N;
  const int L = table.num_sites();
  const double gamma = table.params().gamma;
  std::vector<double> left(static_cast<std::size_t>(L));
  for (int k = 0; k < L; ++k) left[static_cast<std::size_t>(k)] = 0.5 * std::erfc(k * gamma - xbar);
  const auto& entries = table.entries();
  // Coefficients of prod_k (1 - w_k + t w_k)^{n_k}.
  auto dist = blocked_vector_sum(entries.size(), static_cast<std::size_t>(N + 1), [&](std::size_t i, std::vector<double>& v) {
    const auto& e = entries[i];
    std::vector<double> poly{1.0};
    for (int k : e.m.indices()) {
      const double w = left[static_cast<std::size_t>(k)];
      std::vector<double> next(poly.size() + 1, 0.0);
      for (std::size_t d = 0; d < poly.size(); ++d) {
        next[d] += poly[d] * (1.0 - w);
        next[d + 1] += poly[d] * w;
      }
      poly.swap(next);
    }
    for (std::size_t d = 0; d < poly.size(); ++d) v[d] += e.A * e.A * poly[d];
  });
  for (double& v : dist) v /= table.norm();
  return dist;
}

std::vector<double> expected_bin_counts(const OccupationProfile& occ, double gamma, std::span<const double> edges) {
  if (edges.size() < 2) throw InvalidArgument("need at least two bin edges");
  std::vector<double> out(edges.size() - 1, 0.0);
  for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
    const double a = edges[b];
    const double c = edges[b + 1];
    if (!(a < c)) throw InvalidArgument("bin edges must increase");
    int lo = static_cast<int>(std::floor((a - 9.0) / gamma));
    int hi = static_cast<int>(std::ceil((c + 9.0) / gamma));
    if (!occ.periodic) {
      lo = std::max(lo, occ.first_site);
      hi = std::min(hi, occ.first_site + static_cast<int>(occ.values.size()) - 1);
    }
    double s = 0.0;
    for (int k = lo; k <= hi; ++k) s += occ.at(k) * erf_interval(a - k * gamma, c - k * gamma);
    out[b] = s;
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<int> divisors_below(int p) {
  std::vector<int> d;
  for (int s = 1; s < p; ++s) {
    if (p % s == 0) d.push_back(s);
  }
  return d;
}

}  // namespace

PeriodTestResult period_test(std::span<const double> occ, std::span<const std::vector<double>> pair_rows,
                             const PeriodTestOptions& options) {
  const int p = static_cast<int>(occ.size());
  if (p < 1) throw InvalidArgument("period_test: empty occupation vector");
  PeriodTestResult res;
  res.occupation_deviation.assign(static_cast<std::size_t>(p), 0.0);
  for (int s = 1; s < p; ++s) {
    double dev = 0.0;
    for (int k = 0; k < p; ++k) dev = std::max(dev, std::abs(occ[static_cast<std::size_t>(k)] - occ[static_cast<std::size_t>((k + s) % p)]));
    res.occupation_deviation[static_cast<std::size_t>(s)] = dev;
  }
  const bool have_pairs = static_cast<int>(pair_rows.size()) == p;
  if (have_pairs) {
    res.pair_deviation.assign(static_cast<std::size_t>(p), 0.0);
    for (int s = 1; s < p; ++s) {
      double dev = 0.0;
      for (int k = 0; k < p; ++k) {
        const auto& a = pair_rows[static_cast<std::size_t>(k)];
        const auto& b = pair_rows[static_cast<std::size_t>((k + s) % p)];
        if (a.size() != b.size()) throw InvalidArgument("period_test: pair rows of unequal length");
        for (std::size_t i = 0; i < a.size(); ++i) dev = std::max(dev, std::abs(a[i] - b[i]));
      }
      res.pair_deviation[static_cast<std::size_t>(s)] = dev;
    }
  }

  auto deviation = [&](int s, bool with_pairs) {
    double d = res.occupation_deviation[static_cast<std::size_t>(s)];
    if (with_pairs) d = std::max(d, res.pair_deviation[static_cast<std::size_t>(s)]);
    return d;
  };
  auto find_period = [&](bool with_pairs) {
    for (int s : divisors_below(p)) {
      if (deviation(s, with_pairs) <= options.tolerance) return s;
    }
    return p;
  };

  res.period = find_period(false);
  if (res.period < p && have_pairs) {
    res.used_pair_moments = true;
    res.period = find_period(true);
  }
  res.margin = std::numeric_limits<double>::infinity();
  for (int s : divisors_below(p)) {
    if (s >= res.period) break;
    res.margin = std::min(res.margin, deviation(s, res.used_pair_moments));
  }
  // A period shorter than p only means the tested correlations are flat
  // within tolerance; that is evidence, not a verdict.
  res.conclusive = res.margin >= options.margin_factor * options.tolerance && (res.period == p || p == 1);
  return res;
}

PeriodTestResult period_test(const RenewalModel& model, const RodExpectations& rods, const PeriodTestOptions& options,
                             bool override_unconverged) {
  const auto occ = occupation_infinite(model, rods, override_unconverged);
  const int p = model.p;
  const int D = options.pair_distance_max > 0 ? options.pair_distance_max : 2 * p;
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(p));
  for (int k = 0; k < p; ++k) {
    for (int d = 1; d <= D; ++d) rows[static_cast<std::size_t>(k)].push_back(pair_infinite(model, rods, k, k + d, true).moment);
  }
  return period_test(occ, rows, options);
}

}  // namespace laughlin
