// Copyright 2026 The laughlin Authors
// SPDX-License-Identifier: Apache-2.0

#include "laughlin/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "laughlin/errors.hpp"

namespace laughlin {

namespace {

using Triplet = Eigen::Triplet<double>;

// Column-by-column assembly; each column is produced independently and the
// triplets are concatenated in column order so duplicates sum identically
// for any thread count.
SparseOperator assemble(Eigen::Index rows, Eigen::Index cols,
                        const std::function<void(Eigen::Index, std::vector<Triplet>&)>& column) {
  std::vector<std::vector<Triplet>> per(static_cast<std::size_t>(cols));
#pragma omp parallel for schedule(dynamic, 16)
  for (Eigen::Index j = 0; j < cols; ++j) column(j, per[static_cast<std::size_t>(j)]);
  std::size_t total = 0;
  for (const auto& v : per) total += v.size();
  std::vector<Triplet> all;
  all.reserve(total);
  for (const auto& v : per) all.insert(all.end(), v.begin(), v.end());
  SparseOperator op;
  op.matrix.resize(rows, cols);
  op.matrix.setFromTriplets(all.begin(), all.end());
  op.matrix.makeCompressed();
  return op;
}

std::vector<int> counts_of(const OrbitalConfig& m, int min_sites) {
  int sites = min_sites;
  for (int k : m.indices()) sites = std::max(sites, k + 1);
  std::vector<int> n(static_cast<std::size_t>(sites), 0);
  for (int k : m.indices()) ++n[static_cast<std::size_t>(k)];
  return n;
}

OrbitalConfig orbitals_of(const std::vector<int>& n) {
  std::vector<int> m;
  for (std::size_t k = 0; k < n.size(); ++k) {
    for (int c = 0; c < n[k]; ++c) m.push_back(static_cast<int>(k));
  }
  return OrbitalConfig(std::move(m));
}

void push_image(const SectorBasis& target, const std::optional<MonomialImage>& img, double coef, Eigen::Index col,
                std::vector<Triplet>& out) {
  if (!img || coef == 0.0) return;
  const auto row = target.index_of(img->state);
  if (!row) throw VerificationFailure("operator image left the sector: " + img->state.to_string());
  out.emplace_back(static_cast<Eigen::Index>(*row), col, coef * img->coefficient);
}

void require_p3(const ModelParams& params, const char* what) {
  params.validate();
  if (params.p != 3) throw InvalidArgument(std::string(what) + " requires p = 3");
}

// Binomial with saturation, for sector caps.
double binomial(double n, double k) {
  if (k < 0 || k > n) return 0.0;
  return std::exp(std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1));
}

}  // namespace

double hermite(int n, double t) noexcept {
  if (n <= 0) return 1.0;
  double h0 = 1.0;
  double h1 = 2.0 * t;
  for (int k = 1; k < n; ++k) {
    const double h2 = 2.0 * t * h1 - 2.0 * k * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

FormFactor::FormFactor(int p, double gamma, FormFactorVariant variant) : p_(p), gamma_(gamma), variant_(variant) {
  if (p < 1) throw InvalidArgument("form factor: p must be >= 1");
}

double FormFactor::operator()(double t) const noexcept {
  double s = 0.0;
  for (int k = 0; k < p_; ++k) {
    if (variant_ == FormFactorVariant::ParityMatched && (k % 2) != (p_ % 2)) continue;
    s += hermite(k, t);
  }
  return s * std::exp(-t * t / 4.0);
}

double form_factor(double t, const ModelParams& params, FormFactorVariant variant) {
  return FormFactor(params.p, params.gamma, variant)(t);
}

// SectorBasis ---------------------------------------------------------------------

SectorBasis SectorBasis::build(int num_sites, int N, bool fermionic, std::optional<long long> momentum,
                               std::size_t cap) {
  if (num_sites < 1 || N < 0) throw InvalidArgument("sector: need num_sites >= 1 and N >= 0");
  if (fermionic && N > num_sites) throw InvalidArgument("sector: more fermions than sites");
  const double full = fermionic ? binomial(num_sites, N) : binomial(num_sites + N - 1, N);
  if (!momentum && full > static_cast<double>(cap)) {
    throw ResourceLimit("sector dimension " + std::to_string(static_cast<long long>(full)) + " exceeds cap " +
                        std::to_string(cap));
  }
  SectorBasis b;
  b.num_sites_ = num_sites;
  b.N_ = N;
  b.fermionic_ = fermionic;
  std::vector<int> cur;
  cur.reserve(static_cast<std::size_t>(N));
  const int step = fermionic ? 1 : 0;
  std::function<void(int, long long)> rec = [&](int lo, long long sum) {
    const int left = N - static_cast<int>(cur.size());
    if (left == 0) {
      if (!momentum || sum == *momentum) {
        if (b.states_.size() >= cap) throw ResourceLimit("sector dimension exceeds cap " + std::to_string(cap));
        b.states_.emplace_back(cur);
      }
      return;
    }
    for (int k = lo; k < num_sites; ++k) {
      if (fermionic && num_sites - k < left) break;
      if (momentum) {
        // Bounds on the remaining sum given the next orbital k.
        const long long lo_sum = sum + static_cast<long long>(left) * k + (fermionic ? 1LL * left * (left - 1) / 2 : 0);
        if (lo_sum > *momentum) break;
        const long long hi_sum = sum + k + static_cast<long long>(left - 1) * (num_sites - 1) -
                                 (fermionic ? 1LL * (left - 1) * (left - 2) / 2 : 0);
        if (hi_sum < *momentum) continue;
      }
      cur.push_back(k);
      rec(k + step, sum + k);
      cur.pop_back();
    }
  };
  rec(0, 0);
  b.index_.reserve(b.states_.size());
  for (std::size_t i = 0; i < b.states_.size(); ++i) b.index_.emplace(b.states_[i], i);
  return b;
}

SectorBasis SectorBasis::for_model(const ModelParams& params, std::optional<long long> momentum, std::size_t cap) {
  params.validate();
  return build(params.num_orbitals(), params.N, params.fermionic(), momentum, cap);
}

std::optional<std::size_t> SectorBasis::index_of(const OrbitalConfig& m) const {
  const auto it = index_.find(m);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

// SparseOperator ------------------------------------------------------------------

Eigen::VectorXd SparseOperator::apply(const Eigen::VectorXd& v) const {
  if (v.size() != matrix.cols()) throw InvalidArgument("operator apply: dimension mismatch");
  return matrix * v;
}

double SparseOperator::max_asymmetry() const {
  if (rows() != cols()) throw InvalidArgument("asymmetry of a non-square operator");
  const SparseMatrix t = matrix.transpose();
  const SparseMatrix d = matrix - t;
  double m = 0.0;
  for (Eigen::Index k = 0; k < d.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(d, k); it; ++it) m = std::max(m, std::abs(it.value()));
  }
  return m;
}

double SparseOperator::max_abs_entry() const {
  double m = 0.0;
  for (Eigen::Index k = 0; k < matrix.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(matrix, k); it; ++it) m = std::max(m, std::abs(it.value()));
  }
  return m;
}

double max_entry_difference(const SparseOperator& a, const SparseOperator& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw InvalidArgument("operator shapes differ");
  SparseOperator d{SparseMatrix(a.matrix - b.matrix)};
  return d.max_abs_entry();
}

std::optional<MonomialImage> apply_monomial(const OrbitalConfig& m, std::span<const int> creators,
                                            std::span<const int> annihilators, bool fermionic) {
  int reach = 0;
  for (int k : creators) {
    if (k < 0) throw InvalidArgument("negative orbital in monomial");
    reach = std::max(reach, k + 1);
  }
  for (int k : annihilators) {
    if (k < 0) throw InvalidArgument("negative orbital in monomial");
    reach = std::max(reach, k + 1);
  }
  std::vector<int> n = counts_of(m, reach);
  double coef = 1.0;
  auto parity_below = [&](int j) {
    int s = 0;
    for (int i = 0; i < j; ++i) s += n[static_cast<std::size_t>(i)];
    return (s % 2) ? -1.0 : 1.0;
  };
  for (auto it = annihilators.rbegin(); it != annihilators.rend(); ++it) {
    const auto j = static_cast<std::size_t>(*it);
    if (n[j] == 0) return std::nullopt;
    coef *= fermionic ? parity_below(*it) : std::sqrt(static_cast<double>(n[j]));
    --n[j];
  }
  for (auto it = creators.rbegin(); it != creators.rend(); ++it) {
    const auto j = static_cast<std::size_t>(*it);
    if (fermionic) {
      if (n[j] == 1) return std::nullopt;
      coef *= parity_below(*it);
    } else {
      coef *= std::sqrt(static_cast<double>(n[j] + 1));
    }
    ++n[j];
  }
  while (!n.empty() && n.back() == 0) n.pop_back();
  return MonomialImage{orbitals_of(n), coef};
}

// Parent Hamiltonian --------------------------------------------------------------

SparseOperator build_H_pairwise(const SectorBasis& basis, const FormFactor& F) {
  const int L = basis.num_sites();
  const double g = F.gamma();
  const auto dim = static_cast<Eigen::Index>(basis.size());
  return assemble(dim, dim, [&](Eigen::Index j, std::vector<Triplet>& out) {
    const OrbitalConfig& m = basis[static_cast<std::size_t>(j)];
    const std::vector<int> n = counts_of(m, L);
    for (int n1 = 0; n1 < L; ++n1) {
      if (n[static_cast<std::size_t>(n1)] == 0) continue;
      for (int n2 = 0; n2 < L; ++n2) {
        const int need = (n1 == n2) ? 2 : 1;
        if (n[static_cast<std::size_t>(n2)] < need) continue;
        const double fn = F((n1 - n2) * g);
        if (fn == 0.0) continue;
        for (int k1 = 0; k1 < L; ++k1) {
          const int k2 = n1 + n2 - k1;
          if (k2 < 0 || k2 >= L) continue;
          const double fk = F((k1 - k2) * g);
          const int cr[2] = {k1, k2};
          const int an[2] = {n2, n1};
          push_image(basis, apply_monomial(m, cr, an, basis.fermionic()), fn * fk, j, out);
        }
      }
    }
  });
}

SparseOperator build_H_bond(const SectorBasis& basis, const FormFactor& F) {
  const int L = basis.num_sites();
  const double g = F.gamma();
  const auto dim = static_cast<Eigen::Index>(basis.size());
  SparseOperator H;
  H.matrix.resize(dim, dim);
  if (basis.particles() < 2) return H;
  const SectorBasis lower = SectorBasis::build(L, basis.particles() - 2, basis.fermionic());
  const auto ldim = static_cast<Eigen::Index>(lower.size());
  for (int two_s = 0; two_s <= 2 * (L - 1); ++two_s) {
    // B_s = sum over ordered (a, b), a + b = 2s, of F((b - a) gamma) c_a c_b.
    const SparseOperator B = assemble(ldim, dim, [&](Eigen::Index j, std::vector<Triplet>& out) {
      const OrbitalConfig& m = basis[static_cast<std::size_t>(j)];
      for (int a = std::max(0, two_s - (L - 1)); a <= std::min(L - 1, two_s); ++a) {
        const int b = two_s - a;
        const int an[2] = {a, b};
        push_image(lower, apply_monomial(m, {}, an, basis.fermionic()), F((b - a) * g), j, out);
      }
    });
    H.matrix += SparseMatrix(B.matrix.transpose() * B.matrix);
  }
  H.matrix.prune(0.0);
  H.matrix.makeCompressed();
  return H;
}

HamiltonianBuild build_H(const ModelParams& params, const SectorBasis& basis, FormFactorVariant variant) {
  params.validate();
  if (basis.num_sites() != params.num_orbitals() || basis.particles() != params.N ||
      basis.fermionic() != params.fermionic()) {
    throw InvalidArgument("build_H: basis does not match the model");
  }
  const FormFactor F(params.p, params.gamma, variant);
  HamiltonianBuild out;
  out.pairwise = build_H_pairwise(basis, F);
  out.bond = build_H_bond(basis, F);
  out.max_deviation = max_entry_difference(out.pairwise, out.bond);
  return out;
}

Eigen::VectorXd sector_vector(const AmplitudeTable& table, const SectorBasis& basis) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.size()));
  for (const auto& e : table.entries()) {
    const auto i = basis.index_of(e.m);
    if (!i) throw InvalidArgument("sector_vector: config " + e.m.to_string() + " is not in the sector");
    v(static_cast<Eigen::Index>(*i)) = e.A;
  }
  return v;
}

// Ground state checks -------------------------------------------------------------

KernelInfo kernel_dimension(const SparseOperator& H, double relative_tolerance, const LanczosOptions& options) {
  const auto dim = static_cast<int>(H.rows());
  if (dim == 0) throw InvalidArgument("kernel of an empty operator");
  KernelInfo info;
  info.threshold = relative_tolerance * std::max(1.0, H.max_abs_entry());
  int count = std::min(dim, 2);
  for (;;) {
    const EigenResult r = lanczos_lowest(H.matrix, count, options);
    info.lowest = r.values;
    info.dimension = static_cast<int>(std::count_if(r.values.begin(), r.values.end(),
                                                    [&](double v) { return v <= info.threshold; }));
    if (info.dimension < count || count == dim) return info;
    count = std::min(dim, 2 * count);
  }
}

GroundCheck ground_check(const SparseOperator& H, const Eigen::VectorXd& psi, bool with_kernel) {
  if (psi.size() != H.cols()) throw InvalidArgument("ground_check: dimension mismatch");
  const double nrm = psi.norm();
  if (nrm == 0.0) throw InvalidArgument("ground_check: zero vector");
  GroundCheck g;
  g.residual = H.apply(psi).norm() / nrm;
  if (with_kernel) g.kernel = kernel_dimension(H);
  return g;
}

std::vector<double> spectrum(const SparseOperator& H, int count, const LanczosOptions& options) {
  if (count < 1) throw InvalidArgument("spectrum: count must be >= 1");
  return lanczos_lowest(H.matrix, std::min<int>(count, static_cast<int>(H.rows())), options).values;
}

// Monomer-dimer ------------------------------------------------------------------

MonomerDimer build_monomer_dimer(const ModelParams& params) {
  require_p3(params, "monomer-dimer model");
  const double g2 = params.gamma * params.gamma;
  const double nn2 = 4.0 * std::exp(-1.5 * g2);
  const double hop = 3.0 * std::exp(-2.0 * g2);
  const double nn3 = 9.0 * std::exp(-4.0 * g2);

  MonomerDimer md;
  md.basis = SectorBasis::for_model(params);
  const SectorBasis& basis = md.basis;
  const int L = basis.num_sites();
  const auto dim = static_cast<Eigen::Index>(basis.size());
  auto in = [&](int k) { return k >= 0 && k < L; };

  // Diagonal n_j n_{j+2} plus sum_j D*_j D_j with D_j = c_{j+2} c_{j+1} + hop c_{j+3} c_j.
  SparseOperator diag = assemble(dim, dim, [&](Eigen::Index j, std::vector<Triplet>& out) {
    const std::vector<int> n = counts_of(basis[static_cast<std::size_t>(j)], L);
    double e = 0.0;
    for (int k = 0; k + 2 < L; ++k) e += nn2 * n[static_cast<std::size_t>(k)] * n[static_cast<std::size_t>(k + 2)];
    if (e != 0.0) out.emplace_back(j, j, e);
  });
  md.H.matrix = diag.matrix;
  if (params.N >= 2) {
    const SectorBasis lower = SectorBasis::build(L, params.N - 2, true);
    const auto ldim = static_cast<Eigen::Index>(lower.size());
    for (int j = -3; j < L; ++j) {
      const SparseOperator D = assemble(ldim, dim, [&](Eigen::Index col, std::vector<Triplet>& out) {
        const OrbitalConfig& m = basis[static_cast<std::size_t>(col)];
        if (in(j + 1) && in(j + 2)) {
          const int an[2] = {j + 2, j + 1};
          push_image(lower, apply_monomial(m, {}, an, true), 1.0, col, out);
        }
        if (in(j) && in(j + 3)) {
          const int an[2] = {j + 3, j};
          push_image(lower, apply_monomial(m, {}, an, true), hop, col, out);
        }
      });
      md.H.matrix += SparseMatrix(D.matrix.transpose() * D.matrix);
    }
  }
  md.H.matrix.prune(0.0);
  md.H.matrix.makeCompressed();

  md.H_expanded = assemble(dim, dim, [&](Eigen::Index col, std::vector<Triplet>& out) {
    const OrbitalConfig& m = basis[static_cast<std::size_t>(col)];
    const std::vector<int> n = counts_of(m, L);
    auto occ = [&](int k) { return in(k) ? n[static_cast<std::size_t>(k)] : 0; };
    double e = 0.0;
    for (int k = 0; k < L; ++k) {
      e += occ(k) * occ(k + 1) + nn2 * occ(k) * occ(k + 2) + nn3 * occ(k) * occ(k + 3);
    }
    if (e != 0.0) out.emplace_back(col, col, e);
    for (int k = 0; k + 3 < L; ++k) {
      const int cr1[2] = {k + 1, k + 2};
      const int an1[2] = {k + 3, k};
      push_image(basis, apply_monomial(m, cr1, an1, true), hop, col, out);
      const int cr2[2] = {k, k + 3};
      const int an2[2] = {k + 2, k + 1};
      push_image(basis, apply_monomial(m, cr2, an2, true), hop, col, out);
    }
  });

  // Psi^MD: monomer k -> c*_{3k}, dimer {k, k+1} -> -hop c*_{3k+1} c*_{3k+2}; the
  // product is already in increasing orbital order.
  md.psi = Eigen::VectorXd::Zero(dim);
  std::vector<int> cur;
  std::function<void(int, double)> rec = [&](int k, double amp) {
    if (k == params.N) {
      const auto i = basis.index_of(OrbitalConfig(cur));
      if (!i) throw VerificationFailure("monomer-dimer term outside the sector");
      md.psi(static_cast<Eigen::Index>(*i)) += amp;
      ++md.terms;
      return;
    }
    cur.push_back(3 * k);
    rec(k + 1, amp);
    cur.pop_back();
    if (k + 1 < params.N) {
      cur.push_back(3 * k + 1);
      cur.push_back(3 * k + 2);
      rec(k + 2, -hop * amp);
      cur.pop_back();
      cur.pop_back();
    }
  };
  rec(0, 1.0);
  return md;
}

// Tao-Thouless and perturbation series ---------------------------------------------

Eigen::VectorXd tao_thouless(const ModelParams& params, const SectorBasis& basis) {
  require_p3(params, "Tao-Thouless state");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.size()));
  const auto i = basis.index_of(root_config(params.p, params.N));
  if (!i) throw InvalidArgument("Tao-Thouless configuration is not in the sector");
  v(static_cast<Eigen::Index>(*i)) = 1.0;
  return v;
}

SparseOperator build_HTT(const ModelParams& params, const SectorBasis& basis) {
  require_p3(params, "Tao-Thouless Hamiltonian");
  const double g2 = params.gamma * params.gamma;
  const double c1 = std::exp(-0.5 * g2);
  const double c2 = 4.0 * std::exp(-2.0 * g2);
  const int L = basis.num_sites();
  const auto dim = static_cast<Eigen::Index>(basis.size());
  return assemble(dim, dim, [&](Eigen::Index j, std::vector<Triplet>& out) {
    const std::vector<int> n = counts_of(basis[static_cast<std::size_t>(j)], L);
    double e = 0.0;
    for (int k = 0; k + 1 < L; ++k) {
      e += c1 * n[static_cast<std::size_t>(k)] * n[static_cast<std::size_t>(k + 1)];
      if (k + 2 < L) e += c2 * n[static_cast<std::size_t>(k)] * n[static_cast<std::size_t>(k + 2)];
    }
    if (e != 0.0) out.emplace_back(j, j, e);
  });
}

double tt_normalisation(double gamma) noexcept { return 16.0 * gamma * gamma; }

PerturbationResult perturbation_series(const ModelParams& params, int order) {
  require_p3(params, "perturbation series");
  if (order < 0) throw InvalidArgument("perturbation order must be >= 0");
  const OrbitalConfig root = root_config(params.p, params.N);
  const SectorBasis basis = SectorBasis::for_model(params, root.sum());
  const FormFactor F(params.p, params.gamma);
  const SparseOperator HTT = build_HTT(params, basis);
  SparseOperator V{SparseMatrix(build_H_pairwise(basis, F).matrix / tt_normalisation(params.gamma) - HTT.matrix)};

  const Eigen::VectorXd tt = tao_thouless(params, basis);
  const auto t = static_cast<Eigen::Index>(*basis.index_of(root));
  const Eigen::VectorXd d = HTT.matrix.diagonal();
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (i != t && !(d(i) > 0.0)) {
      throw VerificationFailure("Tao-Thouless Hamiltonian is singular off the Tao-Thouless state at " +
                                basis[static_cast<std::size_t>(i)].to_string());
    }
  }

  Eigen::VectorXd exact = sector_vector(amplitudes(expand(params), params.gamma), basis);
  exact /= exact(t);

  PerturbationResult res;
  Eigen::VectorXd S = tt;
  for (int n = 0; n <= order; ++n) {
    if (n > 0) {
      Eigen::VectorXd w = V.apply(S);
      w(t) = 0.0;
      for (Eigen::Index i = 0; i < w.size(); ++i) {
        if (i != t) w(i) /= d(i);
      }
      S = tt - w;
    }
    res.partial_sums.push_back(S);
    res.distance.push_back((S - exact).norm());
    if (n > 0 && !(res.distance[static_cast<std::size_t>(n)] < res.distance[static_cast<std::size_t>(n - 1)])) {
      res.decreasing = false;
    }
  }
  res.diverging = res.distance.back() > res.distance.front();
  return res;
}

}  // namespace laughlin
