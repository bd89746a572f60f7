// Copyright 2026 The laughlin Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "generators.hpp"
#include "laughlin/errors.hpp"
#include "laughlin/expansion.hpp"

using namespace laughlin;
namespace fs = std::filesystem;

namespace {

using Poly = std::map<std::vector<int>, long long>;

// prod_{j<k} (Z_k - Z_j)^p by repeated multiplication with 64-bit coefficients.
Poly laughlin_poly(int p, int N) {
  Poly poly{{std::vector<int>(static_cast<std::size_t>(N), 0), 1}};
  for (int k = 1; k < N; ++k) {
    for (int j = 0; j < k; ++j) {
      for (int e = 0; e < p; ++e) {
        Poly next;
        for (const auto& [mono, c] : poly) {
          auto a = mono;
          ++a[static_cast<std::size_t>(k)];
          next[a] += c;
          auto b = mono;
          ++b[static_cast<std::size_t>(j)];
          next[b] -= c;
        }
        std::erase_if(next, [](const auto& kv) { return kv.second == 0; });
        poly = std::move(next);
      }
    }
  }
  return poly;
}

long long lookup(const Poly& poly, const std::vector<int>& m) {
  const auto it = poly.find(m);
  return it == poly.end() ? 0 : it->second;
}

int permutation_sign(std::vector<int> perm) {
  int sign = 1;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    while (perm[i] != static_cast<int>(i)) {
      std::swap(perm[i], perm[static_cast<std::size_t>(perm[i])]);
      sign = -sign;
    }
  }
  return sign;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("laughlin_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("two-particle tables") {
  const auto t3 = expand(ModelParams(3, 1.0, 2));
  CHECK(t3.size() == 2);
  CHECK(t3.coefficient(OrbitalConfig({0, 3})) == 1);
  CHECK(t3.coefficient(OrbitalConfig({1, 2})) == -3);
  const auto t2 = expand(ModelParams(2, 1.0, 2));
  CHECK(t2.size() == 2);
  CHECK(t2.coefficient(OrbitalConfig({0, 2})) == 1);
  CHECK(t2.coefficient(OrbitalConfig({1, 1})) == -2);
  const auto t1 = expand(ModelParams(1, 1.0, 3));
  CHECK(t1.size() == 1);
  CHECK(t1.coefficient(OrbitalConfig({0, 1, 2})) == 1);
}

TEST_CASE("coefficients agree with direct polynomial multiplication") {
  for (int p = 1; p <= 3; ++p) {
    for (int N = 1; N <= 4; ++N) {
      const Poly poly = laughlin_poly(p, N);
      const auto table = expand(ModelParams(p, 1.0, N));
      std::size_t canonical = 0;
      for (const auto& [mono, c] : poly) {
        if (!std::is_sorted(mono.begin(), mono.end())) continue;
        if (p % 2 == 1 && std::adjacent_find(mono.begin(), mono.end()) != mono.end()) continue;
        ++canonical;
        CHECK(table.coefficient(OrbitalConfig(mono)) == c);
      }
      CHECK(table.size() == canonical);
    }
  }
}

TEST_CASE("canonical representatives absorb label permutations") {
  testing::Gen g(11);
  for (int p = 2; p <= 3; ++p) {
    const int N = 4;
    const Poly poly = laughlin_poly(p, N);
    const auto table = expand(ModelParams(p, 1.0, N));
    for (int trial = 0; trial < 100; ++trial) {
      const auto& m = g.pick(table.keys());
      std::vector<int> perm(N);
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), g.engine());
      std::vector<int> permuted(N);
      for (int i = 0; i < N; ++i) permuted[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = m[static_cast<std::size_t>(i)];
      const long long sign = p % 2 ? permutation_sign(perm) : 1;
      CHECK(lookup(poly, permuted) == sign * table.coefficient(m).convert_to<long long>());
    }
  }
}

TEST_CASE("recursion equals sequential multiplication") {
  for (int p = 1; p <= 3; ++p) {
    for (int N = 1; N <= 6; ++N) {
      const ModelParams P(p, 1.0, N);
      CHECK(expand(P) == expand_by_multiplication(P));
    }
  }
  CHECK_THROWS_AS((void)expand_by_multiplication(ModelParams(3, 1.0, 7)), ResourceLimit);
}

TEST_CASE("parallel and serial expansion steps are identical") {
  for (int p = 1; p <= 3; ++p) {
    CoefficientTable t = expand(ModelParams(p, 1.0, 1));
    for (int N = 2; N <= 7; ++N) {
      const auto a = expand_step(t);
      const auto b = expand_step_serial(t);
      CHECK(a == b);
      CHECK(a.keys() == b.keys());
      t = a;
    }
  }
}

TEST_CASE("every key is admissible and the output is deterministic") {
  for (int p = 1; p <= 3; ++p) {
    const auto seq = expand_sequence(ModelParams(p, 1.0, 6));
    for (const auto& t : seq) {
      CHECK(std::is_sorted(t.keys().begin(), t.keys().end()));
      for (const auto& m : t.keys()) CHECK(is_admissible(m, t.params()));
    }
    CHECK(expand(ModelParams(p, 1.0, 6)) == seq.back());
  }
}

TEST_CASE("expansion cap") {
  CHECK(default_expansion_cap(3) >= 8);
  CHECK(default_expansion_cap(2) >= 10);
  CHECK_THROWS_AS((void)expand(ModelParams(3, 1.0, default_expansion_cap(3) + 1)), ResourceLimit);
  ExpansionLimits tight;
  tight.max_configs = 10;
  CHECK_THROWS_AS((void)expand(ModelParams(3, 1.0, 5), tight), ResourceLimit);
}

TEST_CASE("amplitudes") {
  for (double g : {0.5, 1.0, 1.7}) {
    const auto a = amplitudes(expand(ModelParams(3, g, 2)), g);
    for (const auto& e : a.entries()) {
      if (e.m == OrbitalConfig({0, 3})) CHECK(e.a == doctest::Approx(1.0).epsilon(1e-15));
      if (e.m == OrbitalConfig({1, 2})) CHECK(e.a == doctest::Approx(-3.0 * std::exp(-2.0 * g * g)).epsilon(1e-14));
    }
    CHECK(a.norm() == doctest::Approx(1.0 + 9.0 * std::exp(-4.0 * g * g)).epsilon(1e-14));
  }
  const auto a1 = amplitudes(expand(ModelParams(3, 1.0, 2)), 1.0);
  CHECK(a1.entries()[1].a == doctest::Approx(-0.4060058).epsilon(1e-7));
  const auto b = amplitudes(expand(ModelParams(2, 1.0, 2)), 1.0);
  CHECK(b.norm() == doctest::Approx(1.0 + 2.0 * std::exp(-2.0)).epsilon(1e-14));
}

TEST_CASE("root amplitude is +-1 and amplitudes are bounded by coefficients") {
  for (int p = 1; p <= 3; ++p) {
    for (double g : {0.4, 1.0}) {
      for (const auto& t : expand_sequence(ModelParams(p, g, 6))) {
        const auto a = amplitudes(t, g);
        const OrbitalConfig root = root_config(p, t.params().N);
        for (std::size_t i = 0; i < t.size(); ++i) {
          const double c = t.coefficients()[i].convert_to<double>();
          const auto& e = a.entries()[i];
          CHECK(std::abs(e.a) <= std::abs(c) * (1.0 + 1e-15));
          if (e.m == root) CHECK(std::abs(e.a) == 1.0);
          CHECK(gaussian_weight(e.m, p, g) <= 1.0);
        }
      }
    }
  }
}

TEST_CASE("product rule") {
  for (int p = 2; p <= 3; ++p) {
    const auto rep = verify_product_rule(expand_sequence(ModelParams(p, 1.0, 6)));
    CHECK(rep.passed());
    CHECK(rep.checked > 0);
  }
  // Filled level: a single Slater determinant with coefficient 1.
  const auto p1 = expand_sequence(ModelParams(1, 1.0, 6));
  for (const auto& t : p1) {
    for (const auto& c : t.coefficients()) CHECK(abs(c) == 1);
  }
  CHECK(verify_product_rule(p1).passed());

  // A corrupted coefficient at a factorisable key is reported.
  auto seq = expand_sequence(ModelParams(3, 1.0, 4));
  const auto& last = seq.back();
  std::vector<BigInt> coeffs = last.coefficients();
  const OrbitalConfig target = root_config(3, 4);
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (last.keys()[i] == target) coeffs[i] += 1;
  }
  seq.back() = CoefficientTable(last.params(), last.keys(), coeffs);
  CHECK_FALSE(verify_product_rule(seq).passed());
  seq.pop_back();
  seq.erase(seq.begin());
  CHECK_THROWS_AS((void)verify_product_rule(seq), InvalidArgument);
}

TEST_CASE("polynomial oracle") {
  using C = std::complex<double>;
  const std::vector<std::vector<C>> unit = {{C(1, 0), C(2, 0)}};
  CHECK(evaluate_oracle(expand(ModelParams(1, 1.0, 2)), unit) == 0.0);
  CHECK(evaluate_oracle(expand(ModelParams(3, 1.0, 2)), unit) < 1e-15);
  const auto t = expand(ModelParams(3, 1.0, 5));
  CHECK(evaluate_oracle(t, random_oracle_points(5, 20, 3)) < 1e-9);
  for (int p = 1; p <= 3; ++p) {
    for (int N = 1; N <= 6; ++N) {
      CHECK(evaluate_oracle(expand(ModelParams(p, 1.0, N)), random_oracle_points(N, 20, 100 + N)) < 1e-9);
    }
  }
  std::vector<BigInt> coeffs = t.coefficients();
  coeffs[coeffs.size() / 2] += 1;
  const CoefficientTable bad(t.params(), t.keys(), coeffs);
  CHECK(evaluate_oracle(bad, random_oracle_points(5, 20, 3)) > 1e-6);
  CHECK_THROWS_AS((void)evaluate_oracle(t, unit), InvalidArgument);
  const std::vector<std::vector<C>> huge = {{C(1e300, 0), C(-1e300, 0), C(0, 1e300), C(1, 0), C(2, 0)}};
  CHECK_THROWS_AS((void)evaluate_oracle(t, huge), InvalidArgument);
}

TEST_CASE("cache round trip") {
  const fs::path dir = scratch_dir("cache");
  const auto t = expand(ModelParams(3, 1.0, 6));
  const fs::path path = dir / cache_file_name(3, 6);
  save_cache(t, path);
  CHECK(load_cache(path) == t);
  CHECK(load_cache(path, 3, 6) == t);

  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "LAUGHLIN-COEFF v1 p=3 N=6 count=" + std::to_string(t.size()));

  CHECK_THROWS_AS((void)load_cache(path, 2, 6), CacheError);
  CHECK_THROWS_AS((void)load_cache(path, 3, 5), CacheError);

  std::stringstream ss;
  ss << std::ifstream(path).rdbuf();
  const std::string text = ss.str();

  const fs::path truncated = dir / "truncated.txt";
  std::ofstream(truncated) << text.substr(0, text.size() / 2);
  CHECK_THROWS_AS((void)load_cache(truncated), CacheError);

  std::string tampered = text;
  const auto colon = tampered.find(':', header.size());
  tampered[colon + 1] = tampered[colon + 1] == '1' ? '2' : '1';
  const fs::path bad = dir / "tampered.txt";
  std::ofstream(bad) << tampered;
  CHECK_THROWS_AS((void)load_cache(bad), CacheError);

  std::string version = text;
  version.replace(version.find("v1"), 2, "v9");
  const fs::path vpath = dir / "version.txt";
  std::ofstream(vpath) << version;
  CHECK_THROWS_AS((void)load_cache(vpath), CacheError);

  CHECK_THROWS_AS((void)load_cache(dir / "missing.txt"), CacheError);
  fs::remove_all(dir);
}
