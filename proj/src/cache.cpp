// Copyright 2026 The laughlin Authors
// SPDX-License-Identifier: Apache-2.0

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "laughlin/errors.hpp"
#include "laughlin/expansion.hpp"

namespace laughlin {

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed) noexcept {
  std::uint64_t h = seed;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string cache_file_name(int p, int N) {
  return "coeff_p" + std::to_string(p) + "_N" + std::to_string(N) + ".txt";
}

namespace {

std::string hex16(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

int parse_int(std::string_view s, const std::string& what) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw CacheError("malformed " + what + ": '" + std::string(s) + "'");
  return v;
}

}  // namespace

void save_cache(const CoefficientTable& table, const std::filesystem::path& path) {
  const auto& params = table.params();
  std::string body;
  body += std::string(kCacheMagic) + " v" + std::to_string(kCacheVersion) + " p=" + std::to_string(params.p) +
          " N=" + std::to_string(params.N) + " count=" + std::to_string(table.size()) + "\n";
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto& m = table.keys()[i];
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (j) body += ',';
      body += std::to_string(m[j]);
    }
    body += ':';
    body += table.coefficients()[i].str();
    body += '\n';
  }
  const std::string trailer = "checksum=" + hex16(fnv1a64(body)) + "\n";

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CacheError("cannot write cache file " + tmp);
    out << body << trailer;
    if (!out) throw CacheError("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

CoefficientTable load_cache(const std::filesystem::path& path, std::optional<int> expected_p,
                            std::optional<int> expected_N) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CacheError("cannot open cache file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string content = ss.str();

  const auto marker = content.rfind("checksum=");
  if (marker == std::string::npos || (marker != 0 && content[marker - 1] != '\n')) {
    throw CacheError("checksum failure: no checksum line in " + path.string());
  }
  std::string recorded = content.substr(marker + 9);
  while (!recorded.empty() && (recorded.back() == '\n' || recorded.back() == '\r')) recorded.pop_back();
  const std::string_view body(content.data(), marker);
  if (recorded != hex16(fnv1a64(body))) throw CacheError("checksum failure in " + path.string());

  std::istringstream lines{std::string(body)};
  std::string header;
  std::getline(lines, header);
  std::istringstream hs(header);
  std::string magic, version, pf, nf, cf;
  hs >> magic >> version >> pf >> nf >> cf;
  if (magic != kCacheMagic) throw CacheError("not a coefficient cache: " + path.string());
  if (version != "v" + std::to_string(kCacheVersion)) throw CacheError("unsupported cache version " + version);
  if (pf.rfind("p=", 0) != 0 || nf.rfind("N=", 0) != 0 || cf.rfind("count=", 0) != 0) {
    throw CacheError("malformed cache header");
  }
  const int p = parse_int(std::string_view(pf).substr(2), "p");
  const int N = parse_int(std::string_view(nf).substr(2), "N");
  const int count = parse_int(std::string_view(cf).substr(6), "count");
  if (expected_p && *expected_p != p) {
    throw CacheError("cache metadata mismatch: file has p=" + std::to_string(p) + ", expected " +
                     std::to_string(*expected_p));
  }
  if (expected_N && *expected_N != N) {
    throw CacheError("cache metadata mismatch: file has N=" + std::to_string(N) + ", expected " +
                     std::to_string(*expected_N));
  }

  ModelParams params;
  try {
    params = ModelParams(p, 1.0, N);
  } catch (const InvalidArgument& e) {
    throw CacheError(std::string("invalid cache metadata: ") + e.what());
  }

  std::vector<OrbitalConfig> keys;
  std::vector<BigInt> coeffs;
  std::string line;
  while (std::getline(lines, line)) {
    const auto colon = line.find(':');
    if (colon == std::string::npos) throw CacheError("malformed entry: '" + line + "'");
    std::vector<int> m;
    std::string_view ks(line.data(), colon);
    std::size_t start = 0;
    while (start <= ks.size()) {
      const auto comma = ks.find(',', start);
      const auto end = comma == std::string_view::npos ? ks.size() : comma;
      m.push_back(parse_int(ks.substr(start, end - start), "orbital index"));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    const std::string value = line.substr(colon + 1);
    if (value.empty() || value.find_first_not_of("-0123456789") != std::string::npos) {
      throw CacheError("malformed coefficient: '" + value + "'");
    }
    keys.emplace_back(std::move(m));
    coeffs.emplace_back(value);
  }
  if (static_cast<int>(keys.size()) != count) throw CacheError("entry count does not match header");
  try {
    return CoefficientTable(params, std::move(keys), std::move(coeffs));
  } catch (const InvalidArgument& e) {
    throw CacheError(std::string("malformed entry: ") + e.what());
  }
}

}  // namespace laughlin
