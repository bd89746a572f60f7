// Copyright 2026 The laughlin Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end.

#include <boost/version.hpp>
#include <CLI11.hpp>
#include <Eigen/Core>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "laughlin/correlations.hpp"
#include "laughlin/errors.hpp"
#include "laughlin/expansion.hpp"
#include "laughlin/hamiltonian.hpp"
#include "laughlin/parallel.hpp"
#include "laughlin/plasma.hpp"
#include "laughlin/renewal.hpp"
#include "laughlin/verify.hpp"

#ifndef LAUGHLIN_VERSION
#define LAUGHLIN_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace laughlin;

namespace {

constexpr int kExitVerification = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitResource = 3;
constexpr const char* kCacheEnv = "LAUGHLIN_CACHE_DIR";

// Formatting ----------------------------------------------------------------------

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex16(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_json(std::ostream& os, const json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close(static_cast<std::size_t>(indent), ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << pad << json(it.key()).dump() << ": ";
        write_json(os, it.value(), indent + 2);
      }
      os << "\n" << close << "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      bool scalars = true;
      for (const auto& e : j) scalars = scalars && !e.is_structured();
      if (scalars) {
        os << "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) os << ", ";
          write_json(os, j[i], indent + 2);
        }
        os << "]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ",\n";
        os << pad;
        write_json(os, j[i], indent + 2);
      }
      os << "\n" << close << "]";
      return;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (std::isfinite(v)) {
        os << fmt(v);
      } else {
        os << "null";
      }
      return;
    }
    default:
      os << j.dump();
  }
}

std::string json_text(const json& j) {
  std::ostringstream os;
  write_json(os, j, 0);
  os << "\n";
  return os.str();
}

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : columns_(header.size()) { add(header); }

  void add(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw std::logic_error("csv row width");
    for (std::size_t i = 0; i < cells.size(); ++i) text_ += (i ? "," : "") + cells[i];
    text_ += "\n";
  }

  [[nodiscard]] const std::string& text() const { return text_; }

 private:
  std::size_t columns_;
  std::string text_;
};

// Configuration -------------------------------------------------------------------

struct RunConfig {
  std::string subcommand;
  std::vector<std::string> assignments;
  int p = 3;
  double gamma = 1.0;
  std::optional<int> N;
  std::optional<int> Nmax;
  std::string cache_dir;
  std::string out_dir = "laughlin-out";
  std::uint64_t seed = 1;
  int threads = 0;
  bool override_unconverged = false;
  bool no_compute = false;
  json options = json::object();

  void parse_assignments() {
    for (const auto& a : assignments) {
      const auto eq = a.find('=');
      if (eq == std::string::npos || eq == 0) throw InvalidArgument("expected key=value, got '" + a + "'");
      const std::string key = a.substr(0, eq);
      const std::string val = a.substr(eq + 1);
      try {
        std::size_t used = 0;
        if (key == "p") {
          p = std::stoi(val, &used);
        } else if (key == "gamma") {
          gamma = std::stod(val, &used);
        } else if (key == "N") {
          N = std::stoi(val, &used);
        } else if (key == "Nmax") {
          Nmax = std::stoi(val, &used);
        } else {
          throw InvalidArgument("unknown parameter '" + key + "' (expected p, gamma, N or Nmax)");
        }
        if (used != val.size()) throw std::invalid_argument(val);
      } catch (const std::logic_error&) {
        throw InvalidArgument("cannot parse value of '" + key + "': '" + val + "'");
      }
    }
    if (N) ModelParams(p, gamma, *N).validate();
    if (Nmax) ModelParams(p, gamma, *Nmax).validate();
    ModelParams(p, gamma, 1).validate();
  }

  [[nodiscard]] int require_N() const {
    if (N) return *N;
    if (Nmax) return *Nmax;
    throw InvalidArgument(subcommand + " needs N=<particles>");
  }

  [[nodiscard]] int require_Nmax() const {
    if (Nmax) return *Nmax;
    if (N) return *N;
    throw InvalidArgument(subcommand + " needs Nmax=<particles>");
  }

  [[nodiscard]] json to_json() const {
    json j;
    j["subcommand"] = subcommand;
    j["p"] = p;
    j["gamma"] = gamma;
    j["N"] = N ? json(*N) : json(nullptr);
    j["Nmax"] = Nmax ? json(*Nmax) : json(nullptr);
    j["cache_dir"] = cache_dir;
    j["out_dir"] = out_dir;
    j["seed"] = seed;
    j["override_unconverged"] = override_unconverged;
    j["no_compute"] = no_compute;
    j["options"] = options;
    return j;
  }
};

// Artifacts -----------------------------------------------------------------------

class Artifacts {
 public:
  explicit Artifacts(const RunConfig& config) : config_(config), dir_(config.out_dir) {}

  void write(const std::string& name, const std::string& content) {
    fs::create_directories(dir_);
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write " + (dir_ / name).string());
    out << content;
    outputs_.push_back({{"file", name}, {"bytes", content.size()}, {"fnv1a64", hex16(fnv1a64(content))}});
  }

  void write_json_file(const std::string& name, const json& j) { write(name, json_text(j)); }

  void input(const fs::path& path, bool computed) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    inputs_.push_back({{"file", path.filename().string()}, {"fnv1a64", hex16(fnv1a64(ss.str()))}});
    if (computed) ++computed_tables_;
  }

  void finish(double wall_seconds, int status) {
    json m;
    m["tool"] = "laughlin";
    m["version"] = LAUGHLIN_VERSION;
    m["build"] = {{"compiler", __VERSION__},
                  {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                std::to_string(EIGEN_MINOR_VERSION)},
                  {"boost", BOOST_LIB_VERSION},
                  {"cache_format", kCacheVersion}};
    m["config"] = config_.to_json();
    m["exit_status"] = status;
    m["inputs"] = inputs_;
    m["outputs"] = outputs_;
    fs::create_directories(dir_);
    const std::string text = json_text(m);
    std::ofstream(dir_ / "manifest.json", std::ios::binary) << text;
    json t;
    t["wall_seconds"] = wall_seconds;
    t["threads"] = config_.threads;
    t["computed_tables"] = computed_tables_;
    std::ofstream(dir_ / "timing.json", std::ios::binary) << json_text(t);
  }

 private:
  const RunConfig& config_;
  fs::path dir_;
  json inputs_ = json::array();
  json outputs_ = json::array();
  int computed_tables_ = 0;
};

std::string default_cache_dir() {
  if (const char* env = std::getenv(kCacheEnv); env && *env) return env;
  return "laughlin-cache";
}

// Tables for N = 1 ... upto, from the cache where possible.
std::vector<CoefficientTable> coefficient_tables(const RunConfig& c, int upto, Artifacts& art) {
  const int cap = default_expansion_cap(c.p);
  if (upto > cap) {
    throw ResourceLimit("N = " + std::to_string(upto) + " exceeds the expansion cap " + std::to_string(cap) +
                        " for p = " + std::to_string(c.p));
  }
  const fs::path dir(c.cache_dir);
  std::vector<CoefficientTable> tables;
  bool complete = true;
  for (int n = 1; n <= upto && complete; ++n) {
    const fs::path path = dir / cache_file_name(c.p, n);
    if (!fs::exists(path)) {
      complete = false;
      break;
    }
    try {
      tables.push_back(load_cache(path, c.p, n));
    } catch (const CacheError& e) {
      if (c.no_compute) throw;
      std::cerr << "warning: " << e.what() << "; recomputing\n";
      complete = false;
    }
  }
  if (complete) {
    for (int n = 1; n <= upto; ++n) art.input(dir / cache_file_name(c.p, n), false);
    return tables;
  }
  if (c.no_compute) {
    throw InvalidArgument("coefficient table p=" + std::to_string(c.p) + " N<=" + std::to_string(upto) +
                          " is not in the cache " + dir.string() + " and --no-compute is set");
  }
  tables = expand_sequence(ModelParams(c.p, c.gamma, upto));
  fs::create_directories(dir);
  for (int n = 1; n <= upto; ++n) {
    const fs::path path = dir / cache_file_name(c.p, n);
    save_cache(tables[static_cast<std::size_t>(n - 1)], path);
    art.input(path, true);
  }
  return tables;
}

std::vector<AmplitudeTable> amplitude_tables(const std::vector<CoefficientTable>& coeffs, double gamma) {
  std::vector<AmplitudeTable> out;
  for (const auto& t : coeffs) out.push_back(amplitudes(t, gamma));
  return out;
}

std::string join(const OrbitalConfig& m, char sep) {
  std::string s;
  for (std::size_t i = 0; i < m.size(); ++i) s += (i ? std::string(1, sep) : "") + std::to_string(m[i]);
  return s;
}

// Subcommands ---------------------------------------------------------------------

struct ExpandOpts {
  bool no_table = false;
};

int run_expand(RunConfig& c, const ExpandOpts& o, Artifacts& art) {
  const int N = c.require_N();
  c.options["no_table"] = o.no_table;
  const auto tables = coefficient_tables(c, N, art);
  const CoefficientTable& t = tables.back();
  const AmplitudeTable a = amplitudes(t, c.gamma);
  BigInt biggest = 0;
  for (const auto& v : t.coefficients()) biggest = std::max(biggest, BigInt(abs(v)));
  if (!o.no_table) {
    CsvTable csv({"m", "coefficient", "amplitude"});
    for (std::size_t i = 0; i < t.size(); ++i) {
      csv.add({join(t.keys()[i], ' '), t.coefficients()[i].str(), fmt(a.entries()[i].a)});
    }
    art.write("coefficients.csv", csv.text());
  }
  json j;
  j["p"] = c.p;
  j["N"] = N;
  j["gamma"] = c.gamma;
  j["configurations"] = t.size();
  j["max_abs_coefficient"] = biggest.str();
  j["norm"] = a.norm();
  j["cache_file"] = cache_file_name(c.p, N);
  art.write_json_file("expand.json", j);
  std::cout << "p=" << c.p << " N=" << N << ": " << t.size() << " configurations, C_N = " << fmt(a.norm()) << "\n";
  return 0;
}

int run_norms(RunConfig& c, Artifacts& art) {
  const int Nmax = c.require_Nmax();
  const auto tables = amplitude_tables(coefficient_tables(c, Nmax, art), c.gamma);
  const NormSequence C = norms(tables);
  CsvTable csv({"N", "C_N", "log_C_N"});
  for (int n = 0; n <= C.max_N(); ++n) csv.add({std::to_string(n), fmt(C[n]), fmt(std::log(C[n]))});
  art.write("norms.csv", csv.text());
  double ratio = std::numeric_limits<double>::infinity();
  for (int a = 1; a <= Nmax; ++a) {
    for (int b = 1; a + b <= Nmax; ++b) ratio = std::min(ratio, C[a + b] / (C[a] * C[b]));
  }
  json j;
  j["p"] = c.p;
  j["gamma"] = c.gamma;
  j["Nmax"] = Nmax;
  j["min_supermultiplicative_ratio"] = std::isfinite(ratio) ? json(ratio) : json(nullptr);
  art.write_json_file("norms.json", j);
  return 0;
}

struct RenewalOpts {
  bool extended_precision = false;
};

int run_renewal(RunConfig& c, const RenewalOpts& o, Artifacts& art) {
  const int Nmax = c.require_Nmax();
  c.options["extended_precision"] = o.extended_precision;
  const auto tables = amplitude_tables(coefficient_tables(c, Nmax, art), c.gamma);
  RenewalOptions ro;
  ro.extended_precision = o.extended_precision;
  const RenewalModel m = build_renewal_model(tables, ro);
  const RenewalFunctionReport rf = renewal_function(m);
  CsvTable csv({"n", "alpha_n", "p_n", "u_n"});
  for (int n = 0; n <= m.max_N(); ++n) {
    const auto i = static_cast<std::size_t>(n);
    csv.add({std::to_string(n), fmt(m.alpha[i]), fmt(m.pn[i]), fmt(m.uN[i])});
  }
  art.write("renewal.csv", csv.text());
  json j;
  j["r"] = m.r;
  j["mu"] = m.mu;
  j["tail_mass"] = m.tail_mass;
  j["c_sub"] = m.c_sub;
  j["tail_moment"] = m.tail_moment;
  j["root_bias"] = m.root_bias;
  j["alpha_residual"] = m.alpha_residual;
  j["u_discrepancy"] = rf.max_discrepancy;
  j["converged"] = m.converged;
  if (o.extended_precision) j["extended_precision_delta"] = m.extended_precision_delta;
  art.write_json_file("renewal.json", j);
  std::cout << "r = " << fmt(m.r) << ", mu = " << fmt(m.mu) << ", tail mass " << fmt(m.tail_mass) << "\n";
  if (!m.converged) {
    std::cerr << "warning: truncated renewal model is unconverged (tail mass above " << kDefaultTailThreshold
              << ")\n";
  }
  return 0;
}

struct CorrOpts {
  std::vector<double> domain;
  int pair_max = 0;
  double dx = 0.05;
  std::vector<std::string> observables;
  bool infinite = true;
};

int run_corr(RunConfig& c, const CorrOpts& o, Artifacts& art) {
  const int Nmax = c.require_Nmax();
  const int N = c.N.value_or(Nmax);
  if (N > Nmax) throw InvalidArgument("N must not exceed Nmax");
  if (!o.domain.empty() && o.domain.size() != 2) throw InvalidArgument("--domain takes two values a b");
  if (o.dx <= 0.0) throw InvalidArgument("--dx must be positive");
  const int pair_max = o.pair_max > 0 ? o.pair_max : 5 * c.p;
  c.options["domain"] = o.domain;
  c.options["pair_max"] = pair_max;
  c.options["dx"] = o.dx;
  c.options["observables"] = o.observables;
  c.options["infinite"] = o.infinite;

  const auto tables = amplitude_tables(coefficient_tables(c, Nmax, art), c.gamma);
  const AmplitudeTable& t = tables[static_cast<std::size_t>(N - 1)];
  const auto occ = occupation_finite(t);

  CsvTable rows({"k", "value", "source", "error_estimate"});
  for (std::size_t k = 0; k < occ.size(); ++k) rows.add({std::to_string(k), fmt(occ[k]), "finite", fmt(0.0)});

  json report;
  report["p"] = c.p;
  report["gamma"] = c.gamma;
  report["N"] = N;
  report["Nmax"] = Nmax;

  if (!o.domain.empty()) {
    const DomainResult d = domain_weighted(t, o.domain[0], o.domain[1]);
    for (std::size_t k = 0; k < d.occupations.size(); ++k) {
      rows.add({std::to_string(k), fmt(d.occupations[k]), "domain", fmt(0.0)});
    }
    report["domain"] = {{"a", d.a}, {"b", d.b}, {"norm", d.norm}};
  }

  if (o.infinite) {
    const RenewalModel m = build_renewal_model(tables);
    const RodExpectations rods = rod_expectations(tables);
    const auto inf = occupation_infinite(m, rods, c.override_unconverged);
    for (std::size_t k = 0; k < inf.size(); ++k) {
      rows.add({std::to_string(k), fmt(inf[k]), "infinite", fmt(m.tail_mass)});
    }
    CsvTable pairs({"k", "value", "source", "error_estimate"});
    for (int d = 0; d <= pair_max; ++d) {
      const PairCorrelation pc = pair_infinite(m, rods, 0, d, c.override_unconverged);
      pairs.add({std::to_string(d), fmt(pc.truncated), "infinite", fmt(pc.error_estimate)});
    }
    art.write("pairs.csv", pairs.text());

    const PeriodTestResult pt = period_test(m, rods, {}, c.override_unconverged);
    report["period_test"] = {{"period", pt.period},
                             {"margin", pt.margin},
                             {"conclusive", pt.conclusive},
                             {"used_pair_moments", pt.used_pair_moments},
                             {"occupation_deviation", pt.occupation_deviation},
                             {"pair_deviation", pt.pair_deviation}};
    report["renewal"] = {{"r", m.r}, {"mu", m.mu}, {"tail_mass", m.tail_mass}};
    std::cout << "period " << pt.period << " (margin " << fmt(pt.margin) << ")\n";
  }
  art.write("occupations.csv", rows.text());

  const int L = t.num_sites() - 1;
  std::vector<double> xs;
  const double lo = -3.0;
  const double hi = L * c.gamma + 3.0;
  const auto steps = static_cast<long>(std::floor((hi - lo) / o.dx + 1e-9));
  for (long i = 0; i <= steps; ++i) xs.push_back(lo + static_cast<double>(i) * o.dx);
  const auto rho = density_profile(finite_profile(occ), xs, c.gamma);
  CsvTable prof({"x", "rho"});
  for (std::size_t i = 0; i < xs.size(); ++i) prof.add({fmt(xs[i]), fmt(rho[i])});
  art.write("profile.csv", prof.text());

  json obs = json::array();
  for (const auto& text : o.observables) {
    const Observable ob = Observable::parse(text);
    obs.push_back({{"observable", ob.to_string()}, {"value", moments_finite(t, ob)}});
  }
  report["observables"] = obs;
  art.write_json_file("corr.json", report);
  return 0;
}

struct HamOpts {
  bool check_ground_state = false;
  int spectrum = 0;
  bool monomer_dimer = false;
  int perturbation_order = -1;
  std::string variant = "parity";
};

int run_ham(RunConfig& c, const HamOpts& o, Artifacts& art) {
  const int N = c.require_N();
  if (o.variant != "parity" && o.variant != "full") throw InvalidArgument("--variant must be parity or full");
  if (o.spectrum < 0) throw InvalidArgument("--spectrum must be non-negative");
  const bool any = o.check_ground_state || o.spectrum > 0 || o.monomer_dimer || o.perturbation_order >= 0;
  const bool check = o.check_ground_state || !any;
  c.options["check_ground_state"] = check;
  c.options["spectrum"] = o.spectrum;
  c.options["monomer_dimer"] = o.monomer_dimer;
  c.options["perturbation_order"] = o.perturbation_order;
  c.options["variant"] = o.variant;
  const FormFactorVariant variant = o.variant == "full" ? FormFactorVariant::FullSum : FormFactorVariant::ParityMatched;
  const ModelParams P(c.p, c.gamma, N);
  LanczosOptions lo;
  lo.seed = c.seed;

  json j;
  j["p"] = c.p;
  j["gamma"] = c.gamma;
  j["N"] = N;
  bool ok = true;

  if (check || o.spectrum > 0) {
    const SectorBasis basis = SectorBasis::for_model(P);
    const HamiltonianBuild H = build_H(P, basis, variant);
    j["sector_dimension"] = basis.size();
    j["nonzeros"] = H.pairwise.matrix.nonZeros();
    j["build_deviation"] = H.max_deviation;
    if (check) {
      const auto tables = amplitude_tables(coefficient_tables(c, N, art), c.gamma);
      const GroundCheck g = ground_check(H.pairwise, sector_vector(tables.back(), basis));
      j["ground_state"] = {{"residual", g.residual},
                           {"kernel_dimension", g.kernel.dimension},
                           {"kernel_threshold", g.kernel.threshold},
                           {"lowest", g.kernel.lowest}};
      std::cout << "||H Psi||/||Psi|| = " << fmt(g.residual) << ", kernel dimension " << g.kernel.dimension << "\n";
      ok = ok && g.residual < 1e-8 && g.kernel.dimension == 1;
    }
    if (o.spectrum > 0) {
      const auto ev = spectrum(H.pairwise, std::min<int>(o.spectrum, static_cast<int>(basis.size())), lo);
      j["spectrum"] = ev;
    }
  }
  if (o.monomer_dimer) {
    const MonomerDimer md = build_monomer_dimer(P);
    const GroundCheck g = ground_check(md.H, md.psi, true);
    j["monomer_dimer"] = {{"sector_dimension", md.basis.size()},
                          {"terms", md.terms},
                          {"residual", g.residual},
                          {"kernel_dimension", g.kernel.dimension},
                          {"expanded_form_deviation", max_entry_difference(md.H, md.H_expanded)}};
    std::cout << "||H^MD Psi^MD||/||Psi^MD|| = " << fmt(g.residual) << "\n";
    ok = ok && g.residual < 1e-10;
  }
  if (o.perturbation_order >= 0) {
    const PerturbationResult pr = perturbation_series(P, o.perturbation_order);
    j["perturbation"] = {{"distance", pr.distance}, {"decreasing", pr.decreasing}, {"diverging", pr.diverging}};
    std::cout << "perturbation distances:";
    for (double d : pr.distance) std::cout << " " << fmt(d);
    std::cout << "\n";
  }
  art.write_json_file("ham.json", j);
  return ok ? 0 : kExitVerification;
}

struct McOpts {
  long sweeps = 20000;
  long burn_in = 2000;
  long thinning = 1;
  int chains = 4;
  double sigma_x = 0.5;
  double sigma_y = 0.5;
  bool no_tune = false;
  int bins = 0;
  std::vector<double> x_range;
  std::vector<int> excess;
  int y_bins = 16;
};

int run_mcmc(RunConfig& c, const McOpts& o, Artifacts& art) {
  const int N = c.require_N();
  const ModelParams P(c.p, c.gamma, N);
  McConfig mc;
  mc.sweeps = o.sweeps;
  mc.burn_in = o.burn_in;
  mc.thinning = o.thinning;
  mc.chains = o.chains;
  mc.sigma_x = o.sigma_x;
  mc.sigma_y = o.sigma_y;
  mc.tune = !o.no_tune;
  mc.seed = c.seed;
  mc.validate();

  McObservables obs;
  std::vector<double> range = o.x_range;
  if (range.empty()) range = {-3.0, P.max_orbital() * c.gamma + 3.0};
  if (range.size() != 2 || !(range[1] > range[0])) throw InvalidArgument("--x-range takes lo hi with lo < hi");
  const int bins = o.bins > 0 ? o.bins : std::max(1, static_cast<int>(std::lround((range[1] - range[0]) / (c.gamma / 4))));
  obs.bin_edges = uniform_edges(range[0], range[1], bins);
  if (o.excess.empty()) {
    for (int k = 1; k < N; ++k) obs.excess_sites.push_back(k);
  } else {
    obs.excess_sites = o.excess;
  }
  obs.y_bins = o.y_bins;
  c.options["sweeps"] = mc.sweeps;
  c.options["burn_in"] = mc.burn_in;
  c.options["thinning"] = mc.thinning;
  c.options["chains"] = mc.chains;
  c.options["sigma_x"] = mc.sigma_x;
  c.options["sigma_y"] = mc.sigma_y;
  c.options["tune"] = mc.tune;
  c.options["x_range"] = range;
  c.options["bins"] = bins;
  c.options["excess_sites"] = obs.excess_sites;
  c.options["y_bins"] = obs.y_bins;

  const McReport rep = metropolis_run(P, mc, obs);

  CsvTable dens({"bin_center", "density", "stderr"});
  for (std::size_t i = 0; i < rep.density.size(); ++i) {
    const double center = 0.5 * (rep.bin_edges[i] + rep.bin_edges[i + 1]);
    dens.add({fmt(center), fmt(rep.density[i].mean), fmt(rep.density[i].error)});
  }
  art.write("density.csv", dens.text());

  CsvTable ex({"xbar", "K", "probability"});
  json excess = json::array();
  for (const auto& e : rep.excess) {
    for (std::size_t i = 0; i < e.K_values.size(); ++i) {
      ex.add({fmt(e.xbar), std::to_string(e.K_values[i]), fmt(e.histogram[i].mean)});
    }
    excess.push_back({{"k", e.k}, {"xbar", e.xbar}, {"p_zero", e.p_zero.mean}, {"p_zero_stderr", e.p_zero.error}});
  }
  art.write("excess.csv", ex.text());

  json chains = json::array();
  for (std::size_t i = 0; i < rep.chains.size(); ++i) {
    const auto& ch = rep.chains[i];
    chains.push_back({{"chain", i},
                      {"seed", {c.seed, ch.seed_index}},
                      {"sigma_x", ch.sigma_x},
                      {"sigma_y", ch.sigma_y},
                      {"acceptance", ch.acceptance},
                      {"pathological", ch.pathological}});
  }
  json j;
  j["p"] = c.p;
  j["gamma"] = c.gamma;
  j["N"] = N;
  j["samples_per_chain"] = rep.samples_per_chain;
  j["chains"] = chains;
  j["split_rhat"] = rep.split_rhat;
  j["y_ks"] = rep.y_ks;
  j["flagged"] = rep.flagged;
  j["excess"] = excess;
  art.write_json_file("mcmc.json", j);
  std::cout << "samples/chain " << rep.samples_per_chain << ", split R-hat " << fmt(rep.split_rhat) << "\n";
  if (rep.flagged) std::cerr << "warning: at least one chain has pathological acceptance\n";
  return 0;
}

struct VerifyOpts {
  bool acceptance = false;
  long mc_sweeps = 20000;
  std::vector<int> only;
};

json results_json(const std::vector<CheckResult>& rs) {
  json a = json::array();
  for (const auto& r : rs) {
    a.push_back({{"id", r.id}, {"title", r.title}, {"passed", r.passed}, {"skipped", r.skipped}, {"detail", r.detail}});
  }
  return a;
}

int run_verify(RunConfig& c, const VerifyOpts& o, Artifacts& art) {
  const int Nmax = c.require_Nmax();
  c.options["acceptance"] = o.acceptance;
  if (o.acceptance) {
    c.options["mc_sweeps"] = o.mc_sweeps;
    c.options["only"] = o.only;
  }
  auto print = [](const CheckResult& r) { std::cout << format_result(r) << std::endl; };
  VerifyOptions vo;
  vo.seed = c.seed;
  vo.override_unconverged = c.override_unconverged;
  vo.on_result = print;
  const auto rs = verify_all(c.p, c.gamma, Nmax, vo);
  json j;
  j["checks"] = results_json(rs);
  bool ok = std::all_of(rs.begin(), rs.end(), [](const CheckResult& r) { return r.passed || r.skipped; });
  if (o.acceptance) {
    AcceptanceOptions ao;
    ao.seed = c.seed;
    ao.mc_sweeps_small = o.mc_sweeps;
    ao.mc_sweeps_large = o.mc_sweeps;
    ao.only = std::set<int>(o.only.begin(), o.only.end());
    ao.on_result = print;
    const auto acc = run_acceptance(ao);
    j["acceptance"] = results_json(acc);
    ok = ok && std::all_of(acc.begin(), acc.end(), [](const CheckResult& r) { return r.passed; });
  }
  j["passed"] = ok;
  art.write_json_file("verify.json", j);
  std::cout << (ok ? "all checks passed" : "verification FAILED") << "\n";
  return ok ? 0 : kExitVerification;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Laughlin state on the cylinder: expansion, renewal structure, correlations, parent Hamiltonians "
               "and plasma Monte Carlo"};
  app.require_subcommand(1);
  app.set_version_flag("--version", LAUGHLIN_VERSION);

  RunConfig cfg;
  cfg.cache_dir = default_cache_dir();
  app.add_option("--cache-dir", cfg.cache_dir, std::string("coefficient cache directory (default $") + kCacheEnv +
                                                   " or ./laughlin-cache)");
  app.add_option("--out-dir", cfg.out_dir, "output directory")->capture_default_str();
  app.add_option("--seed", cfg.seed, "random seed")->capture_default_str();
  app.add_option("--threads", cfg.threads, "OpenMP threads (0 = runtime default)")->check(CLI::NonNegativeNumber);
  app.add_flag("--override-unconverged", cfg.override_unconverged,
               "allow infinite-volume quantities from an unconverged renewal model");
  app.add_flag("--no-compute", cfg.no_compute, "fail instead of computing coefficient tables missing from the cache");

  auto params = [&](CLI::App* sub) {
    sub->add_option("params", cfg.assignments, "p=<int> gamma=<float> N=<int> Nmax=<int>");
    sub->fallthrough();
  };

  ExpandOpts eo;
  auto* expand_cmd = app.add_subcommand("expand", "exact coefficient table for N particles (cached)");
  params(expand_cmd);
  expand_cmd->add_flag("--no-table", eo.no_table, "skip coefficients.csv");

  auto* norms_cmd = app.add_subcommand("norms", "norms C_N for N <= Nmax");
  params(norms_cmd);

  RenewalOpts ro;
  auto* renewal_cmd = app.add_subcommand("renewal", "irreducible weights and the renewal function");
  params(renewal_cmd);
  renewal_cmd->add_flag("--extended-precision", ro.extended_precision, "also solve for r in long double");

  CorrOpts co;
  auto* corr_cmd = app.add_subcommand("corr", "finite and infinite-volume correlations");
  params(corr_cmd);
  corr_cmd->add_option("--domain", co.domain, "domain [a, b] in x for weighted occupations")->expected(2);
  corr_cmd->add_option("--pair-max", co.pair_max, "largest distance for pair correlations (default 5p)");
  corr_cmd->add_option("--dx", co.dx, "grid spacing of the density profile")->capture_default_str();
  corr_cmd->add_option("--observable", co.observables, "normal-ordered monomial, e.g. 'c*1 c*4 c2 c3'");
  corr_cmd->add_flag("!--finite-only", co.infinite, "skip infinite-volume quantities");

  HamOpts ho;
  auto* ham_cmd = app.add_subcommand("ham", "parent Hamiltonian checks");
  params(ham_cmd);
  ham_cmd->add_flag("--check-ground-state", ho.check_ground_state, "residual and kernel dimension (default)");
  ham_cmd->add_option("--spectrum", ho.spectrum, "lowest k eigenvalues");
  ham_cmd->add_flag("--monomer-dimer", ho.monomer_dimer, "monomer-dimer Hamiltonian and state (p=3)");
  ham_cmd->add_option("--perturbation-order", ho.perturbation_order, "Tao-Thouless perturbation series (p=3)");
  ham_cmd->add_option("--variant", ho.variant, "form factor: parity or full")->capture_default_str();

  McOpts mo;
  auto* mc_cmd = app.add_subcommand("mcmc", "Metropolis sampling of |Psi_N|^2");
  params(mc_cmd);
  mc_cmd->add_option("--sweeps", mo.sweeps, "recorded sweeps per chain")->capture_default_str();
  mc_cmd->add_option("--burn-in", mo.burn_in)->capture_default_str();
  mc_cmd->add_option("--thinning", mo.thinning)->capture_default_str();
  mc_cmd->add_option("--chains", mo.chains)->capture_default_str();
  mc_cmd->add_option("--sigma-x", mo.sigma_x, "initial x step")->capture_default_str();
  mc_cmd->add_option("--sigma-y", mo.sigma_y, "initial y step")->capture_default_str();
  mc_cmd->add_flag("--no-tune", mo.no_tune, "keep the initial step sizes");
  mc_cmd->add_option("--bins", mo.bins, "x histogram bins (default: width gamma/4)");
  mc_cmd->add_option("--x-range", mo.x_range, "x histogram range lo hi")->expected(2);
  mc_cmd->add_option("--excess", mo.excess, "sites k for the particle excess at (k - 1/2) p gamma");
  mc_cmd->add_option("--y-bins", mo.y_bins)->capture_default_str();

  VerifyOpts vo;
  auto* verify_cmd = app.add_subcommand("verify-all", "self-checks for (p, gamma, Nmax)");
  params(verify_cmd);
  verify_cmd->add_flag("--acceptance", vo.acceptance, "also run the fixed acceptance criteria");
  verify_cmd->add_option("--mc-sweeps", vo.mc_sweeps, "sweeps per chain for the acceptance Monte Carlo")
      ->capture_default_str();
  verify_cmd->add_option("--only", vo.only, "acceptance criteria to run (default all)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  const auto start = std::chrono::steady_clock::now();
  cfg.subcommand = app.get_subcommands().front()->get_name();
  Artifacts art(cfg);
  int status = 0;
  try {
    cfg.parse_assignments();
    set_thread_count(cfg.threads);
    if (cfg.subcommand == "expand") {
      status = run_expand(cfg, eo, art);
    } else if (cfg.subcommand == "norms") {
      status = run_norms(cfg, art);
    } else if (cfg.subcommand == "renewal") {
      status = run_renewal(cfg, ro, art);
    } else if (cfg.subcommand == "corr") {
      status = run_corr(cfg, co, art);
    } else if (cfg.subcommand == "ham") {
      status = run_ham(cfg, ho, art);
    } else if (cfg.subcommand == "mcmc") {
      status = run_mcmc(cfg, mo, art);
    } else {
      status = run_verify(cfg, vo, art);
    }
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    status = kExitInvalid;
  } catch (const CacheError& e) {
    std::cerr << "error: " << e.what() << "\n";
    status = kExitInvalid;
  } catch (const ResourceLimit& e) {
    std::cerr << "error: " << e.what() << "\n";
    status = kExitResource;
  } catch (const UnconvergedModel& e) {
    std::cerr << "error: " << e.what() << " (rerun with --override-unconverged to proceed)\n";
    status = kExitVerification;
  } catch (const VerificationFailure& e) {
    std::cerr << "verification failure: " << e.what() << "\n";
    status = kExitVerification;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    status = kExitVerification;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (status != kExitInvalid || fs::exists(cfg.out_dir)) {
    try {
      art.finish(secs, status);
    } catch (const std::exception& e) {
      std::cerr << "error writing manifest: " << e.what() << "\n";
    }
  }
  return status;
}
