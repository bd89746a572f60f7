// Copyright 2026 The laughlin Authors
// SPDX-License-Identifier: Apache-2.0

// Prints one PASS/FAIL line per acceptance criterion. Criteria listed with
// --known-failure are still run and reported but do not set the exit status.

#include <CLI11.hpp>
#include <cstdio>
#include <set>

#include "laughlin/verify.hpp"

int main(int argc, char** argv) {
  CLI::App app{"laughlin acceptance criteria"};
  std::set<int> known;
  laughlin::AcceptanceOptions opts;
  app.add_option("--known-failure", known, "criterion expected to fail")->check(CLI::Range(1, 12));
  app.add_option("--only", opts.only, "run only these criteria")->check(CLI::Range(1, 12));
  app.add_option("--mc-sweeps", opts.mc_sweeps_large, "sweeps for the large MCMC run");
  CLI11_PARSE(app, argc, argv);

  opts.on_result = [](const laughlin::CheckResult& r) {
    std::printf("%s\n", laughlin::format_result(r).c_str());
    std::fflush(stdout);
  };
  const auto results = laughlin::run_acceptance(opts);
  int unexpected = 0;
  for (const auto& r : results) {
    const int id = std::stoi(r.id);
    const bool expected_fail = known.count(id) > 0;
    if (!r.passed && !expected_fail) ++unexpected;
    if (r.passed && expected_fail) std::printf("note: criterion %d passed but was listed as a known failure\n", id);
  }
  std::printf("%zu criteria, %d unexpected failure(s)\n", results.size(), unexpected);
  return unexpected == 0 ? 0 : 1;
}
