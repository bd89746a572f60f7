// Copyright 2026 The laughlin Authors
// SPDX-License-Identifier: Apache-2.0

// Continuum oracles for two particles, independent of the orbital expansion.

#pragma once

#include <cmath>
#include <functional>

namespace laughlin::testing {

/// y-averaged |e^{g z_2} - e^{g z_1}|^{2p} for p in {2, 3}.
inline double pair_factor(double x1, double x2, double g, int p) {
  const double A = std::exp(2 * g * x1) + std::exp(2 * g * x2);
  const double B = 2 * std::exp(g * (x1 + x2));
  // Average of (A - B cos t)^p over t.
  if (p == 2) return A * A + B * B / 2;
  return A * A * A + 1.5 * A * B * B;
}

/// Trapezoid rule of f(x1, x2) e^{-x1^2 - x2^2} over [lo, hi]^2 with the
/// region restricted by `keep`.
inline double two_particle_integral(double g, int p, double lo, double hi, int n,
                                    const std::function<bool(double, double)>& keep = {}) {
  const double h = (hi - lo) / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x1 = lo + i * h;
    const double w1 = (i == 0 || i == n) ? 0.5 : 1.0;
    for (int j = 0; j <= n; ++j) {
      const double x2 = lo + j * h;
      if (keep && !keep(x1, x2)) continue;
      const double w2 = (j == 0 || j == n) ? 0.5 : 1.0;
      s += w1 * w2 * pair_factor(x1, x2, g, p) * std::exp(-x1 * x1 - x2 * x2);
    }
  }
  return s * h * h;
}

/// ||Psi_2||^2 in units where the root configuration has norm 1.
inline double two_particle_norm(double g, int p) {
  const double integral = two_particle_integral(g, p, -8.0, 8.0 + 2 * p * g, 1600);
  // The root term (one particle in orbital 0, one in orbital p) contributes
  // 2 * pi * e^{p^2 g^2} when written out in both labellings.
  return integral / (2 * M_PI * std::exp(p * p * g * g));
}

}  // namespace laughlin::testing
