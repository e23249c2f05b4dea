/*
 *   Copyright 2026 The jbcp Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

// Instances and independent reference computations shared by the tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "jbcp/jbcp.hpp"

namespace jbcp::testing {

/// M = K = 1, h = 1, sigma^2 = 1, gamma = 0.5, C = 1 bit.
inline NetworkInstance scalar_instance(double budget = 10.0) {
  NetworkInstance inst;
  inst.num_bs = 1;
  inst.num_users = 1;
  inst.channels = {CVector::Ones(1)};
  inst.noise_powers = {1.0};
  inst.sinr_targets = {0.5};
  inst.fronthaul_caps = {1.0};
  inst.power_budgets = {budget};
  return inst;
}

struct ScalarOptimum {
  double p = 0.0;
  double q = 0.0;
  double value = std::numeric_limits<double>::infinity();
};

/// Brute-force minimum of p + q over a zooming 2-D grid, subject to
/// p / (q + sigma^2) >= gamma, log2((p + q) / q) <= C and p + q <= P.
/// Uses nothing from the library beyond the instance fields.
inline ScalarOptimum scalar_grid_search(const NetworkInstance& inst) {
  const double g = inst.sinr_targets[0];
  const double s2 = inst.noise_powers[0] / std::norm(inst.channels[0](0));
  const double cap = inst.fronthaul_caps[0];
  const double budget = inst.power_budgets[0];
  auto feasible = [&](double p, double q) {
    if (p < 0.0 || q <= 0.0) return false;
    if (p < g * (q + s2)) return false;
    if (std::log2((p + q) / q) > cap) return false;
    return p + q <= budget;
  };
  ScalarOptimum best;
  double cp = 2.0, cq = 2.0, half = 2.0;
  for (int level = 0; level < 7; ++level) {
    const int n = 200;
    const double step = 2.0 * half / n;
    ScalarOptimum lvl;
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; j <= n; ++j) {
        const double p = cp - half + i * step;
        const double q = cq - half + j * step;
        if (feasible(p, q) && p + q < lvl.value) lvl = {p, q, p + q};
      }
    }
    if (!std::isfinite(lvl.value)) break;
    best = lvl;
    cp = best.p;
    cq = best.q;
    half = 10.0 * step;
  }
  return best;
}

/// Closed form of the same problem when the budget is slack:
/// q = gamma sigma^2 / (2^C - 1 - gamma), p = gamma (q + sigma^2).
inline ScalarOptimum scalar_closed_form(double gamma, double sigma2, double cap) {
  ScalarOptimum o;
  o.q = gamma * sigma2 / (std::exp2(cap) - 1.0 - gamma);
  o.p = gamma * (o.q + sigma2);
  o.value = o.p + o.q;
  return o;
}

inline CVector random_cvector(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  CVector v(n);
  for (int i = 0; i < n; ++i) v(i) = Complex(nd(rng), nd(rng));
  return v;
}

inline CMatrix random_hermitian(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  CMatrix a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = Complex(nd(rng), nd(rng));
  }
  return (a + a.adjoint()) / 2.0;
}

inline CMatrix random_psd(int n, std::mt19937_64& rng, int rank = -1) {
  if (rank < 0) rank = n;
  CMatrix a = CMatrix::Zero(n, n);
  for (int r = 0; r < rank; ++r) {
    const CVector v = random_cvector(n, rng);
    a += v * v.adjoint();
  }
  return a;
}

inline BeamformingDesign random_design(int M, int K, std::mt19937_64& rng, double q_scale = 0.1) {
  BeamformingDesign d;
  for (int k = 0; k < K; ++k) d.beamformers.push_back(random_cvector(M, rng));
  d.compression_cov = q_scale * (random_psd(M, rng) + CMatrix::Identity(M, M));
  return d;
}

/// Small instance with generous SINR/fronthaul parameters (gamma = 0.3, C = 2
/// bits) whose budgets are set from the unconstrained optimum: twice the
/// antenna power plus one everywhere, except antenna 1 which gets half of its
/// unconstrained power so that its power constraint binds. Returns nothing when
/// the resulting relaxation is infeasible.
inline std::optional<NetworkInstance> loose_instance(int index) {
  ExperimentConfig cfg = paper_config();
  cfg.num_bs = 2 + index % 3;
  cfg.num_users = 2 + (index / 3) % 2;
  cfg.fronthaul_caps.assign(static_cast<std::size_t>(cfg.num_bs), 2.0);
  cfg.noise_powers.assign(static_cast<std::size_t>(cfg.num_users), 1.0);
  cfg.power_budgets.assign(static_cast<std::size_t>(cfg.num_bs), 1e3);
  NetworkInstance inst = generate_instance(1000 + static_cast<std::uint64_t>(index), cfg, 0.3);
  const AlgorithmRun free = run_direct(inst, 1e-8);
  if (!free.has_design) return std::nullopt;
  for (int m = 0; m < inst.num_bs; ++m) {
    inst.power_budgets[static_cast<std::size_t>(m)] = 2.0 * antenna_power(inst, free.design, m) + 1.0;
  }
  inst.power_budgets[0] = 0.5 * antenna_power(inst, free.design, 0);
  if (!run_direct(inst, 1e-8).has_design) return std::nullopt;
  return inst;
}

/// Small instance drawn with the reference parameters (C = log2 1.1, unit
/// noise, budgets 8.5 and 8.5e-3 on antenna 1) and gamma = 0.03.
inline NetworkInstance reference_small_instance(int index) {
  ExperimentConfig cfg = paper_config();
  cfg.num_bs = 2 + index % 3;
  cfg.num_users = 2 + (index / 3) % 2;
  cfg.fronthaul_caps.assign(static_cast<std::size_t>(cfg.num_bs), std::log2(1.1));
  cfg.noise_powers.assign(static_cast<std::size_t>(cfg.num_users), 1.0);
  cfg.power_budgets.assign(static_cast<std::size_t>(cfg.num_bs), 8.5);
  cfg.power_budgets[0] = 8.5e-3;
  return generate_instance(5000 + static_cast<std::uint64_t>(index), cfg, 0.03);
}

inline double relative_gap(double a, double b) {
  return std::abs(a - b) / std::max(1.0, std::abs(b));
}

inline double relative_error(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace jbcp::testing
