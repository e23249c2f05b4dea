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

// Projected gradient ascent on the partial Lagrangian dual
//
//     maximize_{mu >= 0}  f(mu) = d(mu) - sum_m mu_m P_m,
//
// where d(mu) is the optimal value of the inner problem with the power rows
// priced into the objective. f is differentiable and its gradient is
// antenna power minus budget at the inner solution, so three ascent schemes
// are provided:
//
//  * Pega: exact inner solves, alternating Barzilai-Borwein stepsizes and a
//    nonmonotone (GLL) backtracking line search.
//  * Piga: same control flow, inner solves stopped at a diminishing
//    tolerance eps_in(i) = a (i + 1)^-b and warm-started.
//  * Psga: the subgradient baseline with stepsize alpha0 (i + 1)^-0.1 and no
//    line search.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jbcp/conic_solver.hpp"
#include "jbcp/errors.hpp"
#include "jbcp/network.hpp"
#include "jbcp/sdr.hpp"

namespace jbcp {

enum class Algorithm { Pega, Piga, Psga };

inline const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Pega: return "pega";
    case Algorithm::Piga: return "piga";
    case Algorithm::Psga: return "psga";
  }
  return "unknown";
}

struct OptimizerSettings {
  double eps_out = 1e-3;  // projected-gradient termination tolerance
  int window = 10;        // N, length of the GLL reference window
  double theta = 1e-4;    // sufficient-increase parameter
  double rho = 0.25;      // backtracking factor
  double alpha0 = 300.0;
  double alpha_min = 1e-4;
  double alpha_max = 1e12;

  double exact_tolerance = 1e-8;     // inner tolerance for Pega and Psga
  double schedule_scale = 1e-3;      // Piga: eps_in(i) = scale * (i + 1)^-exponent
  double schedule_exponent = 2.0;
  double psga_exponent = 0.1;        // Psga: alpha0 * (i + 1)^-exponent

  int max_outer = 500;
  int max_backtracks = 60;
  int inner_max_iterations = 100;
  bool piga_warm_start = true;
  double warm_start_weight = 0.9999;
  /// Multipliers beyond this are taken as evidence that the power budgets
  /// cannot be met (the dual is unbounded above).
  double mu_cap = 1e10;
  std::optional<RVector> mu0;  // defaults to zero

  void validate() const {
    if (!(eps_out > 0.0)) throw InputError("eps_out must be positive");
    if (window < 1) throw InputError("window N must be at least 1");
    if (!(theta > 0.0 && theta < 1.0)) throw InputError("theta must lie in (0, 1)");
    if (!(rho > 0.0 && rho < 1.0)) throw InputError("rho must lie in (0, 1)");
    if (!(alpha_min > 0.0 && alpha_min < alpha_max)) throw InputError("need 0 < alpha_min < alpha_max");
    if (!(alpha0 > 0.0)) throw InputError("alpha0 must be positive");
    if (!(exact_tolerance > 0.0) || !(schedule_scale > 0.0)) throw InputError("inner tolerances must be positive");
    if (max_outer < 0 || max_backtracks < 1) throw InputError("iteration limits must be positive");
  }

  /// Inner tolerance used at outer iteration i; never tighter than the exact one.
  double inner_tolerance(Algorithm algo, int i) const {
    if (algo != Algorithm::Piga) return exact_tolerance;
    const double t = schedule_scale * std::pow(static_cast<double>(i + 1), -schedule_exponent);
    return std::max(t, exact_tolerance);
  }
};

// ---------------------------------------------------------------------------
// Step primitives
// ---------------------------------------------------------------------------

/// max(mu + direction, 0) componentwise.
inline RVector project_step(const RVector& mu, const RVector& direction) {
  if (mu.size() != direction.size()) throw InputError("project_step: dimension mismatch");
  return (mu + direction).cwiseMax(0.0);
}

/// Norm of the projected-gradient residual [mu + g]_+ - mu.
inline double projected_residual(const RVector& mu, const RVector& g) {
  return (project_step(mu, g) - mu).norm();
}

inline bool terminated(const RVector& mu, const RVector& g, double eps_out) {
  return projected_residual(mu, g) <= eps_out;
}

/// Nonmonotone acceptance: f_new >= min(window) + theta * g^T (mu_new - mu).
inline bool gll_accepts(double f_new, std::span<const double> window, const RVector& g,
                        const RVector& step, double theta) {
  if (window.empty()) throw InputError("gll_accepts: empty reference window");
  const double f_ref = *std::min_element(window.begin(), window.end());
  return f_new >= f_ref + theta * g.dot(step);
}

/// Alternating Barzilai-Borwein stepsize for iteration i >= 1, with
/// dmu = mu^i - mu^{i-1} and dg = g^{i-1} - g^i, clipped to [alpha_min, alpha_max].
/// Even i uses ||dmu||^2 / |dmu^T dg|, odd i uses |dmu^T dg| / ||dg||^2.
inline double abb_stepsize(const RVector& dmu, const RVector& dg, int i, double alpha_min,
                           double alpha_max) {
  if (dmu.size() != dg.size()) throw InputError("abb_stepsize: dimension mismatch");
  const double sy = std::abs(dmu.dot(dg));
  const double num = (i % 2 == 0) ? dmu.squaredNorm() : sy;
  const double den = (i % 2 == 0) ? sy : dg.squaredNorm();
  double alpha = (den > 0.0) ? num / den : alpha_max;
  if (!std::isfinite(alpha)) alpha = alpha_max;
  return std::clamp(alpha, alpha_min, alpha_max);
}

// ---------------------------------------------------------------------------
// Dual function evaluation
// ---------------------------------------------------------------------------

struct DualEvaluation {
  double f = 0.0;            // d(mu) - mu^T P
  RVector g;                 // antenna power - budget
  double inner_value = 0.0;  // d(mu)
  CovarianceDesign design;
  int inner_iterations = 0;
  SolveResult raw;
};

/// Owns the inner program of one instance and re-solves it for any mu.
class DualOracle {
 public:
  explicit DualOracle(const NetworkInstance& inst)
      : inst_(inst),
        program_(build_inner_program(inst, RVector::Zero(inst.num_bs))),
        solver_(program_) {
    budgets_.resize(inst.num_bs);
    for (int m = 0; m < inst.num_bs; ++m) budgets_(m) = inst.power_budgets[static_cast<std::size_t>(m)];
  }

  const NetworkInstance& instance() const { return inst_; }
  const RVector& budgets() const { return budgets_; }

  DualEvaluation evaluate(const RVector& mu, double tolerance, const WarmStart* warm = nullptr,
                          int max_iterations = 100, double warm_weight = 0.99) {
    reweight_inner(program_, mu);
    SolverSettings st;
    st.tolerance = tolerance;
    st.max_iterations = max_iterations;
    if (warm != nullptr) st.warm_start = *warm;
    st.warm_start_weight = warm_weight;
    DualEvaluation ev;
    ev.raw = solver_.solve(program_.c, st);
    ev.inner_iterations = ev.raw.iterations;
    if (ev.raw.status == SolveStatus::PrimalInfeasible) {
      throw InfeasibleError("SINR and fronthaul constraints cannot be met simultaneously");
    }
    if (!ev.raw.optimal()) {
      throw SolverError(std::string("inner solve ended with status ") + to_string(ev.raw.status));
    }
    SolutionExtract ex = extract_solution(program_, ev.raw);
    ev.design = std::move(ex.design);
    ev.inner_value = ex.objective_value;
    ev.f = ev.inner_value - mu.dot(budgets_);
    ev.g.resize(inst_.num_bs);
    for (int m = 0; m < inst_.num_bs; ++m) ev.g(m) = antenna_power(inst_, ev.design, m) - budgets_(m);
    return ev;
  }

 private:
  NetworkInstance inst_;
  ConeProgram program_;
  ConeSolver solver_;
  RVector budgets_;
};

inline DualEvaluation evaluate_dual(const NetworkInstance& inst, const RVector& mu,
                                    double inner_tolerance) {
  detail::check_multipliers(mu, inst.num_bs);
  DualOracle oracle(inst);
  return oracle.evaluate(mu, inner_tolerance);
}

// ---------------------------------------------------------------------------
// Outer loop
// ---------------------------------------------------------------------------

enum class Termination { Converged, MaxIterations, LineSearchFailed, DualUnbounded };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::Converged: return "converged";
    case Termination::MaxIterations: return "max-iterations";
    case Termination::LineSearchFailed: return "line-search-failed";
    case Termination::DualUnbounded: return "dual-unbounded";
  }
  return "unknown";
}

/// Row i describes iterate mu^i and the work spent reaching it.
struct TraceRow {
  int iteration = 0;
  double f = 0.0;
  double projected_residual = 0.0;
  double lambda = 0.0;  // backtracking factor accepted on arrival (0 for the start)
  double alpha = 0.0;   // base stepsize used on arrival (0 for the start)
  int inner_iterations = 0;
  double cumulative_seconds = 0.0;
};

struct OutcomeReport {
  Algorithm algorithm = Algorithm::Pega;
  Termination termination = Termination::MaxIterations;
  std::string message;
  RVector mu;
  double f = 0.0;
  RVector g;
  CovarianceDesign design;
  std::vector<TraceRow> trace;  // iterations + 1 rows
  std::vector<double> evaluated_values;  // f at every inner solve, trials included
  int iterations = 0;           // accepted outer steps
  long inner_iterations = 0;    // summed over every inner solve
  int evaluations = 0;
  double seconds = 0.0;

  bool converged() const { return termination == Termination::Converged; }
};

inline OutcomeReport run(const NetworkInstance& inst, const OptimizerSettings& settings,
                         Algorithm algo) {
  settings.validate();
  inst.validate();
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  DualOracle oracle(inst);
  RVector mu = settings.mu0.value_or(RVector::Zero(inst.num_bs));
  detail::check_multipliers(mu, inst.num_bs);

  OutcomeReport rep;
  rep.algorithm = algo;

  auto evaluate = [&](const RVector& at, int i, const DualEvaluation* from) {
    const bool warm = algo == Algorithm::Piga && settings.piga_warm_start && from != nullptr;
    WarmStart ws;
    if (warm) ws = from->raw.as_warm_start();
    DualEvaluation ev = oracle.evaluate(at, settings.inner_tolerance(algo, i), warm ? &ws : nullptr,
                                        settings.inner_max_iterations, settings.warm_start_weight);
    rep.inner_iterations += ev.inner_iterations;
    rep.evaluations += 1;
    rep.evaluated_values.push_back(ev.f);
    return ev;
  };

  DualEvaluation cur = evaluate(mu, 0, nullptr);
  std::deque<double> window{cur.f};
  double alpha = settings.alpha0;
  rep.trace.push_back({0, cur.f, projected_residual(mu, cur.g), 0.0, 0.0, cur.inner_iterations, elapsed()});

  for (int i = 0;; ++i) {
    if (terminated(mu, cur.g, settings.eps_out)) {
      rep.termination = Termination::Converged;
      break;
    }
    if (i >= settings.max_outer) {
      rep.termination = Termination::MaxIterations;
      break;
    }
    if (mu.maxCoeff() > settings.mu_cap) {
      rep.termination = Termination::DualUnbounded;
      rep.message = "multipliers exceeded the cap; the power budgets appear infeasible";
      break;
    }

    const long inner_before = rep.inner_iterations;
    RVector next_mu;
    std::optional<DualEvaluation> next;
    double lambda = 1.0;
    double step_alpha = alpha;

    if (algo == Algorithm::Psga) {
      step_alpha = settings.alpha0 * std::pow(static_cast<double>(i + 1), -settings.psga_exponent);
      next_mu = project_step(mu, step_alpha * cur.g);
      next = evaluate(next_mu, i, &cur);
    } else {
      const std::vector<double> ref(window.begin(), window.end());
      for (int j = 0; j < settings.max_backtracks; ++j) {
        lambda = std::pow(settings.rho, j);
        next_mu = project_step(mu, lambda * alpha * cur.g);
        DualEvaluation trial = evaluate(next_mu, i, &cur);
        if (gll_accepts(trial.f, ref, cur.g, next_mu - mu, settings.theta)) {
          next = std::move(trial);
          break;
        }
      }
      if (!next) {
        rep.termination = Termination::LineSearchFailed;
        rep.message = "no step satisfied the line search after " +
                      std::to_string(settings.max_backtracks) +
                      " backtracks (stale or inexact gradient suspected)";
        break;
      }
      alpha = abb_stepsize(next_mu - mu, cur.g - next->g, i + 1, settings.alpha_min,
                           settings.alpha_max);
    }

    mu = std::move(next_mu);
    cur = std::move(*next);
    window.push_back(cur.f);
    while (static_cast<int>(window.size()) > settings.window) window.pop_front();
    rep.iterations = i + 1;
    rep.trace.push_back({i + 1, cur.f, projected_residual(mu, cur.g), lambda, step_alpha,
                         static_cast<int>(rep.inner_iterations - inner_before), elapsed()});
  }

  rep.mu = mu;
  rep.f = cur.f;
  rep.g = cur.g;
  rep.design = std::move(cur.design);
  rep.seconds = elapsed();
  return rep;
}

}  // namespace jbcp
