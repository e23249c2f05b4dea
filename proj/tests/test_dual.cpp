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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "jbcp/dual.hpp"
#include "support.hpp"

namespace jbcp {
namespace {

RVector vec(std::initializer_list<double> v) {
  RVector r(static_cast<std::ptrdiff_t>(v.size()));
  std::ptrdiff_t i = 0;
  for (double x : v) r(i++) = x;
  return r;
}

double solve_direct(const NetworkInstance& inst) {
  const ConeProgram p = build_sdr_program(inst);
  const SolveResult r = solve(p);
  EXPECT_TRUE(r.optimal());
  return extract_solution(p, r).objective_value;
}

TEST(Abb, EvenAndOddIterations) {
  const RVector dmu = vec({1.0, 1.0});
  const RVector dg = vec({2.0, 0.0});
  EXPECT_DOUBLE_EQ(abb_stepsize(dmu, dg, 2, 1e-4, 1e12), 1.0);
  EXPECT_DOUBLE_EQ(abb_stepsize(dmu, dg, 1, 1e-4, 1e12), 0.5);
}

TEST(Abb, Safeguards) {
  EXPECT_DOUBLE_EQ(abb_stepsize(vec({1e10}), vec({1e-10}), 2, 1e-4, 1e12), 1e12);
  EXPECT_DOUBLE_EQ(abb_stepsize(vec({1e-10}), vec({1e10}), 2, 1e-4, 1e12), 1e-4);
  EXPECT_DOUBLE_EQ(abb_stepsize(vec({1.0, 0.0}), vec({0.0, 1.0}), 2, 1e-4, 1e12), 1e12);
  EXPECT_DOUBLE_EQ(abb_stepsize(vec({1.0}), vec({0.0}), 1, 1e-4, 1e12), 1e12);
}

TEST(ProjectStep, Examples) {
  EXPECT_EQ(project_step(vec({1.0, 0.5}), vec({-2.0, 0.1})), vec({0.0, 0.5 + 0.1}));
  EXPECT_EQ(project_step(vec({1.0, 0.5}), RVector::Zero(2)), vec({1.0, 0.5}));
  std::mt19937_64 rng(41);
  std::normal_distribution<double> nd(0.0, 3.0);
  for (int t = 0; t < 100; ++t) {
    const RVector out = project_step(vec({std::abs(nd(rng)), 0.0}), vec({nd(rng), nd(rng)}));
    EXPECT_GE(out.minCoeff(), 0.0);
  }
}

TEST(Gll, Examples) {
  const std::vector<double> one{10.0};
  const std::vector<double> two{10.0, 8.0};
  const RVector g = vec({1.0}), step = vec({1.0});
  EXPECT_TRUE(gll_accepts(10.5, one, g, step, 0.5));
  EXPECT_FALSE(gll_accepts(10.4999, one, g, step, 0.5));
  EXPECT_TRUE(gll_accepts(8.5, two, g, step, 0.5));
  EXPECT_FALSE(gll_accepts(8.4999, two, g, step, 0.5));
  EXPECT_TRUE(gll_accepts(8.0, two, g, vec({0.0}), 0.5));
  EXPECT_FALSE(gll_accepts(7.9999, two, g, vec({0.0}), 0.5));
  EXPECT_THROW(gll_accepts(1.0, std::vector<double>{}, g, step, 0.5), InputError);
}

TEST(Terminated, Examples) {
  EXPECT_TRUE(terminated(vec({0.0, 1.0}), vec({-2.0, 1e-5}), 1e-3));
  EXPECT_NEAR(projected_residual(vec({0.0, 1.0}), vec({-2.0, 1e-5})), 1e-5, 1e-15);
  EXPECT_FALSE(terminated(vec({1.0, 1.0}), vec({0.1, 0.0}), 1e-3));
  EXPECT_TRUE(terminated(vec({3.0, 0.0}), RVector::Zero(2), 1e-12));
}

TEST(OptimizerSettings, Validation) {
  OptimizerSettings s;
  EXPECT_NO_THROW(s.validate());
  auto bad = [](auto edit) {
    OptimizerSettings t;
    edit(t);
    EXPECT_THROW(t.validate(), InputError);
  };
  bad([](OptimizerSettings& t) { t.window = 0; });
  bad([](OptimizerSettings& t) { t.theta = 1.0; });
  bad([](OptimizerSettings& t) { t.rho = 0.0; });
  bad([](OptimizerSettings& t) { t.alpha_min = 2.0; t.alpha_max = 1.0; });
  bad([](OptimizerSettings& t) { t.eps_out = 0.0; });
}

TEST(OptimizerSettings, InnerToleranceSchedules) {
  const OptimizerSettings s;
  EXPECT_DOUBLE_EQ(s.inner_tolerance(Algorithm::Pega, 0), 1e-8);
  EXPECT_DOUBLE_EQ(s.inner_tolerance(Algorithm::Psga, 7), 1e-8);
  EXPECT_DOUBLE_EQ(s.inner_tolerance(Algorithm::Piga, 0), 1e-3);
  EXPECT_DOUBLE_EQ(s.inner_tolerance(Algorithm::Piga, 9), 1e-5);
  EXPECT_DOUBLE_EQ(s.inner_tolerance(Algorithm::Piga, 100000), 1e-8);
}

TEST(EvaluateDual, ScalarInstance) {
  const DualEvaluation tight = evaluate_dual(testing::scalar_instance(2.0), RVector::Zero(1), 1e-8);
  EXPECT_NEAR(tight.f, 2.0, 1e-6);
  EXPECT_NEAR(tight.g(0), 0.0, 1e-6);

  const DualEvaluation loose = evaluate_dual(testing::scalar_instance(10.0), RVector::Zero(1), 1e-8);
  EXPECT_NEAR(loose.f, 2.0, 1e-6);
  EXPECT_NEAR(loose.g(0), -8.0, 1e-6);

  const DualEvaluation priced = evaluate_dual(testing::scalar_instance(10.0), vec({0.5}), 1e-8);
  EXPECT_NEAR(priced.inner_value, 3.0, 1e-6);
  EXPECT_NEAR(priced.f, 3.0 - 5.0, 1e-6);
}

TEST(EvaluateDual, ZeroMultipliersGiveUnconstrainedOptimum) {
  NetworkInstance inst = *testing::loose_instance(3);
  const DualEvaluation ev = evaluate_dual(inst, RVector::Zero(inst.num_bs), 1e-8);
  inst.power_budgets.assign(static_cast<std::size_t>(inst.num_bs), 1e6);
  EXPECT_NEAR(ev.f, solve_direct(inst), 1e-6 * ev.f);
}

TEST(EvaluateDual, RejectsNegativeMultipliers) {
  EXPECT_THROW(evaluate_dual(testing::scalar_instance(), vec({-1.0}), 1e-8), InputError);
}

TEST(EvaluateDual, InfeasibleInnerProblemThrows) {
  NetworkInstance inst = testing::scalar_instance();
  inst.sinr_targets = {50.0};
  inst.fronthaul_caps = {0.1};
  EXPECT_THROW(evaluate_dual(inst, RVector::Zero(1), 1e-8), InfeasibleError);
}

TEST(DualFunction, GradientMatchesFiniteDifferences) {
  const NetworkInstance inst = *testing::loose_instance(1);
  DualOracle oracle(inst);
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  const double h = 1e-4;
  for (int t = 0; t < 3; ++t) {
    RVector mu(inst.num_bs);
    for (auto& x : mu) x = u(rng);
    const RVector g = oracle.evaluate(mu, 1e-8).g;
    for (int m = 0; m < inst.num_bs; ++m) {
      RVector up = mu, dn = mu;
      up(m) += h;
      dn(m) -= h;
      const double fd = (oracle.evaluate(up, 1e-8).f - oracle.evaluate(dn, 1e-8).f) / (2.0 * h);
      EXPECT_LE(std::abs(fd - g(m)), 1e-2 * std::abs(g(m))) << "m=" << m << " fd=" << fd << " g=" << g(m);
    }
  }
}

TEST(DualFunction, IsConcave) {
  const NetworkInstance inst = *testing::loose_instance(4);
  DualOracle oracle(inst);
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int t = 0; t < 5; ++t) {
    RVector a(inst.num_bs), b(inst.num_bs);
    for (auto& x : a) x = u(rng);
    for (auto& x : b) x = u(rng);
    const double s = 0.3;
    const double mid = oracle.evaluate(s * a + (1.0 - s) * b, 1e-8).f;
    const double chord = s * oracle.evaluate(a, 1e-8).f + (1.0 - s) * oracle.evaluate(b, 1e-8).f;
    EXPECT_GE(mid, chord - 1e-6);
  }
}

TEST(Run, InactiveBudgetsStopImmediately) {
  for (Algorithm a : {Algorithm::Pega, Algorithm::Piga, Algorithm::Psga}) {
    const OutcomeReport r = run(testing::scalar_instance(10.0), {}, a);
    EXPECT_EQ(r.termination, Termination::Converged);
    EXPECT_EQ(r.iterations, 0);
    EXPECT_EQ(r.mu(0), 0.0);
    EXPECT_EQ(r.trace.size(), 1u);
    // Piga's first inner solve runs at its loosest tolerance
    EXPECT_NEAR(r.f, 2.0, std::max(1e-6, 5.0 * OptimizerSettings{}.inner_tolerance(a, 0)));
  }
}

TEST(Run, UnreachableBudgetIsReportedAsUnboundedDual) {
  // p + q >= 2 for this instance, so a budget of 1.6 leaves the relaxation
  // empty and f grows without bound along mu.
  const OutcomeReport r = run(testing::scalar_instance(1.6), {}, Algorithm::Pega);
  EXPECT_EQ(r.termination, Termination::DualUnbounded);
  EXPECT_GT(r.mu(0), 1e9);
  EXPECT_EQ(solve(build_sdr_program(testing::scalar_instance(1.6))).status, SolveStatus::PrimalInfeasible);
}

TEST(Run, PegaReachesTheDirectOptimum) {
  const NetworkInstance inst = *testing::loose_instance(0);
  const double pstar = solve_direct(inst);
  OptimizerSettings s;
  const OutcomeReport r = run(inst, s, Algorithm::Pega);
  ASSERT_EQ(r.termination, Termination::Converged);
  EXPECT_GT(r.iterations, 0);
  EXPECT_LE(std::abs(r.f - pstar), 10.0 * s.eps_out);
  EXPECT_GT(r.mu(0), 0.0);
  EXPECT_EQ(static_cast<int>(r.trace.size()), r.iterations + 1);
  EXPECT_GE(r.mu.minCoeff(), 0.0);
  // weak duality at every evaluated point, trial steps included
  for (double f : r.evaluated_values) EXPECT_LE(f, pstar + 1e-6);
  // complementary slackness
  for (int m = 0; m < inst.num_bs; ++m) {
    const double budget = inst.power_budgets[static_cast<std::size_t>(m)];
    EXPECT_LE(r.mu(m) * (budget - antenna_power(inst, r.design, m)), 1e-3 * budget);
  }
}

TEST(Run, GllReferenceValueIsNondecreasing) {
  const NetworkInstance inst = *testing::loose_instance(9);
  OptimizerSettings s;
  s.window = 3;
  const OutcomeReport r = run(inst, s, Algorithm::Pega);
  double prev = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    double ref = std::numeric_limits<double>::infinity();
    for (std::size_t j = i + 1 >= 3 ? i + 1 - 3 : 0; j <= i; ++j) ref = std::min(ref, r.trace[j].f);
    EXPECT_GE(ref, prev - 1e-12);
    prev = ref;
  }
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    EXPECT_GT(r.trace[i].lambda, 0.0);
    EXPECT_LE(r.trace[i].lambda, 1.0);
    EXPECT_GE(r.trace[i].cumulative_seconds, r.trace[i - 1].cumulative_seconds);
  }
}

TEST(Run, PigaAgreesWithPegaAndWarmStarts) {
  const NetworkInstance inst = *testing::loose_instance(6);
  const OutcomeReport pega = run(inst, {}, Algorithm::Pega);
  const OutcomeReport piga = run(inst, {}, Algorithm::Piga);
  ASSERT_EQ(piga.termination, Termination::Converged);
  EXPECT_LE(testing::relative_gap(piga.f, pega.f), 1e-3);
  EXPECT_GT(piga.inner_iterations, 0);
}

TEST(Run, PsgaUsesDiminishingSteps) {
  const NetworkInstance inst = testing::reference_small_instance(4);
  const OptimizerSettings s;
  const OutcomeReport r = run(inst, s, Algorithm::Psga);
  ASSERT_EQ(r.termination, Termination::Converged);
  const double pstar = solve_direct(inst);
  EXPECT_LE(testing::relative_gap(r.f, pstar), 1e-3);
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    EXPECT_DOUBLE_EQ(r.trace[i].alpha, 300.0 * std::pow(static_cast<double>(i), -0.1));
    EXPECT_DOUBLE_EQ(r.trace[i].lambda, 1.0);
  }
}

TEST(Run, IterationLimit) {
  OptimizerSettings s;
  s.max_outer = 1;
  s.eps_out = 1e-9;
  const OutcomeReport r = run(*testing::loose_instance(0), s, Algorithm::Pega);
  EXPECT_EQ(r.termination, Termination::MaxIterations);
  EXPECT_EQ(r.iterations, 1);
  EXPECT_EQ(r.trace.size(), 2u);
}

TEST(Run, LineSearchFailureIsDiagnosed) {
  OptimizerSettings s;
  s.alpha0 = 1e8;
  s.max_backtracks = 1;
  const OutcomeReport r = run(*testing::loose_instance(0), s, Algorithm::Pega);
  EXPECT_EQ(r.termination, Termination::LineSearchFailed);
  EXPECT_FALSE(r.message.empty());
}

TEST(Run, InfeasibleInstanceThrows) {
  NetworkInstance inst = testing::scalar_instance();
  inst.sinr_targets = {50.0};
  inst.fronthaul_caps = {0.1};
  EXPECT_THROW(run(inst, {}, Algorithm::Pega), InfeasibleError);
}

TEST(Run, RejectsBadStart) {
  OptimizerSettings s;
  s.mu0 = vec({-1.0});
  EXPECT_THROW(run(testing::scalar_instance(), s, Algorithm::Pega), InputError);
}

TEST(Run, Deterministic) {
  const NetworkInstance inst = *testing::loose_instance(2);
  for (Algorithm a : {Algorithm::Pega, Algorithm::Piga}) {
    const OutcomeReport x = run(inst, {}, a);
    const OutcomeReport y = run(inst, {}, a);
    EXPECT_EQ(x.mu, y.mu);
    EXPECT_EQ(x.f, y.f);
    EXPECT_EQ(x.iterations, y.iterations);
    EXPECT_EQ(x.inner_iterations, y.inner_iterations);
  }
}

}  // namespace
}  // namespace jbcp
