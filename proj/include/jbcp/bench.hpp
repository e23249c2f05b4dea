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

// Experiment harness: random Rayleigh instances, the reference parameter
// set, and Monte-Carlo sweeps comparing the dual ascent schemes against a
// direct solve of the relaxation.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "jbcp/conic_solver.hpp"
#include "jbcp/dual.hpp"
#include "jbcp/errors.hpp"
#include "jbcp/io.hpp"
#include "jbcp/network.hpp"
#include "jbcp/recovery.hpp"
#include "jbcp/sdr.hpp"

namespace jbcp {

struct ExperimentConfig {
  int num_bs = 8;
  int num_users = 10;
  std::uint64_t seed = 1;
  std::vector<double> gammas{0.03, 0.04, 0.05, 0.06};
  std::vector<double> fronthaul_caps;
  std::vector<double> noise_powers;
  std::vector<double> power_budgets;
  std::vector<std::string> algorithms{"pega", "piga", "psga", "sdr"};
  OptimizerSettings optimizer;
  int runs = 200;
  std::string output_dir;
  double feasibility_tolerance = 1e-4;  // verdict on the recovered beamformers
  double tight_solve_tolerance = 1e-8;  // direct relaxation solve

  void validate() const {
    if (num_bs <= 0 || num_users <= 0) throw InputError("config: M and K must be positive");
    if (gammas.empty()) throw InputError("config: gamma sweep is empty");
    if (runs <= 0) throw InputError("config: run count must be positive");
    if (static_cast<int>(fronthaul_caps.size()) != num_bs ||
        static_cast<int>(power_budgets.size()) != num_bs) {
      throw InputError("config: per-BS arrays must have length M");
    }
    if (static_cast<int>(noise_powers.size()) != num_users) {
      throw InputError("config: noise powers must have length K");
    }
    for (const auto& a : algorithms) {
      if (a != "pega" && a != "piga" && a != "psga" && a != "sdr") {
        throw InputError("config: unknown algorithm " + a);
      }
    }
    for (double g : gammas) {
      if (!(g > 0.0)) throw InputError("config: SINR targets must be positive");
    }
    optimizer.validate();
  }
};

namespace detail {

inline std::vector<double> paper_budgets(int M) {
  std::vector<double> p(static_cast<std::size_t>(M), 8.5);
  p[0] = 8.5e-3;
  return p;
}

}  // namespace detail

/// Parameters of the reference experiment: M = 8 BSs, K = 10 users,
/// C_m = log2(1.1), unit noise, budgets 8.5 with antenna 1 at 8.5e-3,
/// 200 Monte-Carlo runs over gamma in {0.03, ..., 0.06}.
inline ExperimentConfig paper_config() {
  ExperimentConfig c;
  c.num_bs = 8;
  c.num_users = 10;
  c.fronthaul_caps.assign(8, std::log2(1.1));
  c.noise_powers.assign(10, 1.0);
  c.power_budgets = detail::paper_budgets(8);
  c.optimizer = OptimizerSettings{};
  c.optimizer.window = 10;
  c.optimizer.theta = 1e-4;
  c.optimizer.rho = 0.25;
  c.optimizer.alpha0 = 300.0;
  c.optimizer.alpha_min = 1e-4;
  c.optimizer.alpha_max = 1e12;
  c.optimizer.schedule_scale = 1e-3;
  c.optimizer.schedule_exponent = 2.0;
  c.optimizer.psga_exponent = 0.1;
  c.optimizer.eps_out = 1e-3;
  c.runs = 200;
  return c;
}

/// Channels h_{k,m} ~ CN(0, 1): independent real and imaginary parts of
/// variance 1/2, drawn user by user from a generator seeded with `seed`.
inline NetworkInstance generate_instance(std::uint64_t seed, const ExperimentConfig& config,
                                         double gamma) {
  NetworkInstance inst;
  inst.num_bs = config.num_bs;
  inst.num_users = config.num_users;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  for (int k = 0; k < inst.num_users; ++k) {
    CVector h(inst.num_bs);
    for (int m = 0; m < inst.num_bs; ++m) {
      const double re = normal(rng);
      const double im = normal(rng);
      h(m) = Complex(re, im);
    }
    inst.channels.push_back(std::move(h));
  }
  inst.noise_powers = config.noise_powers;
  inst.sinr_targets.assign(static_cast<std::size_t>(inst.num_users), gamma);
  inst.fronthaul_caps = config.fronthaul_caps;
  inst.power_budgets = config.power_budgets;
  inst.validate();
  return inst;
}

inline std::uint64_t instance_seed(const ExperimentConfig& config, int run) {
  return config.seed + static_cast<std::uint64_t>(run);
}

// ---------------------------------------------------------------------------
// Config (de)serialization. Missing fields keep the reference values; per-BS
// and per-user arrays may be given as a single number.
// ---------------------------------------------------------------------------

inline OptimizerSettings optimizer_from_json(const io::json& j, OptimizerSettings s) {
  s.eps_out = j.value("eps_out", s.eps_out);
  s.window = j.value("N", s.window);
  s.theta = j.value("theta", s.theta);
  s.rho = j.value("rho", s.rho);
  s.alpha0 = j.value("alpha0", s.alpha0);
  s.alpha_min = j.value("alpha_min", s.alpha_min);
  s.alpha_max = j.value("alpha_max", s.alpha_max);
  s.exact_tolerance = j.value("exact_tolerance", s.exact_tolerance);
  s.schedule_scale = j.value("schedule_scale", s.schedule_scale);
  s.schedule_exponent = j.value("schedule_exponent", s.schedule_exponent);
  s.psga_exponent = j.value("psga_exponent", s.psga_exponent);
  s.max_outer = j.value("max_outer", s.max_outer);
  s.max_backtracks = j.value("max_backtracks", s.max_backtracks);
  s.inner_max_iterations = j.value("inner_max_iterations", s.inner_max_iterations);
  s.piga_warm_start = j.value("piga_warm_start", s.piga_warm_start);
  s.warm_start_weight = j.value("warm_start_weight", s.warm_start_weight);
  s.mu_cap = j.value("mu_cap", s.mu_cap);
  return s;
}

inline io::json optimizer_to_json(const OptimizerSettings& s) {
  return io::json{{"eps_out", s.eps_out},
                  {"N", s.window},
                  {"theta", s.theta},
                  {"rho", s.rho},
                  {"alpha0", s.alpha0},
                  {"alpha_min", s.alpha_min},
                  {"alpha_max", s.alpha_max},
                  {"exact_tolerance", s.exact_tolerance},
                  {"schedule_scale", s.schedule_scale},
                  {"schedule_exponent", s.schedule_exponent},
                  {"psga_exponent", s.psga_exponent},
                  {"max_outer", s.max_outer},
                  {"max_backtracks", s.max_backtracks},
                  {"inner_max_iterations", s.inner_max_iterations},
                  {"piga_warm_start", s.piga_warm_start},
                  {"warm_start_weight", s.warm_start_weight},
                  {"mu_cap", s.mu_cap}};
}

inline ExperimentConfig config_from_json(const io::json& j) {
  try {
    ExperimentConfig c = paper_config();
    c.num_bs = j.value("M", c.num_bs);
    c.num_users = j.value("K", c.num_users);
    c.seed = j.value("seed", c.seed);
    if (j.contains("gammas")) c.gammas = j.at("gammas").get<std::vector<double>>();
    auto per = [&](const char* key, std::vector<double>& dst, int n, std::vector<double> fallback) {
      if (!j.contains(key)) {
        dst = static_cast<int>(dst.size()) == n ? dst : std::move(fallback);
        return;
      }
      const auto& v = j.at(key);
      dst = v.is_number() ? std::vector<double>(static_cast<std::size_t>(n), v.get<double>())
                          : v.get<std::vector<double>>();
    };
    per("fronthaul_caps", c.fronthaul_caps, c.num_bs,
        std::vector<double>(static_cast<std::size_t>(c.num_bs), std::log2(1.1)));
    per("noise_powers", c.noise_powers, c.num_users,
        std::vector<double>(static_cast<std::size_t>(c.num_users), 1.0));
    per("power_budgets", c.power_budgets, c.num_bs, detail::paper_budgets(c.num_bs));
    if (j.contains("algorithms")) c.algorithms = j.at("algorithms").get<std::vector<std::string>>();
    if (j.contains("optimizer")) c.optimizer = optimizer_from_json(j.at("optimizer"), c.optimizer);
    c.runs = j.value("runs", c.runs);
    c.output_dir = j.value("output_dir", c.output_dir);
    c.feasibility_tolerance = j.value("feasibility_tolerance", c.feasibility_tolerance);
    c.tight_solve_tolerance = j.value("tight_solve_tolerance", c.tight_solve_tolerance);
    c.validate();
    return c;
  } catch (const io::json::exception& e) {
    throw InputError(std::string("config JSON: ") + e.what());
  }
}

inline io::json to_json(const ExperimentConfig& c) {
  return io::json{{"M", c.num_bs},
                  {"K", c.num_users},
                  {"seed", c.seed},
                  {"gammas", c.gammas},
                  {"fronthaul_caps", c.fronthaul_caps},
                  {"noise_powers", c.noise_powers},
                  {"power_budgets", c.power_budgets},
                  {"algorithms", c.algorithms},
                  {"optimizer", optimizer_to_json(c.optimizer)},
                  {"runs", c.runs},
                  {"output_dir", c.output_dir},
                  {"feasibility_tolerance", c.feasibility_tolerance},
                  {"tight_solve_tolerance", c.tight_solve_tolerance}};
}

// ---------------------------------------------------------------------------
// Single runs
// ---------------------------------------------------------------------------

struct ResultRecord {
  int instance_id = 0;
  std::string algorithm;
  double gamma = 0.0;
  double objective = std::numeric_limits<double>::quiet_NaN();  // f(mu) for the dual schemes
  double primal_power = std::numeric_limits<double>::quiet_NaN();  // total power of the returned design
  int outer_iterations = 0;
  long inner_iterations = 0;
  double wall_seconds = 0.0;
  bool feasible = false;
  double tightness_ratio = std::numeric_limits<double>::quiet_NaN();
  std::vector<int> active_papc;  // 0-based antenna indices
  std::string status = "ok";     // ok | infeasible | dual-unbounded | failed: ...
  std::string termination;
  std::vector<TraceRow> trace;
};

/// Outcome of one algorithm on one instance, before it is turned into a record.
struct AlgorithmRun {
  ResultRecord record;
  CovarianceDesign design;
  BeamformingDesign beamformers;
  RVector multipliers;
  bool has_design = false;
};

namespace detail {

inline std::vector<int> active_set(const RVector& multipliers) {
  std::vector<int> act;
  const double big = multipliers.size() ? multipliers.cwiseAbs().maxCoeff() : 0.0;
  for (std::ptrdiff_t m = 0; m < multipliers.size(); ++m) {
    if (multipliers(m) > 1e-6 * (1.0 + big)) act.push_back(static_cast<int>(m));
  }
  return act;
}

inline void finish_record(const NetworkInstance& inst, AlgorithmRun& run, double feas_tol) {
  auto [bf, diag] = extract_beamformers(inst, run.design);
  run.beamformers = std::move(bf);
  run.record.tightness_ratio = diag.max_ratio();
  run.record.primal_power = total_power(run.design);
  run.record.feasible = check_feasibility(inst, run.beamformers, feas_tol).feasible;
  run.record.active_papc = active_set(run.multipliers);
  run.has_design = true;
}

}  // namespace detail

/// Solves the full relaxation directly to a tight tolerance.
inline AlgorithmRun run_direct(const NetworkInstance& inst, double tolerance, double feas_tol = 1e-4) {
  AlgorithmRun out;
  out.record.algorithm = "sdr";
  const auto t0 = std::chrono::steady_clock::now();
  const ConeProgram p = build_sdr_program(inst);
  SolverSettings st;
  st.tolerance = tolerance;
  const SolveResult r = solve(p, st);
  out.record.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.record.inner_iterations = r.iterations;
  out.record.outer_iterations = 1;
  out.record.termination = to_string(r.status);
  if (r.status == SolveStatus::PrimalInfeasible) {
    out.record.status = "infeasible";
    return out;
  }
  if (!r.optimal()) {
    out.record.status = std::string("failed: ") + to_string(r.status);
    return out;
  }
  const SolutionExtract ex = extract_solution(p, r);
  out.design = ex.design;
  out.record.objective = ex.objective_value;
  out.multipliers = RVector::Zero(inst.num_bs);
  for (int m = 0; m < inst.num_bs; ++m) {
    out.multipliers(m) = ex.dual(label_papc(m))->value(0, 0).real();
  }
  detail::finish_record(inst, out, feas_tol);
  return out;
}

inline AlgorithmRun run_dual(const NetworkInstance& inst, const OptimizerSettings& settings,
                             Algorithm algo, double feas_tol = 1e-4) {
  AlgorithmRun out;
  out.record.algorithm = to_string(algo);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    OutcomeReport rep = run(inst, settings, algo);
    out.record.wall_seconds = rep.seconds;
    out.record.outer_iterations = rep.iterations;
    out.record.inner_iterations = rep.inner_iterations;
    out.record.termination = to_string(rep.termination);
    out.record.trace = rep.trace;
    if (rep.termination == Termination::DualUnbounded) out.record.status = "dual-unbounded";
    if (rep.termination == Termination::LineSearchFailed) out.record.status = "failed: line search";
    out.design = std::move(rep.design);
    out.multipliers = rep.mu;
    out.record.objective = rep.f;
    detail::finish_record(inst, out, feas_tol);
  } catch (const InfeasibleError&) {
    out.record.status = "infeasible";
    out.record.termination = "inner-infeasible";
  } catch (const std::exception& e) {
    out.record.status = std::string("failed: ") + e.what();
  }
  if (out.record.wall_seconds == 0.0) {
    out.record.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  return out;
}

inline AlgorithmRun run_algorithm(const NetworkInstance& inst, const ExperimentConfig& config,
                                  const std::string& algo) {
  if (algo == "sdr") return run_direct(inst, config.tight_solve_tolerance, config.feasibility_tolerance);
  const Algorithm a = algo == "pega" ? Algorithm::Pega : algo == "piga" ? Algorithm::Piga : Algorithm::Psga;
  return run_dual(inst, config.optimizer, a, config.feasibility_tolerance);
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

struct AggregateRow {
  std::string algorithm;
  double gamma = 0.0;
  int instances = 0;   // records with status ok
  int attempted = 0;
  double mean_objective = std::numeric_limits<double>::quiet_NaN();
  double mean_seconds = std::numeric_limits<double>::quiet_NaN();
  double feasibility_rate = 0.0;  // ok / attempted
};

struct SweepResult {
  std::vector<ResultRecord> records;
  std::vector<AggregateRow> aggregates;
};

inline std::vector<AggregateRow> aggregate(const ExperimentConfig& config,
                                           const std::vector<ResultRecord>& records) {
  std::vector<AggregateRow> rows;
  for (const auto& algo : config.algorithms) {
    for (double g : config.gammas) {
      AggregateRow row;
      row.algorithm = algo;
      row.gamma = g;
      double obj = 0.0, sec = 0.0;
      for (const auto& r : records) {
        if (r.algorithm != algo || r.gamma != g) continue;
        ++row.attempted;
        if (r.status != "ok") continue;
        ++row.instances;
        obj += r.objective;
        sec += r.wall_seconds;
      }
      if (row.instances > 0) {
        row.mean_objective = obj / row.instances;
        row.mean_seconds = sec / row.instances;
      }
      row.feasibility_rate = row.attempted ? static_cast<double>(row.instances) / row.attempted : 0.0;
      rows.push_back(row);
    }
  }
  return rows;
}

/// Runs every requested algorithm on every (run, gamma) instance with
/// `workers` threads. Records come back in (run, gamma, algorithm) order
/// whatever the scheduling.
inline SweepResult run_sweep(const ExperimentConfig& config, int workers = 1) {
  config.validate();
  const int ng = static_cast<int>(config.gammas.size());
  const int tasks = config.runs * ng;
  const std::size_t per_task = config.algorithms.size();
  std::vector<ResultRecord> records(static_cast<std::size_t>(tasks) * per_task);

  std::atomic<int> next{0};
  auto worker = [&] {
    for (int t = next++; t < tasks; t = next++) {
      const int run_id = t / ng;
      const double gamma = config.gammas[static_cast<std::size_t>(t % ng)];
      NetworkInstance inst = generate_instance(instance_seed(config, run_id), config, gamma);
      for (std::size_t a = 0; a < per_task; ++a) {
        ResultRecord rec;
        try {
          rec = run_algorithm(inst, config, config.algorithms[a]).record;
        } catch (const std::exception& e) {
          rec.algorithm = config.algorithms[a];
          rec.status = std::string("failed: ") + e.what();
        }
        rec.instance_id = run_id;
        rec.gamma = gamma;
        records[static_cast<std::size_t>(t) * per_task + a] = std::move(rec);
      }
    }
  };
  const int nthreads = std::max(1, std::min(workers, tasks));
  std::vector<std::thread> pool;
  for (int i = 1; i < nthreads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  SweepResult out;
  out.records = std::move(records);
  out.aggregates = aggregate(config, out.records);
  return out;
}

// ---- output ----------------------------------------------------------------------

inline std::string join_indices(const std::vector<int>& v, char sep = ';') {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? std::string(1, sep) : "") << v[i];
  return os.str();
}

inline void write_records_csv(std::ostream& os, const std::vector<ResultRecord>& records) {
  os << "instance_id,algorithm,gamma,objective,primal_power,outer_iterations,inner_iterations,wall_seconds,"
        "feasible,tightness_ratio,active_papc,status\n";
  os << std::setprecision(12);
  for (const auto& r : records) {
    os << r.instance_id << ',' << r.algorithm << ',' << r.gamma << ',' << r.objective << ','
       << r.primal_power << ',' << r.outer_iterations << ',' << r.inner_iterations << ',' << r.wall_seconds << ','
       << (r.feasible ? 1 : 0) << ',' << r.tightness_ratio << ",\"" << join_indices(r.active_papc)
       << "\",\"" << r.status << "\"\n";
  }
}

inline void write_aggregates_csv(std::ostream& os, const std::vector<AggregateRow>& rows) {
  os << "algorithm,gamma,instances,attempted,mean_objective,mean_seconds,feasibility_rate\n";
  os << std::setprecision(12);
  for (const auto& r : rows) {
    os << r.algorithm << ',' << r.gamma << ',' << r.instances << ',' << r.attempted << ','
       << r.mean_objective << ',' << r.mean_seconds << ',' << r.feasibility_rate << '\n';
  }
}

inline io::json to_json(const ResultRecord& r) {
  auto num = [](double x) { return std::isfinite(x) ? io::json(x) : io::json(nullptr); };
  return io::json{{"instance_id", r.instance_id},
                  {"algorithm", r.algorithm},
                  {"gamma", r.gamma},
                  {"objective", num(r.objective)},
                  {"primal_power", num(r.primal_power)},
                  {"outer_iterations", r.outer_iterations},
                  {"inner_iterations", r.inner_iterations},
                  {"wall_seconds", r.wall_seconds},
                  {"feasible", r.feasible},
                  {"tightness_ratio", num(r.tightness_ratio)},
                  {"active_papc", r.active_papc},
                  {"status", r.status},
                  {"termination", r.termination}};
}

/// records.csv, records.json, aggregates.csv and one trace CSV per dual run.
inline void write_sweep(const std::string& dir, const ExperimentConfig& config, const SweepResult& res) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(dir) / "traces");
  {
    std::ofstream f(fs::path(dir) / "records.csv");
    write_records_csv(f, res.records);
  }
  {
    std::ofstream f(fs::path(dir) / "aggregates.csv");
    write_aggregates_csv(f, res.aggregates);
  }
  io::json recs = io::json::array();
  for (const auto& r : res.records) recs.push_back(to_json(r));
  io::write_json_file((fs::path(dir) / "records.json").string(),
                      io::json{{"config", to_json(config)}, {"records", std::move(recs)}});
  for (const auto& r : res.records) {
    if (r.trace.empty()) continue;
    std::ostringstream name;
    name << "inst" << r.instance_id << "_gamma" << r.gamma << '_' << r.algorithm << ".csv";
    std::ofstream f(fs::path(dir) / "traces" / name.str());
    io::write_trace_csv(f, r.trace);
  }
}

}  // namespace jbcp
