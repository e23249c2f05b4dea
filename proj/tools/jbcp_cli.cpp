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

// Command-line front end: solve, sweep, check, dump-cone, generate.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "jbcp/jbcp.hpp"

namespace fs = std::filesystem;
using jbcp::io::json;

namespace {

jbcp::OptimizerSettings load_optimizer(const std::string& config_path) {
  if (config_path.empty()) return jbcp::paper_config().optimizer;
  const json j = jbcp::io::read_json_file(config_path);
  const json& src = j.contains("optimizer") ? j.at("optimizer") : j;
  return jbcp::optimizer_from_json(src, jbcp::paper_config().optimizer);
}

int cmd_solve(const std::string& instance_path, const std::string& algo, const std::string& config_path,
              double eps_out, int max_outer, const std::string& out_dir) {
  const jbcp::NetworkInstance inst = jbcp::io::instance_from_json(jbcp::io::read_json_file(instance_path));
  jbcp::OptimizerSettings opt = load_optimizer(config_path);
  if (eps_out > 0.0) opt.eps_out = eps_out;
  if (max_outer > 0) opt.max_outer = max_outer;

  jbcp::AlgorithmRun r;
  if (algo == "sdr") {
    r = jbcp::run_direct(inst, opt.exact_tolerance);
  } else {
    const jbcp::Algorithm a = algo == "pega" ? jbcp::Algorithm::Pega
                              : algo == "piga" ? jbcp::Algorithm::Piga
                                               : jbcp::Algorithm::Psga;
    r = jbcp::run_dual(inst, opt, a);
  }

  fs::create_directories(out_dir);
  json res = jbcp::to_json(r.record);
  if (r.has_design) {
    const auto diag = jbcp::extract_beamformers(inst, r.design).second;
    res["tightness_ratios"] = diag.eigen_ratio;
    res["multipliers"] = jbcp::io::rvector_to_json(r.multipliers);
    res["feasibility"] = jbcp::io::to_json(jbcp::check_feasibility(inst, r.beamformers, 1e-4));
    jbcp::io::write_json_file((fs::path(out_dir) / "design.json").string(),
                              json{{"beamforming", jbcp::io::to_json(r.beamformers)},
                                   {"covariance", jbcp::io::to_json(r.design)}});
  }
  jbcp::io::write_json_file((fs::path(out_dir) / "result.json").string(), res);
  if (!r.record.trace.empty()) {
    std::ofstream f(fs::path(out_dir) / "trace.csv");
    jbcp::io::write_trace_csv(f, r.record.trace);
  }
  std::cout << algo << ": status " << r.record.status << ", objective " << r.record.objective
            << ", outer " << r.record.outer_iterations << ", inner " << r.record.inner_iterations
            << ", " << r.record.wall_seconds << " s\n";
  return r.record.status == "ok" ? 0 : 2;
}

int cmd_sweep(const std::string& config_path, std::string out_dir, int workers, long long seed,
              double eps_out, int max_outer, int runs) {
  jbcp::ExperimentConfig cfg = config_path.empty()
                                   ? jbcp::paper_config()
                                   : jbcp::config_from_json(jbcp::io::read_json_file(config_path));
  if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
  if (eps_out > 0.0) cfg.optimizer.eps_out = eps_out;
  if (max_outer > 0) cfg.optimizer.max_outer = max_outer;
  if (runs > 0) cfg.runs = runs;
  if (out_dir.empty()) out_dir = cfg.output_dir.empty() ? "sweep_out" : cfg.output_dir;
  if (workers <= 0) {
    const char* env = std::getenv("JBCP_WORKERS");
    workers = env ? std::max(1, std::atoi(env)) : 1;
  }
  const jbcp::SweepResult res = jbcp::run_sweep(cfg, workers);
  jbcp::write_sweep(out_dir, cfg, res);
  jbcp::write_aggregates_csv(std::cout, res.aggregates);
  return 0;
}

int cmd_check(const std::string& instance_path, const std::string& design_path, double tol) {
  const jbcp::NetworkInstance inst = jbcp::io::instance_from_json(jbcp::io::read_json_file(instance_path));
  json d = jbcp::io::read_json_file(design_path);
  if (d.contains("beamforming")) d = d.at("beamforming");
  const jbcp::BeamformingDesign design = jbcp::io::beamforming_from_json(d);
  const jbcp::Certificate c = jbcp::certify(inst, design, tol);
  json out = jbcp::io::to_json(c.report);
  out["objective"] = c.objective;
  std::cout << out.dump(2) << '\n';
  return c.report.feasible ? 0 : 1;
}

int cmd_dump(const std::string& instance_path, const std::vector<double>& mu, const std::string& out) {
  const jbcp::NetworkInstance inst = jbcp::io::instance_from_json(jbcp::io::read_json_file(instance_path));
  jbcp::ConeProgram p;
  if (mu.empty()) {
    p = jbcp::build_sdr_program(inst);
  } else {
    p = jbcp::build_inner_program(inst, Eigen::Map<const jbcp::RVector>(mu.data(), static_cast<Eigen::Index>(mu.size())));
  }
  const json j = jbcp::io::to_json(p);
  if (out.empty() || out == "-") {
    std::cout << j.dump() << '\n';
  } else {
    jbcp::io::write_json_file(out, j);
  }
  return 0;
}

int cmd_generate(const std::string& config_path, long long seed, double gamma, const std::string& out) {
  jbcp::ExperimentConfig cfg = config_path.empty()
                                   ? jbcp::paper_config()
                                   : jbcp::config_from_json(jbcp::io::read_json_file(config_path));
  const std::uint64_t s = seed >= 0 ? static_cast<std::uint64_t>(seed) : cfg.seed;
  const double g = gamma > 0.0 ? gamma : cfg.gammas.front();
  const json j = jbcp::io::to_json(jbcp::generate_instance(s, cfg, g));
  if (out.empty() || out == "-") {
    std::cout << j.dump(2) << '\n';
  } else {
    jbcp::io::write_json_file(out, j);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint beamforming and fronthaul compression under per-antenna power limits"};
  app.require_subcommand(1);

  std::string instance, algo = "pega", config, out = "out", design;
  double eps_out = 0.0, tol = 1e-6, gamma = 0.0;
  int max_outer = 0, workers = 0, runs = 0;
  long long seed = -1;
  std::vector<double> mu;

  auto* solve = app.add_subcommand("solve", "Solve one instance");
  solve->add_option("instance", instance, "Instance JSON")->required()->check(CLI::ExistingFile);
  solve->add_option("--algo", algo, "pega, piga, psga or sdr")
      ->check(CLI::IsMember({"pega", "piga", "psga", "sdr"}));
  solve->add_option("--config", config, "Config JSON with optimizer settings");
  solve->add_option("--eps-out", eps_out, "Outer termination tolerance");
  solve->add_option("--max-outer", max_outer, "Outer iteration limit");
  solve->add_option("--out", out, "Output directory");

  auto* sweep = app.add_subcommand("sweep", "Monte-Carlo sweep");
  sweep->add_option("--config", config, "Experiment config JSON");
  sweep->add_option("--out", out, "Output directory");
  sweep->add_option("--workers", workers, "Worker threads (default $JBCP_WORKERS or 1)");
  sweep->add_option("--seed", seed, "Base seed");
  sweep->add_option("--runs", runs, "Runs per gamma");
  sweep->add_option("--eps-out", eps_out, "Outer termination tolerance");
  sweep->add_option("--max-outer", max_outer, "Outer iteration limit");

  auto* check = app.add_subcommand("check", "Check a beamforming design; exit 1 when infeasible");
  check->add_option("instance", instance, "Instance JSON")->required()->check(CLI::ExistingFile);
  check->add_option("design", design, "Design JSON")->required()->check(CLI::ExistingFile);
  check->add_option("--tol", tol, "Feasibility tolerance");

  auto* dump = app.add_subcommand("dump-cone", "Write the cone program as JSON");
  dump->add_option("instance", instance, "Instance JSON")->required()->check(CLI::ExistingFile);
  dump->add_option("--mu", mu, "Multipliers; builds the inner problem instead of the relaxation");
  dump->add_option("--out", out, "Output file or -");

  auto* gen = app.add_subcommand("generate", "Draw a random instance");
  gen->add_option("--config", config, "Experiment config JSON");
  gen->add_option("--seed", seed, "Seed");
  gen->add_option("--gamma", gamma, "SINR target");
  gen->add_option("--out", out, "Output file or -");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) return cmd_solve(instance, algo, config, eps_out, max_outer, out);
    if (*sweep) return cmd_sweep(config, sweep->count("--out") ? out : "", workers, seed, eps_out, max_outer, runs);
    if (*check) return cmd_check(instance, design, tol);
    if (*dump) return cmd_dump(instance, mu, dump->count("--out") ? out : "-");
    if (*gen) return cmd_generate(config, seed, gamma, gen->count("--out") ? out : "-");
  } catch (const jbcp::InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
  return 0;
}
