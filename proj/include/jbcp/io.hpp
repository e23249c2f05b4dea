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

// JSON and CSV serialization. Complex numbers are written as [re, im] pairs,
// matrices as arrays of rows.

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "jbcp/cone_program.hpp"
#include "jbcp/dual.hpp"
#include "jbcp/errors.hpp"
#include "jbcp/network.hpp"

namespace jbcp::io {

using json = nlohmann::json;

inline json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) throw InputError("expected a complex number as [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline json vector_to_json(const CVector& v) {
  json a = json::array();
  for (std::ptrdiff_t i = 0; i < v.size(); ++i) a.push_back(complex_to_json(v(i)));
  return a;
}

inline CVector vector_from_json(const json& j) {
  if (!j.is_array()) throw InputError("expected an array of complex numbers");
  CVector v(static_cast<std::ptrdiff_t>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<std::ptrdiff_t>(i)) = complex_from_json(j[i]);
  return v;
}

inline json matrix_to_json(const CMatrix& m) {
  json rows = json::array();
  for (std::ptrdiff_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::ptrdiff_t c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline CMatrix matrix_from_json(const json& j) {
  if (!j.is_array()) throw InputError("expected a matrix as an array of rows");
  const auto n = static_cast<std::ptrdiff_t>(j.size());
  CMatrix m(n, n);
  for (std::ptrdiff_t r = 0; r < n; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<std::ptrdiff_t>(row.size()) != n) {
      throw InputError("matrix must be square");
    }
    for (std::ptrdiff_t c = 0; c < n; ++c) m(r, c) = complex_from_json(row[static_cast<std::size_t>(c)]);
  }
  return m;
}

inline json rvector_to_json(const RVector& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

inline RVector rvector_from_json(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const RVector>(v.data(), static_cast<std::ptrdiff_t>(v.size()));
}

// ---- instance -------------------------------------------------------------

inline json to_json(const NetworkInstance& inst) {
  json j;
  j["M"] = inst.num_bs;
  j["K"] = inst.num_users;
  json ch = json::array();
  for (const auto& h : inst.channels) ch.push_back(vector_to_json(h));
  j["channels"] = std::move(ch);
  j["noise_powers"] = inst.noise_powers;
  j["sinr_targets"] = inst.sinr_targets;
  j["fronthaul_caps"] = inst.fronthaul_caps;
  j["power_budgets"] = inst.power_budgets;
  return j;
}

inline NetworkInstance instance_from_json(const json& j) {
  try {
    NetworkInstance inst;
    inst.num_bs = j.at("M").get<int>();
    inst.num_users = j.at("K").get<int>();
    for (const auto& h : j.at("channels")) inst.channels.push_back(vector_from_json(h));
    inst.noise_powers = j.at("noise_powers").get<std::vector<double>>();
    inst.sinr_targets = j.at("sinr_targets").get<std::vector<double>>();
    inst.fronthaul_caps = j.at("fronthaul_caps").get<std::vector<double>>();
    inst.power_budgets = j.at("power_budgets").get<std::vector<double>>();
    inst.validate();
    return inst;
  } catch (const json::exception& e) {
    throw InputError(std::string("instance JSON: ") + e.what());
  }
}

// ---- designs ----------------------------------------------------------------

inline json to_json(const BeamformingDesign& d) {
  json j;
  json bf = json::array();
  for (const auto& v : d.beamformers) bf.push_back(vector_to_json(v));
  j["beamformers"] = std::move(bf);
  j["compression_cov"] = matrix_to_json(d.compression_cov);
  return j;
}

inline BeamformingDesign beamforming_from_json(const json& j) {
  try {
    BeamformingDesign d;
    for (const auto& v : j.at("beamformers")) d.beamformers.push_back(vector_from_json(v));
    d.compression_cov = matrix_from_json(j.at("compression_cov"));
    return d;
  } catch (const json::exception& e) {
    throw InputError(std::string("design JSON: ") + e.what());
  }
}

inline json to_json(const CovarianceDesign& d) {
  json j;
  json cv = json::array();
  for (const auto& v : d.covariances) cv.push_back(matrix_to_json(v));
  j["covariances"] = std::move(cv);
  j["compression_cov"] = matrix_to_json(d.compression_cov);
  return j;
}

inline CovarianceDesign covariance_from_json(const json& j) {
  try {
    CovarianceDesign d;
    for (const auto& v : j.at("covariances")) d.covariances.push_back(matrix_from_json(v));
    d.compression_cov = matrix_from_json(j.at("compression_cov"));
    return d;
  } catch (const json::exception& e) {
    throw InputError(std::string("design JSON: ") + e.what());
  }
}

inline json to_json(const FeasibilityReport& r) {
  return json{{"sinr_slack", r.sinr_slack},
              {"fronthaul_slack", r.fronthaul_slack},
              {"power_slack", r.power_slack},
              {"tolerance", r.tolerance},
              {"feasible", r.feasible}};
}

// ---- cone program -------------------------------------------------------------
//
// {"num_vars": n, "c": [...], "b": [...],
//  "A": {"rows": r, "cols": n, "triplets": [[row, col, value], ...]},
//  "cones": [{"kind": "nonneg", "size": s, "label": ..., "row_scale": ...},
//            {"kind": "psd", "order": n, "complex": true, "label": ..., "row_scale": ...}],
//  "vec_layout": "..."}

inline constexpr const char* kVecLayout =
    "psd blocks: diagonal entries first, then strictly-lower entries (i>j) in column-major order; "
    "complex blocks store sqrt2*Re, sqrt2*Im per entry, real blocks sqrt2*value; s = b - A x";

inline json to_json(const ConeProgram& p) {
  json j;
  j["num_vars"] = p.num_vars;
  j["c"] = rvector_to_json(p.c);
  j["b"] = rvector_to_json(p.b);
  json trip = json::array();
  for (int col = 0; col < p.A.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(p.A, col); it; ++it) {
      trip.push_back(json::array({it.row(), it.col(), it.value()}));
    }
  }
  j["A"] = {{"rows", p.A.rows()}, {"cols", p.A.cols()}, {"triplets", std::move(trip)}};
  json cones = json::array();
  for (const auto& blk : p.cones) {
    json cj;
    if (blk.kind == ConeKind::NonNegative) {
      cj = {{"kind", "nonneg"}, {"size", blk.size}};
    } else {
      cj = {{"kind", "psd"}, {"order", blk.size}, {"complex", blk.complex}};
    }
    cj["label"] = blk.label;
    cj["row_scale"] = blk.row_scale;
    cones.push_back(std::move(cj));
  }
  j["cones"] = std::move(cones);
  j["vec_layout"] = kVecLayout;
  return j;
}

inline ConeProgram cone_program_from_json(const json& j) {
  try {
    ConeProgram p;
    p.num_vars = j.at("num_vars").get<int>();
    p.c = rvector_from_json(j.at("c"));
    p.b = rvector_from_json(j.at("b"));
    const json& a = j.at("A");
    p.A.resize(a.at("rows").get<std::ptrdiff_t>(), a.at("cols").get<std::ptrdiff_t>());
    std::vector<Eigen::Triplet<double>> t;
    for (const auto& e : a.at("triplets")) t.emplace_back(e[0].get<int>(), e[1].get<int>(), e[2].get<double>());
    p.A.setFromTriplets(t.begin(), t.end());
    for (const auto& cj : j.at("cones")) {
      ConeBlock blk;
      if (cj.at("kind") == "nonneg") {
        blk = ConeBlock::nonnegative(cj.at("size").get<int>(), cj.value("label", ""));
      } else if (cj.at("kind") == "psd") {
        blk = ConeBlock::psd(cj.at("order").get<int>(), cj.value("complex", true), cj.value("label", ""));
      } else {
        throw InputError("unknown cone kind");
      }
      blk.row_scale = cj.value("row_scale", 1.0);
      p.cones.push_back(std::move(blk));
    }
    p.validate();
    return p;
  } catch (const json::exception& e) {
    throw InputError(std::string("cone program JSON: ") + e.what());
  }
}

// ---- optimizer output ---------------------------------------------------------

inline void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace) {
  os << "iteration,f,projected_residual,lambda,alpha,inner_iterations,cumulative_seconds\n";
  os << std::setprecision(17);
  for (const auto& r : trace) {
    os << r.iteration << ',' << r.f << ',' << r.projected_residual << ',' << r.lambda << ','
       << r.alpha << ',' << r.inner_iterations << ',' << r.cumulative_seconds << '\n';
  }
}

inline json to_json(const OutcomeReport& r) {
  json j;
  j["algorithm"] = to_string(r.algorithm);
  j["termination"] = to_string(r.termination);
  if (!r.message.empty()) j["message"] = r.message;
  j["mu"] = rvector_to_json(r.mu);
  j["f"] = r.f;
  j["gradient"] = rvector_to_json(r.g);
  j["iterations"] = r.iterations;
  j["inner_iterations"] = r.inner_iterations;
  j["evaluations"] = r.evaluations;
  j["seconds"] = r.seconds;
  return j;
}

// ---- files -----------------------------------------------------------------------

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
}

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << std::setw(2) << j << '\n';
}

}  // namespace jbcp::io
