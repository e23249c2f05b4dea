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

// Rank-one beamformer recovery from a relaxation solution and end-to-end
// certification against the original constraints.

#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "jbcp/errors.hpp"
#include "jbcp/hermitian.hpp"
#include "jbcp/network.hpp"

namespace jbcp {

struct TightnessDiagnostics {
  std::vector<double> eigen_ratio;           // lambda_2 / lambda_1 per user
  std::vector<double> extraction_residual;   // ||V_k - v_k v_k^H||_F / ||V_k||_F
  std::vector<double> discarded_mass;        // sum_{j >= 2} lambda_j per user

  double max_ratio() const {
    double r = 0.0;
    for (double x : eigen_ratio) r = std::max(r, x);
    return r;
  }
  bool tight(double threshold = 1e-4) const { return max_ratio() <= threshold; }
};

/// Principal-eigenvector extraction v_k = sqrt(lambda_1) u_1, with the phase
/// fixed so that h_k^H v_k is real and nonnegative. If h_k^H v_k vanishes the
/// first nonzero entry of v_k is made real positive instead.
inline std::pair<BeamformingDesign, TightnessDiagnostics> extract_beamformers(
    const NetworkInstance& inst, const CovarianceDesign& design) {
  detail::check_dims(inst, design);
  BeamformingDesign out;
  out.compression_cov = design.compression_cov;
  TightnessDiagnostics diag;
  for (int k = 0; k < inst.num_users; ++k) {
    const CMatrix& V = design.covariances[static_cast<std::size_t>(k)];
    const Eigh e = eigh(hermitian_part(V));
    const double l1 = e.values(0);
    if (!(l1 > 0.0)) {
      throw SolverError("user " + std::to_string(k) + " has a zero covariance; its SINR target is unreachable");
    }
    CVector v = std::sqrt(l1) * e.vectors.col(0);

    const CVector& h = inst.channels[static_cast<std::size_t>(k)];
    const Complex hv = h.dot(v);
    Complex anchor = hv;
    if (std::abs(hv) <= 1e-14 * h.norm() * v.norm()) {
      anchor = Complex(0.0, 0.0);
      for (std::ptrdiff_t i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) > 1e-14 * v.norm()) {
          anchor = v(i);
          break;
        }
      }
    }
    if (std::abs(anchor) > 0.0) v *= std::conj(anchor) / std::abs(anchor);

    const double l2 = e.values.size() > 1 ? std::max(0.0, e.values(1)) : 0.0;
    double rest = 0.0;
    for (std::ptrdiff_t j = 1; j < e.values.size(); ++j) rest += std::max(0.0, e.values(j));
    diag.eigen_ratio.push_back(l2 / l1);
    diag.discarded_mass.push_back(rest);
    const double vn = V.norm();
    diag.extraction_residual.push_back(vn > 0.0 ? (V - v * v.adjoint()).norm() / vn : 0.0);
    out.beamformers.push_back(std::move(v));
  }
  return {std::move(out), std::move(diag)};
}

struct Certificate {
  FeasibilityReport report;
  double objective = 0.0;  // sum_k ||v_k||^2 + tr(Q)
  std::optional<double> reference_objective;
  double relative_gap = 0.0;  // |objective - reference| / max(1, |reference|)
};

/// Re-evaluates every constraint on the beamformers and, when a reference
/// (relaxation) objective is supplied, the objective gap to it.
inline Certificate certify(const NetworkInstance& inst, const BeamformingDesign& design, double tol,
                           std::optional<double> reference_objective = std::nullopt) {
  Certificate c;
  c.report = check_feasibility(inst, design, tol);
  c.objective = total_power(design);
  c.reference_objective = reference_objective;
  if (reference_objective) {
    c.relative_gap = std::abs(c.objective - *reference_objective) /
                     std::max(1.0, std::abs(*reference_objective));
  }
  return c;
}

}  // namespace jbcp
