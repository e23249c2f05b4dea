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

// Problem data of the joint beamforming and compression problem, together
// with exact evaluators of the quantities it constrains: per-user SINR,
// per-BS fronthaul rate under multivariate compression (BS M compressed
// first, BS 1 last) and per-antenna transmit power.
//
// All indices are 0-based: user k in [0, K), base station m in [0, M).

#include <cmath>
#include <limits>
#include <string>
#include <type_traits>
#include <vector>

#include "jbcp/errors.hpp"
#include "jbcp/hermitian.hpp"

namespace jbcp {

struct NetworkInstance {
  int num_bs = 0;     // M, single-antenna base stations
  int num_users = 0;  // K, single-antenna users
  std::vector<CVector> channels;       // h_k in C^M; received signal is h_k^H x
  std::vector<double> noise_powers;    // sigma_k^2
  std::vector<double> sinr_targets;    // gamma_k
  std::vector<double> fronthaul_caps;  // C_m in bits
  std::vector<double> power_budgets;   // P_m

  void validate() const {
    if (num_bs <= 0 || num_users <= 0) throw InputError("instance: M and K must be positive");
    const auto k = static_cast<std::size_t>(num_users);
    const auto m = static_cast<std::size_t>(num_bs);
    if (channels.size() != k || noise_powers.size() != k || sinr_targets.size() != k) {
      throw InputError("instance: per-user arrays must have length K");
    }
    if (fronthaul_caps.size() != m || power_budgets.size() != m) {
      throw InputError("instance: per-BS arrays must have length M");
    }
    for (const auto& h : channels) {
      if (h.size() != num_bs) throw InputError("instance: channel length differs from M");
      if (!h.allFinite()) throw InputError("instance: non-finite channel entry");
    }
    auto positive = [](const std::vector<double>& v, const char* name) {
      for (double x : v) {
        if (!(x > 0.0) || !std::isfinite(x)) {
          throw InputError(std::string("instance: ") + name + " must be positive and finite");
        }
      }
    };
    positive(noise_powers, "noise_powers");
    positive(sinr_targets, "sinr_targets");
    positive(fronthaul_caps, "fronthaul_caps");
    positive(power_budgets, "power_budgets");
  }
};

/// Beamformers v_k plus the compression noise covariance Q.
struct BeamformingDesign {
  std::vector<CVector> beamformers;
  CMatrix compression_cov;
};

/// Lifted variables V_k (= v_k v_k^H for rank-one designs) plus Q.
struct CovarianceDesign {
  std::vector<CMatrix> covariances;
  CMatrix compression_cov;
};

inline CovarianceDesign lift(const BeamformingDesign& d) {
  CovarianceDesign out;
  out.covariances.reserve(d.beamformers.size());
  for (const auto& v : d.beamformers) out.covariances.push_back(v * v.adjoint());
  out.compression_cov = d.compression_cov;
  return out;
}

namespace detail {

inline void check_dims(const NetworkInstance& inst, std::size_t users, const CMatrix& q) {
  if (users != static_cast<std::size_t>(inst.num_users)) {
    throw InputError("design: user count differs from instance");
  }
  if (q.rows() != inst.num_bs || q.cols() != inst.num_bs) {
    throw InputError("design: compression covariance has wrong order");
  }
}

inline void check_dims(const NetworkInstance& inst, const BeamformingDesign& d) {
  check_dims(inst, d.beamformers.size(), d.compression_cov);
  for (const auto& v : d.beamformers) {
    if (v.size() != inst.num_bs) throw InputError("design: beamformer length differs from M");
  }
}

inline void check_dims(const NetworkInstance& inst, const CovarianceDesign& d) {
  check_dims(inst, d.covariances.size(), d.compression_cov);
  for (const auto& v : d.covariances) {
    if (v.rows() != inst.num_bs || v.cols() != inst.num_bs) {
      throw InputError("design: covariance block has wrong order");
    }
  }
}

inline void check_user(const NetworkInstance& inst, int k) {
  if (k < 0 || k >= inst.num_users) throw InputError("user index out of range");
}

inline void check_bs(const NetworkInstance& inst, int m) {
  if (m < 0 || m >= inst.num_bs) throw InputError("base station index out of range");
}

// Signal power transmitted by antenna m, excluding compression noise.
inline double signal_power(const BeamformingDesign& d, int m) {
  double p = 0.0;
  for (const auto& v : d.beamformers) p += std::norm(v(m));
  return p;
}

inline double signal_power(const CovarianceDesign& d, int m) {
  double p = 0.0;
  for (const auto& v : d.covariances) p += v(m, m).real();
  return p;
}

// |h_k^H v_j|^2 or tr(V_j h_k h_k^H).
inline double received_power(const CVector& h, const CVector& v) {
  return std::norm(h.dot(v));
}

inline double received_power(const CVector& h, const CMatrix& v) {
  return (h.adjoint() * v * h)(0, 0).real();
}

template <class Design>
const auto& user_blocks(const Design& d) {
  if constexpr (std::is_same_v<Design, BeamformingDesign>) {
    return d.beamformers;
  } else {
    return d.covariances;
  }
}

}  // namespace detail

template <class Design>
double sinr(const NetworkInstance& inst, const Design& d, int k) {
  detail::check_dims(inst, d);
  detail::check_user(inst, k);
  const CVector& h = inst.channels[static_cast<std::size_t>(k)];
  const auto& blocks = detail::user_blocks(d);
  double signal = 0.0;
  double interference = 0.0;
  for (int j = 0; j < inst.num_users; ++j) {
    const double p = detail::received_power(h, blocks[static_cast<std::size_t>(j)]);
    (j == k ? signal : interference) += p;
  }
  const double compression = (h.adjoint() * d.compression_cov * h)(0, 0).real();
  return signal / (interference + compression + inst.noise_powers[static_cast<std::size_t>(k)]);
}

/// Total transmit power of antenna m: signal power plus Q(m, m).
template <class Design>
double antenna_power(const NetworkInstance& inst, const Design& d, int m) {
  detail::check_dims(inst, d);
  detail::check_bs(inst, m);
  return detail::signal_power(d, m) + d.compression_cov(m, m).real();
}

template <class Design>
double total_power(const Design& d) {
  double p = d.compression_cov.trace().real();
  if constexpr (std::is_same_v<Design, BeamformingDesign>) {
    for (const auto& v : d.beamformers) p += v.squaredNorm();
  } else {
    for (const auto& v : d.covariances) p += v.trace().real();
  }
  return p;
}

/// Fronthaul rate of BS m in bits. A vanishing Schur complement with positive
/// antenna power yields +infinity; a silent antenna needs no fronthaul.
template <class Design>
double fronthaul_rate(const NetworkInstance& inst, const Design& d, int m) {
  const double power = antenna_power(inst, d, m);
  const SchurComplement sc = trailing_schur_complement(d.compression_cov, m);
  if (power <= 0.0) return 0.0;
  if (!(sc.value > 0.0)) return std::numeric_limits<double>::infinity();
  return std::log2(power / sc.value);
}

struct FeasibilityReport {
  std::vector<double> sinr_slack;       // sinr_k - gamma_k
  std::vector<double> fronthaul_slack;  // C_m - rate_m (bits)
  std::vector<double> power_slack;      // P_m - antenna power_m
  double tolerance = 0.0;
  bool feasible = false;

  double worst_slack() const {
    double w = std::numeric_limits<double>::infinity();
    for (const auto* v : {&sinr_slack, &fronthaul_slack, &power_slack}) {
      for (double s : *v) w = std::min(w, s);
    }
    return w;
  }
};

template <class Design>
FeasibilityReport check_feasibility(const NetworkInstance& inst, const Design& d, double tol) {
  detail::check_dims(inst, d);
  FeasibilityReport r;
  r.tolerance = tol;
  for (int k = 0; k < inst.num_users; ++k) {
    r.sinr_slack.push_back(sinr(inst, d, k) - inst.sinr_targets[static_cast<std::size_t>(k)]);
  }
  for (int m = 0; m < inst.num_bs; ++m) {
    const auto mi = static_cast<std::size_t>(m);
    r.fronthaul_slack.push_back(inst.fronthaul_caps[mi] - fronthaul_rate(inst, d, m));
    r.power_slack.push_back(inst.power_budgets[mi] - antenna_power(inst, d, m));
  }
  r.feasible = r.worst_slack() >= -tol;
  return r;
}

}  // namespace jbcp
