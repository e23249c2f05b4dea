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

// Conic encodings of the semidefinite relaxation
//
//   min  sum_k tr(V_k) + tr(Q)
//   s.t. (1 + 1/gamma_k) tr(V_k H_k) - sum_j tr(V_j H_k) - tr(Q H_k) >= sigma_k^2
//        2^{C_m} [0 0; 0 Q_{m:,m:}] - (sum_k V_k(m,m) + Q(m,m)) E_m  PSD
//        sum_k V_k(m,m) + Q(m,m) <= P_m
//        V_k, Q PSD,
//
// with H_k = h_k h_k^H, and of the inner problem obtained by pricing the
// per-antenna power rows with multipliers mu >= 0 (objective weights
// 1 + mu_m on the antenna powers, power rows dropped).
//
// Variables are [vec V_0, ..., vec V_{K-1}, vec Q], each M^2 reals in the
// Hermitian parameterization. Fronthaul LMIs are stored at their effective
// order M - m (structurally zero rows/columns dropped); the last one is a
// scalar row.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "jbcp/cone_program.hpp"
#include "jbcp/conic_solver.hpp"
#include "jbcp/errors.hpp"
#include "jbcp/hermitian.hpp"
#include "jbcp/network.hpp"

namespace jbcp {

inline std::string label_v(int k) { return "V[" + std::to_string(k) + "]"; }
inline std::string label_q() { return "Q"; }
inline std::string label_sinr(int k) { return "sinr[" + std::to_string(k) + "]"; }
inline std::string label_fronthaul(int m) { return "fronthaul[" + std::to_string(m) + "]"; }
inline std::string label_papc(int m) { return "papc[" + std::to_string(m) + "]"; }

/// Shape of the variable vector: K + 1 Hermitian blocks of order M.
struct VariableLayout {
  int num_bs = 0;
  int num_users = 0;

  std::ptrdiff_t block_len() const { return std::ptrdiff_t{num_bs} * num_bs; }
  std::ptrdiff_t v_offset(int k) const { return k * block_len(); }
  std::ptrdiff_t q_offset() const { return num_users * block_len(); }
  int num_vars() const { return static_cast<int>((num_users + 1) * block_len()); }
  /// Column of the diagonal coordinate (m, m) of V_k, or of Q when k == K.
  std::ptrdiff_t diag_col(int k, int m) const { return k * block_len() + m; }

  /// Layout implied by a program built here (Q is the last variable block).
  static VariableLayout of(const ConeProgram& p) {
    const auto qi = p.find(label_q());
    if (!qi) throw InputError("program has no Q block");
    const int M = p.cones[*qi].size;
    const auto len = std::ptrdiff_t{M} * M;
    if (len == 0 || p.num_vars % len != 0) throw InputError("program variable count is inconsistent");
    return {M, static_cast<int>(p.num_vars / len) - 1};
  }
};

inline RVector design_to_vec(const CovarianceDesign& d) {
  const int M = static_cast<int>(d.compression_cov.rows());
  const VariableLayout lay{M, static_cast<int>(d.covariances.size())};
  RVector x(lay.num_vars());
  for (int k = 0; k < lay.num_users; ++k) {
    x.segment(lay.v_offset(k), lay.block_len()) = hermitian_vec(d.covariances[static_cast<std::size_t>(k)]);
  }
  x.segment(lay.q_offset(), lay.block_len()) = hermitian_vec(d.compression_cov);
  return x;
}

/// Raw (unsymmetrized, unclipped) design stored in x.
inline CovarianceDesign vec_to_design(const VariableLayout& lay, const RVector& x) {
  if (x.size() != lay.num_vars()) throw InputError("vec_to_design: wrong length");
  CovarianceDesign d;
  for (int k = 0; k < lay.num_users; ++k) {
    d.covariances.push_back(hermitian_unvec(x.segment(lay.v_offset(k), lay.block_len())));
  }
  d.compression_cov = hermitian_unvec(x.segment(lay.q_offset(), lay.block_len()));
  return d;
}

/// Symmetrize, then clip negative eigenvalues.
inline CMatrix clean_block(const CMatrix& a) {
  return psd_project(hermitian_part(a));
}

namespace detail {

inline RVector objective_weights_vec(const VariableLayout& lay, const RVector& weights) {
  RVector c = RVector::Zero(lay.num_vars());
  for (int k = 0; k <= lay.num_users; ++k) {
    for (int m = 0; m < lay.num_bs; ++m) c(lay.diag_col(k, m)) = weights(m);
  }
  return c;
}

inline void check_multipliers(const RVector& mu, int M) {
  if (mu.size() != M) throw InputError("multiplier vector must have length M");
  for (std::ptrdiff_t i = 0; i < mu.size(); ++i) {
    if (!(mu(i) >= 0.0) || !std::isfinite(mu(i))) {
      throw InputError("multipliers must be nonnegative and finite");
    }
  }
}

// Accumulates triplets block by block and applies the row scaling.
class ProgramBuilder {
 public:
  explicit ProgramBuilder(int num_vars) : num_vars_(num_vars) {}

  // rows: local triplets (row-in-block, col, value); offsets: b entries
  void add_block(ConeBlock blk, std::vector<Eigen::Triplet<double>> local, RVector offset,
                 bool normalize) {
    double scale = 1.0;
    if (normalize) {
      double big = 0.0;
      for (const auto& t : local) big = std::max(big, std::abs(t.value()));
      if (big > 0.0) scale = 1.0 / big;
    }
    if (blk.kind == ConeKind::NonNegative && normalize && blk.size != 1) {
      throw InputError("row scaling expects scalar orthant blocks");
    }
    blk.row_scale = scale;
    for (const auto& t : local) triplets_.emplace_back(rows_ + t.row(), t.col(), t.value() * scale);
    offsets_.push_back(offset * scale);
    rows_ += blk.vec_size();
    cones_.push_back(std::move(blk));
  }

  ConeProgram finish(RVector c) {
    ConeProgram p;
    p.num_vars = num_vars_;
    p.c = std::move(c);
    p.A.resize(rows_, num_vars_);
    p.A.setFromTriplets(triplets_.begin(), triplets_.end());
    p.A.makeCompressed();
    p.b.resize(rows_);
    std::ptrdiff_t o = 0;
    for (const auto& v : offsets_) {
      p.b.segment(o, v.size()) = v;
      o += v.size();
    }
    p.cones = std::move(cones_);
    p.validate();
    return p;
  }

 private:
  int num_vars_;
  std::ptrdiff_t rows_ = 0;
  std::vector<Eigen::Triplet<double>> triplets_;
  std::vector<RVector> offsets_;
  std::vector<ConeBlock> cones_;
};

inline ConeProgram build_program(const NetworkInstance& inst, const RVector& weights,
                                 bool with_power_rows) {
  inst.validate();
  const int M = inst.num_bs;
  const int K = inst.num_users;
  const VariableLayout lay{M, K};
  const auto len = lay.block_len();
  ProgramBuilder pb(lay.num_vars());

  // variable blocks: s = vec(V_k) = -(-I) x
  for (int k = 0; k <= K; ++k) {
    std::vector<Eigen::Triplet<double>> t;
    for (std::ptrdiff_t r = 0; r < len; ++r) {
      t.emplace_back(static_cast<int>(r), static_cast<int>(k * len + r), -1.0);
    }
    pb.add_block(ConeBlock::psd(M, true, k < K ? label_v(k) : label_q()), std::move(t),
                 RVector::Zero(len), false);
  }

  // SINR rows: s = a^T x - sigma^2
  for (int k = 0; k < K; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const CVector& h = inst.channels[ku];
    const RVector hv = hermitian_vec(h * h.adjoint());
    std::vector<Eigen::Triplet<double>> t;
    for (int j = 0; j <= K; ++j) {
      const double coef = (j == k) ? 1.0 / inst.sinr_targets[ku] : -1.0;
      for (std::ptrdiff_t r = 0; r < len; ++r) {
        if (hv(r) != 0.0) t.emplace_back(0, static_cast<int>(j * len + r), -coef * hv(r));
      }
    }
    RVector off(1);
    off(0) = -inst.noise_powers[ku];
    pb.add_block(ConeBlock::nonnegative(1, label_sinr(k)), std::move(t), off, true);
  }

  // fronthaul LMIs at order M - m
  for (int m = 0; m < M; ++m) {
    const int ord = M - m;
    const double two_c = std::exp2(inst.fronthaul_caps[static_cast<std::size_t>(m)]);
    std::vector<Eigen::Triplet<double>> t;
    const auto qcol = [&](std::ptrdiff_t local) { return static_cast<int>(lay.q_offset() + local); };
    for (int bcol = m; bcol < M; ++bcol) {
      for (int a = bcol; a < M; ++a) {
        if (a == bcol) {
          double coef = -two_c;
          if (a == m) coef += 1.0;
          t.emplace_back(a - m, qcol(a), coef);
        } else {
          const auto gi = hermitian_offdiag_index(M, a, bcol);
          const auto li = hermitian_offdiag_index(ord, a - m, bcol - m);
          t.emplace_back(static_cast<int>(li), qcol(gi), -two_c);
          t.emplace_back(static_cast<int>(li + 1), qcol(gi + 1), -two_c);
        }
      }
    }
    for (int k = 0; k < K; ++k) t.emplace_back(0, static_cast<int>(lay.diag_col(k, m)), 1.0);
    ConeBlock blk = ord == 1 ? ConeBlock::nonnegative(1, label_fronthaul(m))
                             : ConeBlock::psd(ord, true, label_fronthaul(m));
    const auto rows = blk.vec_size();
    pb.add_block(std::move(blk), std::move(t), RVector::Zero(rows), true);
  }

  if (with_power_rows) {
    for (int m = 0; m < M; ++m) {
      std::vector<Eigen::Triplet<double>> t;
      for (int k = 0; k <= K; ++k) t.emplace_back(0, static_cast<int>(lay.diag_col(k, m)), 1.0);
      RVector off(1);
      off(0) = inst.power_budgets[static_cast<std::size_t>(m)];
      pb.add_block(ConeBlock::nonnegative(1, label_papc(m)), std::move(t), off, true);
    }
  }

  return pb.finish(objective_weights_vec(lay, weights));
}

}  // namespace detail

/// The full relaxation, power rows included, unit objective weights.
inline ConeProgram build_sdr_program(const NetworkInstance& inst) {
  return detail::build_program(inst, RVector::Ones(inst.num_bs), true);
}

/// Inner problem at multipliers mu: power rows priced into the objective.
inline ConeProgram build_inner_program(const NetworkInstance& inst, const RVector& mu) {
  detail::check_multipliers(mu, inst.num_bs);
  return detail::build_program(inst, RVector::Ones(inst.num_bs) + mu, false);
}

/// Replaces the objective of an inner program with the one for mu; the
/// constraint data is left untouched.
inline void reweight_inner(ConeProgram& program, const RVector& mu) {
  const VariableLayout lay = VariableLayout::of(program);
  detail::check_multipliers(mu, lay.num_bs);
  if (program.c.size() != lay.num_vars()) throw InputError("reweight_inner: dimension mismatch");
  program.c = detail::objective_weights_vec(lay, RVector::Ones(lay.num_bs) + mu);
}

struct LabeledDual {
  std::string label;
  CMatrix value;  // 1x1 for scalar rows
};

struct SolutionExtract {
  CovarianceDesign design;
  double objective_value = 0.0;
  std::vector<LabeledDual> duals;

  const LabeledDual* dual(const std::string& label) const {
    for (const auto& d : duals) {
      if (d.label == label) return &d;
    }
    return nullptr;
  }
};

inline SolutionExtract extract_solution(const ConeProgram& program, const SolveResult& out) {
  if (!out.optimal()) {
    throw SolverError(std::string("extract_solution: solver status ") + to_string(out.status));
  }
  const VariableLayout lay = VariableLayout::of(program);
  CovarianceDesign raw = vec_to_design(lay, out.x);
  SolutionExtract ex;
  for (auto& v : raw.covariances) ex.design.covariances.push_back(clean_block(v));
  ex.design.compression_cov = clean_block(raw.compression_cov);
  ex.objective_value = program.c.dot(design_to_vec(ex.design));

  const auto off = program.block_offsets();
  for (std::size_t i = 0; i < program.cones.size(); ++i) {
    const ConeBlock& blk = program.cones[i];
    const RVector yi = out.y.segment(off[i], off[i + 1] - off[i]) * blk.row_scale;
    CMatrix val = blk.kind == ConeKind::Psd ? block_matrix(blk, yi) : CMatrix(yi.cast<Complex>());
    ex.duals.push_back({blk.label, std::move(val)});
  }
  return ex;
}

}  // namespace jbcp
