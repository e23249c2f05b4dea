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

// Primal-dual interior-point solver for ConeProgram instances.
//
// The iteration runs on the homogeneous self-dual embedding
//
//     G^T z + c tau = 0,   G x + s - h tau = 0,   kappa + c^T x + h^T z = 0,
//
// with (G, h) = (A, b), s, z in K and tau, kappa >= 0. Every step solves the
// Newton system with Nesterov-Todd scaling and a Mehrotra predictor-corrector
// through the normal equations H = G^T (W^T W)^{-1} G, which is dense but
// small for the programs built here. Infeasibility is detected from improving
// rays of the embedding.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/SVD>

#include "jbcp/cone_program.hpp"
#include "jbcp/hermitian.hpp"

namespace jbcp {

enum class SolveStatus {
  Optimal,           // all residuals within tolerance
  MaxIterations,     // iteration limit reached; residuals reported
  PrimalInfeasible,  // certificate y with A^T y = 0, b^T y < 0, y in K*
  DualInfeasible,    // improving ray x with c^T x < 0, -A x in K
  NumericalFailure,  // scaling or factorization broke down
};

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::MaxIterations: return "max-iterations";
    case SolveStatus::PrimalInfeasible: return "primal-infeasible";
    case SolveStatus::DualInfeasible: return "dual-infeasible";
    case SolveStatus::NumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

struct KktResiduals {
  double primal = std::numeric_limits<double>::infinity();
  double dual = std::numeric_limits<double>::infinity();
  double gap = std::numeric_limits<double>::infinity();
  double max() const { return std::max({primal, dual, gap}); }
};

struct WarmStart {
  RVector x;
  RVector s;
  RVector y;
};

struct SolverSettings {
  double tolerance = 1e-8;
  int max_iterations = 100;
  double infeasibility_tolerance = 1e-8;
  std::optional<WarmStart> warm_start;
  /// Weight on the warm point in the convex combination with the cold start.
  double warm_start_weight = 0.99;
};

struct SolveResult {
  RVector x;
  RVector s;
  RVector y;
  SolveStatus status = SolveStatus::NumericalFailure;
  KktResiduals residuals;
  int iterations = 0;
  double primal_objective = std::numeric_limits<double>::quiet_NaN();
  double dual_objective = std::numeric_limits<double>::quiet_NaN();
  bool warm_started = false;

  bool optimal() const { return status == SolveStatus::Optimal; }
  WarmStart as_warm_start() const { return {x, s, y}; }
};

namespace detail {

/// Euclidean distance from a vectorized block point to the cone.
inline double cone_distance(const ConeBlock& blk, const Eigen::Ref<const RVector>& v) {
  if (blk.kind == ConeKind::NonNegative) return v.cwiseMin(0.0).norm();
  const Eigh e = eigh(block_matrix(blk, v));
  return e.values.cwiseMin(0.0).norm();
}

}  // namespace detail

/// Conic KKT residuals of (x, y), each normalized by one plus the data norm:
/// primal = dist(b - A x, K), dual = ||A^T y + c|| + dist(y, K), gap = |c^T x + b^T y|.
inline KktResiduals kkt_residuals(const ConeProgram& p, const RVector& x, const RVector& y) {
  if (x.size() != p.num_vars || y.size() != p.num_rows()) {
    throw InputError("kkt_residuals: dimension mismatch");
  }
  const auto off = p.block_offsets();
  const RVector s = p.b - p.A * x;
  double pdist2 = 0.0;
  double ddist2 = 0.0;
  for (std::size_t i = 0; i < p.cones.size(); ++i) {
    const auto len = off[i + 1] - off[i];
    const double dp = detail::cone_distance(p.cones[i], s.segment(off[i], len));
    const double dd = detail::cone_distance(p.cones[i], y.segment(off[i], len));
    pdist2 += dp * dp;
    ddist2 += dd * dd;
  }
  const double pobj = p.c.dot(x);
  const double dobj = -p.b.dot(y);
  KktResiduals r;
  r.primal = std::sqrt(pdist2) / (1.0 + p.b.norm());
  r.dual = ((p.A.transpose() * y + p.c).norm() + std::sqrt(ddist2)) / (1.0 + p.c.norm());
  r.gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
  return r;
}

/// Holds the structural data of one program (everything except c), so the
/// same instance can be re-solved for many objective vectors.
class ConeSolver {
 public:
  explicit ConeSolver(const ConeProgram& program)
      : n_(program.num_vars), A_(program.A), b_(program.b), cones_(program.cones) {
    program.validate();
    offsets_ = program.block_offsets();
    degree_ = program.degree();
    build_structure();
  }

  const std::vector<ConeBlock>& cones() const { return cones_; }

  SolveResult solve(const RVector& c, const SolverSettings& settings) const {
    if (c.size() != n_) throw InputError("solve: objective has wrong length");
    if (!(settings.tolerance > 0.0)) throw InputError("solve: tolerance must be positive");
    if (!c.allFinite()) throw InputError("solve: objective has non-finite entries");
    // The argmin is invariant to positive scaling of c; large costs are
    // brought to unit size and the dual variables mapped back afterwards.
    const double k = std::max(1.0, c.cwiseAbs().maxCoeff());
    const RVector cs = c / k;
    if (settings.warm_start) {
      WarmStart ws = *settings.warm_start;
      ws.y /= k;
      SolveResult warm = unscale(run(cs, settings, &ws, k), c, k);
      if (warm.optimal() || warm.status == SolveStatus::PrimalInfeasible) {
        warm.warm_started = true;
        return warm;
      }
      SolveResult cold = unscale(run(cs, settings, nullptr, k), c, k);
      cold.iterations += warm.iterations;
      return cold;
    }
    return unscale(run(cs, settings, nullptr, k), c, k);
  }

 private:
  static SolveResult unscale(SolveResult r, const RVector& c, double k) {
    if (k == 1.0 || r.status == SolveStatus::PrimalInfeasible) return r;
    if (r.status != SolveStatus::DualInfeasible) {
      r.y *= k;
      r.dual_objective *= k;
    }
    r.primal_objective = c.dot(r.x);
    return r;
  }

  // Per-block Nesterov-Todd scaling.
  struct Scaling {
    RVector d;       // orthant: sqrt(s / z)
    CMatrix r;       // PSD: W z = R^H Z R
    CMatrix t;       // PSD: R^{-1}
    RVector lambda;  // scaled point, lambda = W z = W^{-T} s
  };

  struct PsdStructure {
    std::vector<int> cols;
    std::vector<CMatrix> mats;  // G_j restricted to the block, as Hermitian matrices
  };

  using Matrix = RMatrix;

  void build_structure() {
    const auto nb = cones_.size();
    psd_.assign(nb, {});
    std::vector<int> row_block(static_cast<std::size_t>(b_.size()));
    for (std::size_t i = 0; i < nb; ++i) {
      for (auto r = offsets_[i]; r < offsets_[i + 1]; ++r) row_block[static_cast<std::size_t>(r)] = static_cast<int>(i);
    }
    // orthant rows gathered densely; their count is small
    for (std::size_t i = 0; i < nb; ++i) {
      if (cones_[i].kind != ConeKind::NonNegative) continue;
      for (auto r = offsets_[i]; r < offsets_[i + 1]; ++r) orthant_rows_.push_back(r);
    }
    orthant_dense_ = Matrix::Zero(static_cast<std::ptrdiff_t>(orthant_rows_.size()), n_);
    std::vector<std::ptrdiff_t> orthant_pos(static_cast<std::size_t>(b_.size()), -1);
    for (std::size_t q = 0; q < orthant_rows_.size(); ++q) orthant_pos[static_cast<std::size_t>(orthant_rows_[q])] = static_cast<std::ptrdiff_t>(q);

    std::vector<std::vector<std::pair<std::ptrdiff_t, double>>> entries(nb);
    for (int j = 0; j < n_; ++j) {
      for (auto& e : entries) e.clear();
      for (SparseMatrix::InnerIterator it(A_, j); it; ++it) {
        const auto bi = static_cast<std::size_t>(row_block[static_cast<std::size_t>(it.row())]);
        if (cones_[bi].kind == ConeKind::NonNegative) {
          orthant_dense_(orthant_pos[static_cast<std::size_t>(it.row())], j) = it.value();
        } else {
          entries[bi].emplace_back(it.row() - offsets_[bi], it.value());
        }
      }
      for (std::size_t bi = 0; bi < nb; ++bi) {
        if (entries[bi].empty()) continue;
        RVector v = RVector::Zero(cones_[bi].vec_size());
        for (auto [r, val] : entries[bi]) v(r) += val;
        psd_[bi].cols.push_back(j);
        psd_[bi].mats.push_back(block_matrix(cones_[bi], v));
      }
    }
  }

  auto seg(RVector& v, std::size_t i) const { return v.segment(offsets_[i], offsets_[i + 1] - offsets_[i]); }
  auto seg(const RVector& v, std::size_t i) const { return v.segment(offsets_[i], offsets_[i + 1] - offsets_[i]); }

  CMatrix mat(std::size_t i, const RVector& v) const { return block_matrix(cones_[i], seg(v, i)); }

  // ---- Jordan algebra helpers -------------------------------------------

  RVector identity() const {
    RVector e = RVector::Zero(b_.size());
    for (std::size_t i = 0; i < cones_.size(); ++i) {
      if (cones_[i].kind == ConeKind::NonNegative) {
        seg(e, i).setOnes();
      } else {
        seg(e, i) = block_vec(cones_[i], CMatrix::Identity(cones_[i].size, cones_[i].size));
      }
    }
    return e;
  }

  // Largest t with v + t e on the cone boundary, i.e. -min eigenvalue.
  double max_violation(const RVector& v) const {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cones_.size(); ++i) {
      if (cones_[i].kind == ConeKind::NonNegative) {
        worst = std::max(worst, -seg(v, i).minCoeff());
      } else {
        worst = std::max(worst, -min_eigenvalue(mat(i, v)));
      }
    }
    return worst;
  }

  // a o b
  RVector jordan_product(const RVector& a, const RVector& b) const {
    RVector out(b_.size());
    for (std::size_t i = 0; i < cones_.size(); ++i) {
      if (cones_[i].kind == ConeKind::NonNegative) {
        seg(out, i) = seg(a, i).cwiseProduct(seg(b, i));
      } else {
        const CMatrix A = mat(i, a), B = mat(i, b);
        seg(out, i) = block_vec(cones_[i], (A * B + B * A) * 0.5);
      }
    }
    return out;
  }

  // solves lambda o u = v
  RVector lambda_divide(const std::vector<Scaling>& w, const RVector& v) const {
    RVector out(b_.size());
    for (std::size_t i = 0; i < cones_.size(); ++i) {
      const RVector& l = w[i].lambda;
      if (cones_[i].kind == ConeKind::NonNegative) {
        seg(out, i) = seg(v, i).cwiseQuotient(l);
      } else {
        CMatrix V = mat(i, v);
        for (std::ptrdiff_t r = 0; r < V.rows(); ++r)
          for (std::ptrdiff_t q = 0; q < V.cols(); ++q) V(r, q) /= 0.5 * (l(r) + l(q));
        seg(out, i) = block_vec(cones_[i], V);
      }
    }
    return out;
  }

  RVector lambda_vec(const std::vector<Scaling>& w) const {
    RVector out(b_.size());
    for (std::size_t i = 0; i < cones_.size(); ++i) {
      if (cones_[i].kind == ConeKind::NonNegative) {
        seg(out, i) = w[i].lambda;
      } else {
        seg(out, i) = block_vec(cones_[i], w[i].lambda.cast<Complex>().asDiagonal().toDenseMatrix());
      }
    }
    return out;
  }

  enum class Op { ScalePrimal, ScaleDual, ScaleDualInverse, Transpose, Gram, GramInverse };

  // W^{-T} u, W u, W^{-1} u, W^T u, W^T W u, (W^T W)^{-1} u
  RVector apply(const std::vector<Scaling>& w, const RVector& u, Op op) const {
    RVector out(b_.size());
    for (std::size_t i = 0; i < cones_.size(); ++i) {
      if (cones_[i].kind == ConeKind::NonNegative) {
        const RVector& d = w[i].d;
        switch (op) {
          case Op::ScalePrimal:
          case Op::ScaleDualInverse: seg(out, i) = seg(u, i).cwiseQuotient(d); break;
          case Op::ScaleDual:
          case Op::Transpose: seg(out, i) = seg(u, i).cwiseProduct(d); break;
          case Op::Gram: seg(out, i) = seg(u, i).cwiseProduct(d).cwiseProduct(d); break;
          case Op::GramInverse: seg(out, i) = seg(u, i).cwiseQuotient(d).cwiseQuotient(d); break;
        }
      } else {
        const CMatrix U = mat(i, u);
        const CMatrix& R = w[i].r;
        const CMatrix& T = w[i].t;
        CMatrix res;
        switch (op) {
          case Op::ScalePrimal: res = T * U * T.adjoint(); break;
          case Op::ScaleDual: res = R.adjoint() * U * R; break;
          case Op::ScaleDualInverse: res = T.adjoint() * U * T; break;
          case Op::Transpose: res = R * U * R.adjoint(); break;
          case Op::Gram: {
            const CMatrix P = R * R.adjoint();
            res = P * U * P;
            break;
          }
          case Op::GramInverse: {
            const CMatrix P = T.adjoint() * T;
            res = P * U * P;
            break;
          }
        }
        seg(out, i) = block_vec(cones_[i], hermitian_part(res));
      }
    }
    return out;
  }

  bool compute_scaling(const RVector& s, const RVector& z, std::vector<Scaling>& w) const {
    w.assign(cones_.size(), {});
    for (std::size_t i = 0; i < cones_.size(); ++i) {
      if (cones_[i].kind == ConeKind::NonNegative) {
        const auto si = seg(s, i);
        const auto zi = seg(z, i);
        if ((si.array() <= 0.0).any() || (zi.array() <= 0.0).any()) return false;
        w[i].d = (si.array() / zi.array()).sqrt();
        w[i].lambda = (si.array() * zi.array()).sqrt();
        continue;
      }
      const CMatrix S = mat(i, s);
      const CMatrix Z = mat(i, z);
      Eigen::LLT<CMatrix> ls(S), lz(Z);
      if (ls.info() != Eigen::Success || lz.info() != Eigen::Success) return false;
      const CMatrix Ls = ls.matrixL();
      const CMatrix Lz = lz.matrixL();
      Eigen::JacobiSVD<CMatrix> svd(Lz.adjoint() * Ls, Eigen::ComputeFullU | Eigen::ComputeFullV);
      const RVector sig = svd.singularValues();
      if ((sig.array() <= 0.0).any() || !sig.allFinite()) return false;
      const RVector isq = sig.cwiseSqrt().cwiseInverse();
      w[i].r = Ls * svd.matrixV() * isq.cast<Complex>().asDiagonal();
      const CMatrix LsInv = Ls.triangularView<Eigen::Lower>().solve(CMatrix::Identity(Ls.rows(), Ls.cols()));
      w[i].t = sig.cwiseSqrt().cast<Complex>().asDiagonal() * svd.matrixV().adjoint() * LsInv;
      w[i].lambda = sig;
    }
    return true;
  }

  Matrix normal_matrix(const std::vector<Scaling>& w) const {
    Matrix H = Matrix::Zero(n_, n_);
    if (!orthant_rows_.empty()) {
      RVector weights(static_cast<std::ptrdiff_t>(orthant_rows_.size()));
      std::ptrdiff_t q = 0;
      for (std::size_t i = 0; i < cones_.size(); ++i) {
        if (cones_[i].kind != ConeKind::NonNegative) continue;
        const RVector& d = w[i].d;
        for (std::ptrdiff_t r = 0; r < d.size(); ++r) weights(q++) = 1.0 / (d(r) * d(r));
      }
      H.noalias() += orthant_dense_.transpose() * weights.asDiagonal() * orthant_dense_;
    }
    for (std::size_t i = 0; i < cones_.size(); ++i) {
      if (cones_[i].kind != ConeKind::Psd) continue;
      const auto& ps = psd_[i];
      if (ps.cols.empty()) continue;
      const CMatrix& T = w[i].t;
      const auto ncol = static_cast<std::ptrdiff_t>(ps.cols.size());
      const int ord = cones_[i].size;
      Matrix Y(std::ptrdiff_t{ord} * ord, ncol);
      for (std::ptrdiff_t j = 0; j < ncol; ++j) {
        Y.col(j) = hermitian_vec(hermitian_part(T * ps.mats[static_cast<std::size_t>(j)] * T.adjoint()));
      }
      const Matrix gram = Y.transpose() * Y;
      for (std::ptrdiff_t a = 0; a < ncol; ++a) {
        for (std::ptrdiff_t bcol = 0; bcol < ncol; ++bcol) {
          H(ps.cols[static_cast<std::size_t>(a)], ps.cols[static_cast<std::size_t>(bcol)]) += gram(a, bcol);
        }
      }
    }
    return H;
  }

  struct Factor {
    Eigen::LLT<Matrix> llt;
    bool ok = false;
    bool use_augmented = false;
    std::optional<Eigen::PartialPivLU<Matrix>> augmented;
  };

  Factor factor(Matrix H) const {
    Factor f;
    f.llt.compute(H);
    if (f.llt.info() == Eigen::Success) {
      f.ok = true;
      return f;
    }
    const double scale = std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
    for (double reg = 1e-14; reg < 1e-4; reg *= 100.0) {
      Matrix Hr = H;
      Hr.diagonal().array() += reg * scale;
      f.llt.compute(Hr);
      if (f.llt.info() == Eigen::Success) {
        f.ok = true;
        return f;
      }
    }
    return f;
  }

  // Scaled augmented system [0 Abar^T; Abar -I] with Abar = W^{-T} A and
  // unknowns (dx, W dz). Its condition number is that of Abar rather than its
  // square, so it is used when refinement on the normal equations stalls.
  Eigen::PartialPivLU<Matrix> augmented(const std::vector<Scaling>& w) const {
    const std::ptrdiff_t rows = b_.size();
    Matrix K = Matrix::Zero(n_ + rows, n_ + rows);
    for (int j = 0; j < n_; ++j) {
      const RVector col = apply(w, RVector(A_.col(j)), Op::ScalePrimal);
      K.block(n_, j, rows, 1) = col;
      K.block(j, n_, 1, rows) = col.transpose();
    }
    K.bottomRightCorner(rows, rows).diagonal().setConstant(-1.0);
    return Eigen::PartialPivLU<Matrix>(K);
  }

  // [0 A^T; A -W^T W] [dx; dz] = [bx; bz], with iterative refinement.
  void kkt_solve(Factor& f, const std::vector<Scaling>& w, const RVector& bx, const RVector& bz,
                 RVector& dx, RVector& dz) const {
    auto normal = [&](const RVector& rx, const RVector& rz, RVector& ox, RVector& oz) {
      const RVector t = apply(w, rz, Op::GramInverse);
      ox = f.llt.solve(rx + A_.transpose() * t);
      oz = apply(w, A_ * ox - rz, Op::GramInverse);
    };
    auto full = [&](const RVector& rx, const RVector& rz, RVector& ox, RVector& oz) {
      if (!f.augmented) f.augmented = augmented(w);
      RVector rhs(n_ + b_.size());
      rhs << rx, apply(w, rz, Op::ScalePrimal);
      const RVector sol = f.augmented->solve(rhs);
      ox = sol.head(n_);
      RVector u = sol.tail(b_.size());
      oz = apply(w, u, Op::ScaleDualInverse);
    };
    auto residual = [&](RVector& ex, RVector& ez) {
      ex = bx - A_.transpose() * dz;
      ez = bz - (A_ * dx - apply(w, dz, Op::Gram));
      return std::sqrt(ex.squaredNorm() + ez.squaredNorm());
    };
    const double target = 1e-13 * (1.0 + std::sqrt(bx.squaredNorm() + bz.squaredNorm()));

    if (f.use_augmented) {
      full(bx, bz, dx, dz);
    } else {
      normal(bx, bz, dx, dz);
    }
    RVector ex, ez;
    double err = residual(ex, ez);
    for (int k = 0; k < 4 && err > target; ++k) {
      RVector cx, cz;
      if (f.use_augmented) {
        full(ex, ez, cx, cz);
      } else {
        normal(ex, ez, cx, cz);
      }
      const RVector px = dx, pz = dz;
      dx += cx;
      dz += cz;
      const double next = residual(ex, ez);
      if (next >= 0.5 * err) {
        if (next > err) {
          dx = px;
          dz = pz;
        }
        if (f.use_augmented) break;
        // the normal equations have run out of accuracy for this scaling
        f.use_augmented = true;
        full(bx, bz, dx, dz);
        err = residual(ex, ez);
        k = -1;
        continue;
      }
      err = next;
    }
  }

  // Largest alpha with lambda + alpha * v in the cone (v in scaled coordinates).
  double max_step(const std::vector<Scaling>& w, const RVector& v) const {
    double alpha = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cones_.size(); ++i) {
      const RVector& l = w[i].lambda;
      if (cones_[i].kind == ConeKind::NonNegative) {
        const auto vi = seg(v, i);
        for (std::ptrdiff_t r = 0; r < vi.size(); ++r) {
          if (vi(r) < 0.0) alpha = std::min(alpha, -l(r) / vi(r));
        }
      } else {
        const RVector isq = l.cwiseSqrt().cwiseInverse();
        const CMatrix V = mat(i, v);
        const CMatrix M = isq.cast<Complex>().asDiagonal() * V * isq.cast<Complex>().asDiagonal();
        const double lmin = min_eigenvalue(hermitian_part(M));
        if (lmin < 0.0) alpha = std::min(alpha, -1.0 / lmin);
      }
    }
    return alpha;
  }

  // c is the objective divided by `scale`; residuals are measured in the
  // units of the unscaled problem.
  SolveResult run(const RVector& c, const SolverSettings& settings, const WarmStart* warm,
                  double scale) const {
    const RVector& h = b_;
    const RVector e = identity();
    const double m = static_cast<double>(degree_);
    const double hnorm = h.norm();
    const double cnorm = c.norm();

    RVector x, s, z;
    double tau = 1.0, kappa = 1.0;
    SolveResult res;

    if (warm != nullptr && warm->x.size() == n_ && warm->y.size() == h.size()) {
      const double wgt = settings.warm_start_weight;
      x = wgt * warm->x;
      RVector sw = warm->s.size() == h.size() ? warm->s : RVector(h - A_ * warm->x);
      s = wgt * sw + (1.0 - wgt) * e;
      z = wgt * warm->y + (1.0 - wgt) * e;
      // the combination stays interior only if the warm point was
      if (max_violation(s) >= 0.0 || max_violation(z) >= 0.0) {
        const double sv = max_violation(s), zv = max_violation(z);
        if (sv >= 0.0) s += (1.0 + sv) * e;
        if (zv >= 0.0) z += (1.0 + zv) * e;
      }
    } else {
      std::vector<Scaling> ident(cones_.size());
      for (std::size_t i = 0; i < cones_.size(); ++i) {
        if (cones_[i].kind == ConeKind::NonNegative) {
          ident[i].d = RVector::Ones(cones_[i].size);
          ident[i].lambda = RVector::Ones(cones_[i].size);
        } else {
          ident[i].r = CMatrix::Identity(cones_[i].size, cones_[i].size);
          ident[i].t = ident[i].r;
          ident[i].lambda = RVector::Ones(cones_[i].size);
        }
      }
      Factor f0 = factor(normal_matrix(ident));
      if (!f0.ok) {
        res.status = SolveStatus::NumericalFailure;
        return res;
      }
      // least-squares primal start and least-norm dual start
      x = f0.llt.solve(A_.transpose() * h);
      s = h - A_ * x;
      z = A_ * RVector(f0.llt.solve(-c));
      const double ts = max_violation(s);
      const double tz = max_violation(z);
      if (ts >= -1e-8 * std::max(1.0, s.norm())) s += (1.0 + ts) * e;
      if (tz >= -1e-8 * std::max(1.0, z.norm())) z += (1.0 + tz) * e;
    }

    std::vector<Scaling> w;
    int it = 0;
    for (;; ++it) {
      const RVector rx = A_.transpose() * z + c * tau;
      const RVector rz = A_ * x + s - h * tau;
      const double cx = c.dot(x);
      const double hz = h.dot(z);
      const double rt = kappa + cx + hz;

      const double pcost = scale * cx / tau;
      const double dcost = -scale * hz / tau;
      KktResiduals cur;
      cur.primal = rz.norm() / tau / (1.0 + hnorm);
      cur.dual = scale * rx.norm() / tau / (1.0 + scale * cnorm);
      cur.gap = std::abs(pcost - dcost) / (1.0 + std::abs(pcost) + std::abs(dcost));

      auto finish = [&](SolveStatus st) {
        res.status = st;
        res.iterations = it;
        if (st == SolveStatus::PrimalInfeasible) {
          res.x = RVector::Zero(n_);
          res.y = z / (-hz);
          res.s = RVector::Zero(h.size());
        } else if (st == SolveStatus::DualInfeasible) {
          res.x = x / (-cx);
          res.s = s / (-cx);
          res.y = RVector::Zero(h.size());
        } else {
          res.x = x / tau;
          res.s = s / tau;
          res.y = z / tau;
        }
        res.residuals = cur;
        res.primal_objective = c.dot(res.x);
        res.dual_objective = -h.dot(res.y);
        return res;
      };

      if (cur.max() <= settings.tolerance) return finish(SolveStatus::Optimal);
      if (hz < 0.0) {
        const double pinf = (A_.transpose() * z).norm() / std::max(1.0, cnorm) / (-hz);
        if (pinf <= settings.infeasibility_tolerance) return finish(SolveStatus::PrimalInfeasible);
      }
      if (cx < 0.0) {
        const double dinf = (A_ * x + s).norm() / std::max(1.0, hnorm) / (-cx);
        if (dinf <= settings.infeasibility_tolerance) return finish(SolveStatus::DualInfeasible);
      }
      if (it >= settings.max_iterations) return finish(SolveStatus::MaxIterations);

      if (!compute_scaling(s, z, w)) return finish(SolveStatus::NumericalFailure);
      Factor f = factor(normal_matrix(w));
      if (!f.ok) return finish(SolveStatus::NumericalFailure);

      RVector x1, z1;
      kkt_solve(f, w, -c, h, x1, z1);
      const double denom = c.dot(x1) + h.dot(z1) - kappa / tau;

      const RVector lambda = lambda_vec(w);
      const double mu = (s.dot(z) + tau * kappa) / (m + 1.0);

      struct Direction {
        RVector dx, dz, ds, ds_scaled, dz_scaled;
        double dtau = 0.0, dkappa = 0.0;
      };

      auto direction = [&](double lin, const RVector& bs, double bkappa) {
        Direction d;
        const RVector bx = -lin * rx;
        const RVector bz = -lin * rz;
        const double btau = -lin * rt;
        const RVector ws = apply(w, lambda_divide(w, bs), Op::Transpose);
        RVector x2, z2;
        kkt_solve(f, w, bx, RVector(bz - ws), x2, z2);
        d.dtau = (btau - bkappa / tau - c.dot(x2) - h.dot(z2)) / denom;
        d.dx = x2 + d.dtau * x1;
        d.dz = z2 + d.dtau * z1;
        d.ds = ws - apply(w, d.dz, Op::Gram);
        d.dkappa = (bkappa - kappa * d.dtau) / tau;
        d.ds_scaled = apply(w, d.ds, Op::ScalePrimal);
        d.dz_scaled = apply(w, d.dz, Op::ScaleDual);
        return d;
      };

      auto step_length = [&](const Direction& d) {
        double a = std::min(max_step(w, d.ds_scaled), max_step(w, d.dz_scaled));
        if (d.dtau < 0.0) a = std::min(a, -tau / d.dtau);
        if (d.dkappa < 0.0) a = std::min(a, -kappa / d.dkappa);
        return a;
      };

      const RVector lsq = jordan_product(lambda, lambda);
      const Direction aff = direction(1.0, -lsq, -tau * kappa);
      const double alpha_aff = std::min(1.0, step_length(aff));
      const double sigma = std::pow(1.0 - alpha_aff, 3);

      const RVector bs = -lsq - jordan_product(aff.ds_scaled, aff.dz_scaled) + sigma * mu * e;
      const double bkappa = -tau * kappa - aff.dtau * aff.dkappa + sigma * mu;
      const Direction dir = direction(1.0 - sigma, bs, bkappa);
      const double alpha = std::min(1.0, 0.99 * step_length(dir));
      if (!(alpha > 1e-12)) return finish(SolveStatus::NumericalFailure);

      x += alpha * dir.dx;
      s += alpha * dir.ds;
      z += alpha * dir.dz;
      tau += alpha * dir.dtau;
      kappa += alpha * dir.dkappa;
    }
  }

  int n_;
  SparseMatrix A_;
  RVector b_;
  std::vector<ConeBlock> cones_;
  std::vector<std::ptrdiff_t> offsets_;
  int degree_ = 0;
  std::vector<PsdStructure> psd_;
  std::vector<std::ptrdiff_t> orthant_rows_;
  Matrix orthant_dense_;
};

inline SolveResult solve(const ConeProgram& program, const SolverSettings& settings = {}) {
  return ConeSolver(program).solve(program.c, settings);
}

}  // namespace jbcp
