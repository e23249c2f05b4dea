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

// Small dense complex Hermitian linear algebra. Orders here are tiny (the
// network has at most a few dozen antennas), so everything is dense and
// backed by Eigen's self-adjoint routines.

#include <cmath>
#include <complex>
#include <algorithm>
#include <cstddef>
#include <limits>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "jbcp/errors.hpp"

namespace jbcp {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

inline constexpr double kSqrt2 = 1.4142135623730951;

inline bool all_finite(const CMatrix& a) {
  return a.allFinite();
}

inline bool is_hermitian(const CMatrix& a, double tol = 1e-12) {
  if (a.rows() != a.cols()) return false;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

/// Average of A and A^H; removes round-off asymmetry.
inline CMatrix hermitian_part(const CMatrix& a) {
  return (a + a.adjoint()) * 0.5;
}

/// Real inner product Re tr(A^H B).
inline double hermitian_inner(const CMatrix& a, const CMatrix& b) {
  return (a.conjugate().cwiseProduct(b)).sum().real();
}

// ---------------------------------------------------------------------------
// Isometric real parameterization.
//
// A Hermitian matrix of order n maps to n^2 reals: the n diagonal entries
// first, then for each strictly-lower entry (i, j) in column-major order the
// pair (sqrt2 Re A_ij, sqrt2 Im A_ij). The sqrt2 makes the map an isometry
// between the Frobenius norm and the Euclidean norm.
//
// Real symmetric matrices use the familiar svec layout with the same
// ordering: n diagonal entries, then sqrt2 A_ij, giving n(n+1)/2 reals.
// ---------------------------------------------------------------------------

/// Index of the first (real-part) coordinate of strictly-lower entry (i, j).
inline std::ptrdiff_t hermitian_offdiag_index(std::ptrdiff_t n, std::ptrdiff_t i,
                                              std::ptrdiff_t j) {
  const std::ptrdiff_t pair = j * (n - 1) - j * (j - 1) / 2 + (i - j - 1);
  return n + 2 * pair;
}

inline std::ptrdiff_t symmetric_offdiag_index(std::ptrdiff_t n, std::ptrdiff_t i,
                                              std::ptrdiff_t j) {
  return n + j * (n - 1) - j * (j - 1) / 2 + (i - j - 1);
}

inline RVector hermitian_vec(const CMatrix& a) {
  const std::ptrdiff_t n = a.rows();
  if (a.cols() != n) throw InputError("hermitian_vec: matrix is not square");
  RVector v(n * n);
  for (std::ptrdiff_t i = 0; i < n; ++i) v(i) = a(i, i).real();
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    for (std::ptrdiff_t i = j + 1; i < n; ++i) {
      const std::ptrdiff_t p = hermitian_offdiag_index(n, i, j);
      v(p) = kSqrt2 * a(i, j).real();
      v(p + 1) = kSqrt2 * a(i, j).imag();
    }
  }
  return v;
}

inline std::ptrdiff_t hermitian_order_from_length(std::ptrdiff_t len) {
  const auto n = static_cast<std::ptrdiff_t>(std::llround(std::sqrt(static_cast<double>(len))));
  if (len <= 0 || n * n != len) {
    throw InputError("hermitian_unvec: length " + std::to_string(len) + " is not a perfect square");
  }
  return n;
}

inline CMatrix hermitian_unvec(const Eigen::Ref<const RVector>& v) {
  const std::ptrdiff_t n = hermitian_order_from_length(v.size());
  CMatrix a(n, n);
  for (std::ptrdiff_t i = 0; i < n; ++i) a(i, i) = Complex(v(i), 0.0);
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    for (std::ptrdiff_t i = j + 1; i < n; ++i) {
      const std::ptrdiff_t p = hermitian_offdiag_index(n, i, j);
      const Complex z(v(p) / kSqrt2, v(p + 1) / kSqrt2);
      a(i, j) = z;
      a(j, i) = std::conj(z);
    }
  }
  return a;
}

inline RVector symmetric_vec(const CMatrix& a) {
  const std::ptrdiff_t n = a.rows();
  if (a.cols() != n) throw InputError("symmetric_vec: matrix is not square");
  RVector v(n * (n + 1) / 2);
  for (std::ptrdiff_t i = 0; i < n; ++i) v(i) = a(i, i).real();
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    for (std::ptrdiff_t i = j + 1; i < n; ++i) {
      v(symmetric_offdiag_index(n, i, j)) = kSqrt2 * a(i, j).real();
    }
  }
  return v;
}

inline CMatrix symmetric_unvec(const Eigen::Ref<const RVector>& v) {
  const double disc = std::sqrt(1.0 + 8.0 * static_cast<double>(v.size()));
  const auto n = static_cast<std::ptrdiff_t>(std::llround((disc - 1.0) / 2.0));
  if (v.size() <= 0 || n * (n + 1) / 2 != v.size()) {
    throw InputError("symmetric_unvec: length " + std::to_string(v.size()) +
                     " is not triangular");
  }
  CMatrix a(n, n);
  for (std::ptrdiff_t i = 0; i < n; ++i) a(i, i) = v(i);
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    for (std::ptrdiff_t i = j + 1; i < n; ++i) {
      const double x = v(symmetric_offdiag_index(n, i, j)) / kSqrt2;
      a(i, j) = x;
      a(j, i) = x;
    }
  }
  return a;
}

// ---------------------------------------------------------------------------
// Spectral routines
// ---------------------------------------------------------------------------

struct Eigh {
  RVector values;   // descending
  CMatrix vectors;  // column i pairs with values(i)
};

inline Eigh eigh(const CMatrix& a) {
  if (a.rows() != a.cols()) throw InputError("eigh: matrix is not square");
  if (!all_finite(a)) throw InputError("eigh: non-finite entries");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a);
  if (es.info() != Eigen::Success) throw SolverError("eigh: decomposition failed");
  const std::ptrdiff_t n = a.rows();
  Eigh out{RVector(n), CMatrix(n, n)};
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out.values(i) = es.eigenvalues()(n - 1 - i);
    out.vectors.col(i) = es.eigenvectors().col(n - 1 - i);
  }
  return out;
}

inline double min_eigenvalue(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

/// Nearest PSD matrix in Frobenius norm (negative eigenvalues clipped to zero).
inline CMatrix psd_project(const CMatrix& a) {
  const Eigh e = eigh(hermitian_part(a));
  const RVector clipped = e.values.cwiseMax(0.0);
  return hermitian_part(e.vectors * clipped.asDiagonal() * e.vectors.adjoint());
}

// ---------------------------------------------------------------------------
// Schur complement of the trailing block
// ---------------------------------------------------------------------------

struct SchurComplement {
  double value = 0.0;
  bool regularized = false;  // trailing block was singular; jitter applied
};

/// Q^{(m:M,m:M)} / Q^{(m+1:M,m+1:M)} with 0-based m. For the last index this
/// is just Q(m, m). A singular trailing block is shifted by
/// 1e-12 * tr(Q) / M on its diagonal and the result is flagged.
inline SchurComplement trailing_schur_complement(const CMatrix& q, std::ptrdiff_t m) {
  const std::ptrdiff_t n = q.rows();
  if (q.cols() != n) throw InputError("trailing_schur_complement: matrix is not square");
  if (m < 0 || m >= n) throw InputError("trailing_schur_complement: index out of range");
  if (!all_finite(q)) throw InputError("trailing_schur_complement: non-finite entries");
  const double qmm = q(m, m).real();
  const std::ptrdiff_t t = n - m - 1;
  if (t == 0) return {qmm, false};

  const CMatrix block = hermitian_part(q.bottomRightCorner(t, t));
  const CVector b = q.block(m + 1, m, t, 1);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(block);
  const RVector& lam = es.eigenvalues();
  const double lam_max = std::max(std::abs(lam(t - 1)), std::abs(lam(0)));
  const double floor = 1e3 * std::numeric_limits<double>::epsilon() * std::max(lam_max, 1e-300);

  SchurComplement out;
  RVector lam_used = lam;
  if (lam(0) <= floor) {
    double jitter = 1e-12 * q.trace().real() / static_cast<double>(n);
    if (!(jitter > 0.0)) jitter = 1e-12;
    lam_used.array() += jitter;
    out.regularized = true;
  }
  const CVector w = es.eigenvectors().adjoint() * b;
  double quad = 0.0;
  for (std::ptrdiff_t i = 0; i < t; ++i) quad += std::norm(w(i)) / lam_used(i);
  out.value = qmm - quad;
  return out;
}

}  // namespace jbcp
