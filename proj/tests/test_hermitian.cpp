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

#include <cmath>
#include <limits>
#include <random>

#include "jbcp/hermitian.hpp"
#include "support.hpp"

namespace jbcp {
namespace {

using testing::random_hermitian;
using testing::random_psd;

const Complex I(0.0, 1.0);

TEST(Eigh, IdentityHasUnitSpectrum) {
  const Eigh e = eigh(CMatrix::Identity(2, 2));
  EXPECT_NEAR(e.values(0), 1.0, 1e-14);
  EXPECT_NEAR(e.values(1), 1.0, 1e-14);
}

TEST(Eigh, PauliX) {
  CMatrix a(2, 2);
  a << 0.0, 1.0, 1.0, 0.0;
  const Eigh e = eigh(a);
  EXPECT_NEAR(e.values(0), 1.0, 1e-14);
  EXPECT_NEAR(e.values(1), -1.0, 1e-14);
}

TEST(Eigh, ComplexTwoByTwo) {
  CMatrix a(2, 2);
  a << 1.0, I, -I, 1.0;
  const Eigh e = eigh(a);
  EXPECT_NEAR(e.values(0), 2.0, 1e-14);
  EXPECT_NEAR(e.values(1), 0.0, 1e-14);
}

TEST(Eigh, ReconstructsRandomMatricesInDescendingOrder) {
  std::mt19937_64 rng(7);
  for (int n = 1; n <= 9; ++n) {
    const CMatrix a = random_hermitian(n, rng);
    const Eigh e = eigh(a);
    for (int i = 1; i < n; ++i) EXPECT_GE(e.values(i - 1), e.values(i));
    const CMatrix back = e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint();
    EXPECT_LE((back - a).norm(), 1e-10 * std::max(1.0, a.norm()));
    EXPECT_LE((e.vectors.adjoint() * e.vectors - CMatrix::Identity(n, n)).norm(), 1e-12);
  }
}

TEST(Eigh, RejectsNonFiniteEntries) {
  CMatrix a = CMatrix::Identity(2, 2);
  a(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(eigh(a), InputError);
}

TEST(SchurComplement, Examples) {
  CMatrix q(2, 2);
  q << 2.0, 1.0, 1.0, 1.0;
  EXPECT_NEAR(trailing_schur_complement(q, 0).value, 1.0, 1e-14);
  EXPECT_NEAR(trailing_schur_complement(q, 1).value, 1.0, 1e-14);
  for (int m = 0; m < 3; ++m) {
    EXPECT_NEAR(trailing_schur_complement(CMatrix::Identity(3, 3), m).value, 1.0, 1e-14);
  }
  RVector d(4);
  d << 0.5, 2.0, 3.0, 7.0;
  const CMatrix diag = d.cast<Complex>().asDiagonal();
  for (int m = 0; m < 4; ++m) {
    const SchurComplement sc = trailing_schur_complement(diag, m);
    EXPECT_NEAR(sc.value, d(m), 1e-13);
    EXPECT_FALSE(sc.regularized);
  }
}

TEST(SchurComplement, EqualsDeterminantRatio) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int M = 2 + trial % 5;
    const CMatrix q = random_psd(M, rng) + 0.1 * CMatrix::Identity(M, M);
    for (int m = 0; m + 1 < M; ++m) {
      const int len = M - m;
      const double num = q.bottomRightCorner(len, len).determinant().real();
      const double den = q.bottomRightCorner(len - 1, len - 1).determinant().real();
      ASSERT_GT(den, 1e-12);
      EXPECT_NEAR(trailing_schur_complement(q, m).value, num / den, 1e-9 * std::abs(num / den));
    }
  }
}

TEST(SchurComplement, SingularTrailingBlockIsRegularized) {
  CMatrix q = CMatrix::Zero(3, 3);
  q(0, 0) = 2.0;
  const SchurComplement sc = trailing_schur_complement(q, 0);
  EXPECT_TRUE(sc.regularized);
  EXPECT_TRUE(std::isfinite(sc.value));
  EXPECT_NEAR(sc.value, 2.0, 1e-9);
}

TEST(PsdProject, Examples) {
  CMatrix a(2, 2);
  a << 1.0, 0.0, 0.0, -1.0;
  CMatrix want(2, 2);
  want << 1.0, 0.0, 0.0, 0.0;
  EXPECT_LE((psd_project(a) - want).norm(), 1e-14);

  CMatrix x(2, 2);
  x << 0.0, 1.0, 1.0, 0.0;
  want << 0.5, 0.5, 0.5, 0.5;
  EXPECT_LE((psd_project(x) - want).norm(), 1e-14);

  std::mt19937_64 rng(3);
  const CMatrix p = random_psd(4, rng);
  EXPECT_LE((psd_project(p) - p).norm(), 1e-12 * p.norm());
}

TEST(PsdProject, IdempotentAndPsd) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const CMatrix a = random_hermitian(1 + trial % 7, rng);
    const CMatrix p = psd_project(a);
    EXPECT_GE(min_eigenvalue(p), -1e-10);
    EXPECT_LE((psd_project(p) - p).norm(), 1e-12 * std::max(1.0, p.norm()));
    // nearest in Frobenius norm: the residual is the negative part
    EXPECT_LE(eigh(a - p).values(0), 1e-10);
  }
}

TEST(HermitianVec, Examples) {
  EXPECT_NEAR(hermitian_vec(CMatrix::Identity(2, 2)).norm(), std::sqrt(2.0), 1e-15);
  EXPECT_EQ(hermitian_vec(CMatrix::Zero(3, 3)).norm(), 0.0);
  std::mt19937_64 rng(9);
  const CMatrix a = random_hermitian(5, rng);
  const RVector v = hermitian_vec(a);
  EXPECT_EQ(v.size(), 25);
  EXPECT_LE((hermitian_unvec(v) - a).norm(), 1e-14 * a.norm());
}

TEST(HermitianVec, IsALinearIsometry) {
  std::mt19937_64 rng(13);
  for (int n = 1; n <= 8; ++n) {
    const CMatrix a = random_hermitian(n, rng);
    const CMatrix b = random_hermitian(n, rng);
    const RVector va = hermitian_vec(a), vb = hermitian_vec(b);
    EXPECT_NEAR(va.dot(vb), hermitian_inner(a, b), 1e-12 * (1.0 + a.norm() * b.norm()));
    EXPECT_NEAR(va.norm(), a.norm(), 1e-12 * a.norm());
    EXPECT_LE((hermitian_vec(2.0 * a - b) - (2.0 * va - vb)).norm(), 1e-12 * (1.0 + va.norm()));
  }
}

TEST(HermitianVec, OffDiagonalIndexMatchesLayout) {
  const int n = 4;
  CMatrix a = CMatrix::Zero(n, n);
  a(2, 1) = Complex(1.0, 2.0);
  a(1, 2) = std::conj(a(2, 1));
  const RVector v = hermitian_vec(a);
  const auto idx = hermitian_offdiag_index(n, 2, 1);
  EXPECT_NEAR(v(idx), std::sqrt(2.0) * 1.0, 1e-15);
  EXPECT_NEAR(v(idx + 1), std::sqrt(2.0) * 2.0, 1e-15);
  EXPECT_NEAR(v.norm(), a.norm(), 1e-14);
}

TEST(HermitianVec, WrongLengthThrows) {
  EXPECT_THROW(hermitian_unvec(RVector::Zero(5)), InputError);
  EXPECT_THROW(symmetric_unvec(RVector::Zero(4)), InputError);
}

TEST(SymmetricVec, RoundTripAndIsometry) {
  std::mt19937_64 rng(17);
  for (int n = 1; n <= 6; ++n) {
    const CMatrix a = random_hermitian(n, rng).real().cast<Complex>();
    const RVector v = symmetric_vec(a);
    EXPECT_EQ(v.size(), n * (n + 1) / 2);
    EXPECT_NEAR(v.norm(), a.norm(), 1e-12 * (1.0 + a.norm()));
    EXPECT_LE((symmetric_unvec(v) - a).norm(), 1e-14 * (1.0 + a.norm()));
  }
}

}  // namespace
}  // namespace jbcp
