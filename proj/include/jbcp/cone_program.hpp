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

// Standard-form conic program
//
//     minimize    c^T x
//     subject to  s = b - A x,   s in K = K_1 x ... x K_p,
//
// where every K_i is either a nonnegative orthant or a PSD cone. PSD blocks
// are stored in the isometric real parameterization of hermitian.hpp
// (n^2 reals for complex Hermitian blocks, n(n+1)/2 for real symmetric).

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include <Eigen/SparseCore>

#include "jbcp/errors.hpp"
#include "jbcp/hermitian.hpp"

namespace jbcp {

using SparseMatrix = Eigen::SparseMatrix<double>;  // column-major

enum class ConeKind { NonNegative, Psd };

struct ConeBlock {
  ConeKind kind = ConeKind::NonNegative;
  int size = 1;           // orthant dimension, or matrix order for PSD
  bool complex = true;    // PSD only: Hermitian (true) or real symmetric
  std::string label;
  double row_scale = 1.0; // rows of this block were multiplied by this factor

  std::ptrdiff_t vec_size() const {
    if (kind == ConeKind::NonNegative) return size;
    return complex ? std::ptrdiff_t{size} * size : std::ptrdiff_t{size} * (size + 1) / 2;
  }
  /// Barrier degree contributed to the cone.
  int degree() const { return size; }

  static ConeBlock nonnegative(int n, std::string label) {
    return {ConeKind::NonNegative, n, false, std::move(label), 1.0};
  }
  static ConeBlock psd(int order, bool is_complex, std::string label) {
    return {ConeKind::Psd, order, is_complex, std::move(label), 1.0};
  }
};

struct ConeProgram {
  int num_vars = 0;
  RVector c;
  SparseMatrix A;
  RVector b;
  std::vector<ConeBlock> cones;

  std::ptrdiff_t num_rows() const { return b.size(); }

  std::vector<std::ptrdiff_t> block_offsets() const {
    std::vector<std::ptrdiff_t> off;
    off.reserve(cones.size() + 1);
    std::ptrdiff_t o = 0;
    for (const auto& blk : cones) {
      off.push_back(o);
      o += blk.vec_size();
    }
    off.push_back(o);
    return off;
  }

  std::optional<std::size_t> find(const std::string& label) const {
    for (std::size_t i = 0; i < cones.size(); ++i) {
      if (cones[i].label == label) return i;
    }
    return std::nullopt;
  }

  int degree() const {
    int d = 0;
    for (const auto& blk : cones) d += blk.degree();
    return d;
  }

  void validate() const {
    if (num_vars <= 0) throw InputError("cone program: no variables");
    if (c.size() != num_vars || A.cols() != num_vars) {
      throw InputError("cone program: objective / matrix column count mismatch");
    }
    if (A.rows() != b.size()) throw InputError("cone program: matrix row count mismatch");
    if (block_offsets().back() != b.size()) {
      throw InputError("cone program: cone sizes do not sum to the constraint dimension");
    }
    std::unordered_set<std::string> seen;
    for (const auto& blk : cones) {
      if (blk.size <= 0) throw InputError("cone program: empty cone block");
      if (!blk.label.empty() && !seen.insert(blk.label).second) {
        throw InputError("cone program: duplicate label " + blk.label);
      }
    }
  }
};

/// Matrix form of a PSD block slice.
inline CMatrix block_matrix(const ConeBlock& blk, const Eigen::Ref<const RVector>& v) {
  return blk.complex ? hermitian_unvec(v) : symmetric_unvec(v);
}

inline RVector block_vec(const ConeBlock& blk, const CMatrix& m) {
  return blk.complex ? hermitian_vec(m) : symmetric_vec(m);
}

}  // namespace jbcp
