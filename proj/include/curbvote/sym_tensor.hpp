// Copyright 2026 The curbvote Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>

#include "curbvote/geometry.hpp"

namespace curbvote {

/// Symmetric 3x3 second-order tensor; only the upper triangle is stored.
struct SymTensor3 {
  double xx = 0.0;
  double xy = 0.0;
  double xz = 0.0;
  double yy = 0.0;
  double yz = 0.0;
  double zz = 0.0;

  static constexpr SymTensor3 zero() { return {}; }
  static constexpr SymTensor3 identity() { return {1.0, 0.0, 0.0, 1.0, 0.0, 1.0}; }
  /// v v^T
  static constexpr SymTensor3 outer(const Vec3& v) {
    return {v.x * v.x, v.x * v.y, v.x * v.z, v.y * v.y, v.y * v.z, v.z * v.z};
  }

  constexpr double trace() const { return xx + yy + zz; }

  constexpr Vec3 operator*(const Vec3& v) const {
    return {xx * v.x + xy * v.y + xz * v.z, xy * v.x + yy * v.y + yz * v.z,
            xz * v.x + yz * v.y + zz * v.z};
  }

  constexpr SymTensor3& operator+=(const SymTensor3& o) {
    xx += o.xx;
    xy += o.xy;
    xz += o.xz;
    yy += o.yy;
    yz += o.yz;
    zz += o.zz;
    return *this;
  }
  constexpr SymTensor3& operator-=(const SymTensor3& o) {
    xx -= o.xx;
    xy -= o.xy;
    xz -= o.xz;
    yy -= o.yy;
    yz -= o.yz;
    zz -= o.zz;
    return *this;
  }
  constexpr SymTensor3& operator*=(double s) {
    xx *= s;
    xy *= s;
    xz *= s;
    yy *= s;
    yz *= s;
    zz *= s;
    return *this;
  }

  friend constexpr SymTensor3 operator+(SymTensor3 a, const SymTensor3& b) { return a += b; }
  friend constexpr SymTensor3 operator-(SymTensor3 a, const SymTensor3& b) { return a -= b; }
  friend constexpr SymTensor3 operator*(SymTensor3 a, double s) { return a *= s; }
  friend constexpr SymTensor3 operator*(double s, SymTensor3 a) { return a *= s; }
  friend constexpr bool operator==(const SymTensor3&, const SymTensor3&) = default;
};

/// Full-matrix Frobenius norm (off-diagonal entries counted twice).
inline double frobenius_norm(const SymTensor3& t) {
  return std::sqrt(t.xx * t.xx + t.yy * t.yy + t.zz * t.zz +
                   2.0 * (t.xy * t.xy + t.xz * t.xz + t.yz * t.yz));
}

bool is_finite(const SymTensor3& t);

/// Eigenvalues sorted descending with matching unit eigenvectors.
///
/// Sign convention: each eigenvector is flipped so that its largest-magnitude
/// component is positive (the first such component on ties).
struct EigenDecomposition3 {
  std::array<double, 3> values{};
  std::array<Vec3, 3> vectors{};

  /// sum_i values[i] * vectors[i] vectors[i]^T
  SymTensor3 reconstruct() const;
};

/// Closed-form symmetric 3x3 eigensolver.
///
/// The eigenvalues come from the trigonometric solution of the characteristic
/// cubic. The eigenvector of the best separated eigenvalue comes from a cross
/// product of rows of (T - lambda I); the remaining pair is resolved by one
/// exact Jacobi rotation inside its orthogonal complement. When either
/// eigenvalue gap falls below 1e-7 of the trace the solver switches
/// to cyclic Jacobi iteration instead.
///
/// Throws ArgumentError on non-finite input.
EigenDecomposition3 decompose(const SymTensor3& tensor);

/// Cyclic Jacobi iteration; the near-degenerate fallback of decompose().
EigenDecomposition3 decompose_jacobi(const SymTensor3& tensor);

/// Applies the documented sign convention in place.
void canonicalize_sign(Vec3& v);

}  // namespace curbvote
