// Copyright 2026 The curbvote Authors
// SPDX-License-Identifier: Apache-2.0

#include "curbvote/sym_tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "curbvote/errors.hpp"

namespace curbvote {
namespace {

// Either gap below this fraction of the (scaled) trace hands over to Jacobi.
constexpr double kDegenerateGap = 1e-7;

struct Pair {
  double value;
  Vec3 vector;
};

EigenDecomposition3 finish(std::array<Pair, 3> pairs, double scale) {
  std::sort(pairs.begin(), pairs.end(),
            [](const Pair& a, const Pair& b) { return a.value > b.value; });
  EigenDecomposition3 out;
  for (int i = 0; i < 3; ++i) {
    out.values[i] = pairs[i].value * scale;
    out.vectors[i] = pairs[i].vector;
    canonicalize_sign(out.vectors[i]);
  }
  return out;
}

/// Unit vector orthogonal to the two rows of (A - lambda I) that span the
/// widest parallelogram; it is the eigenvector of a simple eigenvalue.
Vec3 null_vector(const SymTensor3& a, double lambda) {
  const Vec3 r0{a.xx - lambda, a.xy, a.xz};
  const Vec3 r1{a.xy, a.yy - lambda, a.yz};
  const Vec3 r2{a.xz, a.yz, a.zz - lambda};
  const Vec3 c01 = cross(r0, r1);
  const Vec3 c02 = cross(r0, r2);
  const Vec3 c12 = cross(r1, r2);
  const double n01 = squared_norm(c01);
  const double n02 = squared_norm(c02);
  const double n12 = squared_norm(c12);
  if (n01 >= n02 && n01 >= n12) return c01 * (1.0 / std::sqrt(n01));
  if (n02 >= n12) return c02 * (1.0 / std::sqrt(n02));
  return c12 * (1.0 / std::sqrt(n12));
}

/// Orthonormal u, v completing the unit vector w.
std::pair<Vec3, Vec3> complement(const Vec3& w) {
  Vec3 u;
  if (std::abs(w.x) > std::abs(w.y)) {
    u = Vec3{-w.z, 0.0, w.x} * (1.0 / std::sqrt(w.x * w.x + w.z * w.z));
  } else {
    u = Vec3{0.0, w.z, -w.y} * (1.0 / std::sqrt(w.y * w.y + w.z * w.z));
  }
  return {u, cross(w, u)};
}

}  // namespace

bool is_finite(const SymTensor3& t) {
  return std::isfinite(t.xx) && std::isfinite(t.xy) && std::isfinite(t.xz) &&
         std::isfinite(t.yy) && std::isfinite(t.yz) && std::isfinite(t.zz);
}

SymTensor3 EigenDecomposition3::reconstruct() const {
  SymTensor3 t;
  for (int i = 0; i < 3; ++i) t += SymTensor3::outer(vectors[i]) * values[i];
  return t;
}

void canonicalize_sign(Vec3& v) {
  double best = v.x;
  if (std::abs(v.y) > std::abs(best)) best = v.y;
  if (std::abs(v.z) > std::abs(best)) best = v.z;
  if (best < 0.0) v = -v;
}

EigenDecomposition3 decompose(const SymTensor3& tensor) {
  if (!is_finite(tensor)) throw ArgumentError("cannot decompose a non-finite tensor");

  // Work on a copy scaled into [-1, 1] to keep the cubic well conditioned.
  const double scale = std::max({std::abs(tensor.xx), std::abs(tensor.xy), std::abs(tensor.xz),
                                 std::abs(tensor.yy), std::abs(tensor.yz), std::abs(tensor.zz)});
  if (scale == 0.0) {
    return finish({Pair{0.0, {1, 0, 0}}, Pair{0.0, {0, 1, 0}}, Pair{0.0, {0, 0, 1}}}, 1.0);
  }
  const SymTensor3 a = tensor * (1.0 / scale);

  const double off = a.xy * a.xy + a.xz * a.xz + a.yz * a.yz;
  if (off == 0.0) {
    return finish(
        {Pair{tensor.xx, {1, 0, 0}}, Pair{tensor.yy, {0, 1, 0}}, Pair{tensor.zz, {0, 0, 1}}}, 1.0);
  }

  const double q = a.trace() / 3.0;
  const double dxx = a.xx - q;
  const double dyy = a.yy - q;
  const double dzz = a.zz - q;
  const double p = std::sqrt((dxx * dxx + dyy * dyy + dzz * dzz + 2.0 * off) / 6.0);
  // det((A - qI) / p) / 2, clamped against rounding.
  const double det = dxx * (dyy * dzz - a.yz * a.yz) - a.xy * (a.xy * dzz - a.yz * a.xz) +
                     a.xz * (a.xy * a.yz - dyy * a.xz);
  const double r = std::clamp(det / (2.0 * p * p * p), -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double l1 = q + 2.0 * p * std::cos(phi);
  const double l3 = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
  const double l2 = 3.0 * q - l1 - l3;

  const double gap_floor = kDegenerateGap * std::max(std::abs(a.trace()), 1.0);
  if (l1 - l2 < gap_floor || l2 - l3 < gap_floor) return decompose_jacobi(tensor);

  // Isolate the eigenvalue with the wider gap; its eigenvector is well defined.
  const bool top = (l1 - l2) >= (l2 - l3);
  const Vec3 w = null_vector(a, top ? l1 : l3);
  const double lw = dot(w, a * w);

  // Diagonalize the 2x2 restriction to span{u, v} with one Jacobi rotation.
  const auto [u, v] = complement(w);
  const Vec3 au = a * u;
  const Vec3 av = a * v;
  const double m00 = dot(u, au);
  const double m01 = dot(u, av);
  const double m11 = dot(v, av);
  Pair first{m00, u};
  Pair second{m11, v};
  if (m01 != 0.0) {
    const double tau = (m11 - m00) / (2.0 * m01);
    const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;
    first = {m00 - t * m01, u * c - v * s};
    second = {m11 + t * m01, u * s + v * c};
  }
  return finish({Pair{lw, w}, first, second}, scale);
}

EigenDecomposition3 decompose_jacobi(const SymTensor3& tensor) {
  if (!is_finite(tensor)) throw ArgumentError("cannot decompose a non-finite tensor");
  double m[3][3] = {{tensor.xx, tensor.xy, tensor.xz},
                    {tensor.xy, tensor.yy, tensor.yz},
                    {tensor.xz, tensor.yz, tensor.zz}};
  double v[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};

  for (int sweep = 0; sweep < 64; ++sweep) {
    const double off = m[0][1] * m[0][1] + m[0][2] * m[0][2] + m[1][2] * m[1][2];
    const double diag = m[0][0] * m[0][0] + m[1][1] * m[1][1] + m[2][2] * m[2][2];
    if (off == 0.0 || off <= 1e-36 * diag) break;
    for (int p = 0; p < 2; ++p) {
      for (int q = p + 1; q < 3; ++q) {
        if (m[p][q] == 0.0) continue;
        const double tau = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // M <- J^T M J with J the (p, q) rotation.
        for (int k = 0; k < 3; ++k) {
          const double mkp = m[k][p];
          const double mkq = m[k][q];
          m[k][p] = c * mkp - s * mkq;
          m[k][q] = s * mkp + c * mkq;
        }
        for (int k = 0; k < 3; ++k) {
          const double mpk = m[p][k];
          const double mqk = m[q][k];
          m[p][k] = c * mpk - s * mqk;
          m[q][k] = s * mpk + c * mqk;
        }
        for (int k = 0; k < 3; ++k) {
          const double vkp = v[k][p];
          const double vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
  std::array<Pair, 3> pairs;
  for (int i = 0; i < 3; ++i) pairs[i] = {m[i][i], Vec3{v[0][i], v[1][i], v[2][i]}};
  return finish(pairs, 1.0);
}

}  // namespace curbvote
