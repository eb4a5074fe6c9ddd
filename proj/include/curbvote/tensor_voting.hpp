// Copyright 2026 The curbvote Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string_view>
#include <vector>

#include "curbvote/point_cloud.hpp"
#include "curbvote/spatial_index.hpp"
#include "curbvote/sym_tensor.hpp"

namespace curbvote {

struct VotingParams {
  /// Decay scale in meters.
  double sigma = 0.3;
  /// Votes from farther than this are truncated.
  double cutoff_radius = default_cutoff(0.3);
  /// Keep the encoded unit ball tensor of each point in its own sum.
  bool include_self = true;

  /// sigma * sqrt(ln 1000): the distance at which the decay drops to 1e-3.
  static double default_cutoff(double sigma) { return sigma * std::sqrt(std::log(1000.0)); }
  static VotingParams with_sigma(double sigma);

  /// Throws ArgumentError unless sigma > 0 and cutoff_radius > 0.
  void validate() const;

  friend bool operator==(const VotingParams&, const VotingParams&) = default;
};

/// Gaussian vote attenuation exp(-d^2 / sigma^2).
double decay(double d, double sigma);

/// One unit ball tensor per point.
std::vector<SymTensor3> encode(const PointCloud& cloud);

/// Closed-form ball vote cast by `voter` at `receiver`:
/// decay(d, sigma) * (I - r r^T), with r the unit vector from voter to
/// receiver. Throws ZeroDistanceError for coincident points.
SymTensor3 ball_vote(const Point3& receiver, const Point3& voter, double sigma);

/// Sparse ball voting. Point i receives the identity (when include_self) plus
/// the ball votes of every other point within the cutoff radius, accumulated in
/// ascending voter index. Voters coincident with the receiver carry no
/// direction and are skipped. Output is identical for any thread count.
std::vector<SymTensor3> sparse_vote(const PointCloud& cloud, const NeighborSearch& search,
                                    const VotingParams& params, unsigned threads = 1);

/// Per-point saliencies and orientations derived from a decomposed tensor.
struct SaliencyRecord {
  double stick = 0.0;  // lambda1 - lambda2
  double plate = 0.0;  // lambda2 - lambda3
  double ball = 0.0;   // lambda3
  Vec3 normal;         // e1, the surface normal estimate
  Vec3 tangent;        // e3, the curve tangent estimate
  std::array<double, 3> eigenvalues{};
};

SaliencyRecord saliency(const EigenDecomposition3& decomposition);

std::vector<SaliencyRecord> decompose_all(const std::vector<SymTensor3>& tensors,
                                          unsigned threads = 1);

/// Names of the channels written by attach_saliency().
namespace channels {
inline constexpr std::string_view kStick = "stick";
inline constexpr std::string_view kPlate = "plate";
inline constexpr std::string_view kBall = "ball";
inline constexpr std::string_view kNx = "nx";
inline constexpr std::string_view kNy = "ny";
inline constexpr std::string_view kNz = "nz";
/// |e1 . z| * stick: the vertical component of the stick-weighted normal.
inline constexpr std::string_view kZsal = "zsal";
}  // namespace channels

/// Adds (or replaces) the channels stick, plate, ball, nx, ny, nz, zsal.
void attach_saliency(PointCloud& cloud, const std::vector<SaliencyRecord>& records);

/// encode -> sparse_vote -> decompose, returning a copy of `cloud` with the
/// saliency channels attached. Throws EmptyInputError on an empty cloud. With
/// `brute_force` set, neighbor queries use the linear-scan oracle.
PointCloud saliency_field(const PointCloud& cloud, const VotingParams& params,
                          unsigned threads = 1, bool brute_force = false);

}  // namespace curbvote
