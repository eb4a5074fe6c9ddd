// Copyright 2026 The curbvote Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "curbvote/dem.hpp"
#include "curbvote/point_cloud.hpp"
#include "curbvote/spatial_index.hpp"
#include "curbvote/tensor_voting.hpp"

namespace curbvote {

struct CurbParams {
  /// Candidates need plate >= plate_fraction * max(plate).
  double plate_fraction = 0.3;
  /// ... and plate >= min_plate_ratio * lambda1 at the point itself, which
  /// keeps sampling noise on a curb-free surface from being promoted.
  double min_plate_ratio = 0.04;
  /// Height band around the DEM in which curbs may lie.
  double height_floor = -0.2;
  double height_ceiling = 0.5;
  /// Largest allowed x-y offset of a candidate's neighborhood centroid,
  /// relative to the mean neighbor distance. Points on the rim of the scanned
  /// area see neighbors on one side only (ratio near 0.5) and get spurious
  /// line saliency. 1 disables the check.
  double max_footprint_offset = 0.25;
  double outlier_radius = 0.3;
  std::size_t outlier_min_neighbors = 3;

  void validate() const;

  friend bool operator==(const CurbParams&, const CurbParams&) = default;
};

/// Line-feature points. Requires the plate and ball/stick channels; an empty
/// cloud yields an empty set.
std::vector<std::size_t> plate_candidates(const PointCloud& cloud, const CurbParams& params);

/// Keeps candidates whose height above the DEM lies in [floor, ceiling];
/// candidates over cells without a ground height are dropped.
///
/// With a `support` search and `support_radius` > 0, a candidate is also
/// dropped if any cloud point within that radius rises above the ceiling:
/// its line saliency is then owed to a structure too tall to be a curb.
std::vector<std::size_t> height_gate(const PointCloud& cloud,
                                     std::span<const std::size_t> candidates,
                                     const DemGrid& dem, const CurbParams& params,
                                     const NeighborSearch* support = nullptr,
                                     double support_radius = 0.0);

/// Keeps candidates whose neighbors within `radius` surround them in x-y:
/// |mean(q - p)| <= max_offset * mean|q - p|, both over the x-y components.
std::vector<std::size_t> footprint_gate(const PointCloud& cloud,
                                        std::span<const std::size_t> candidates,
                                        const NeighborSearch& search, double radius,
                                        double max_offset);

/// Radius outlier removal: keeps candidates with at least `min_neighbors`
/// other candidates within `radius`.
std::vector<std::size_t> outlier_removal(const PointCloud& cloud,
                                         std::span<const std::size_t> candidates,
                                         double radius, std::size_t min_neighbors);

struct CurbDetection {
  std::vector<std::size_t> indices;  // ascending
  /// plate / max(plate) for each entry of `indices`, in [0, 1].
  std::vector<double> confidence;
};

/// plate_candidates -> height_gate (support radius = voting cutoff) ->
/// footprint_gate (same radius) -> outlier_removal. `cloud` must carry the saliency channels.
CurbDetection detect_curbs(const PointCloud& cloud, const DemGrid& dem,
                           const VotingParams& voting, const CurbParams& params);

/// Dense per-point confidence (0 off the curb) for export as "curb_conf".
std::vector<double> curb_confidence_channel(std::size_t point_count,
                                            const CurbDetection& detection);

}  // namespace curbvote
