// Copyright 2026 The curbvote Authors
// SPDX-License-Identifier: Apache-2.0

#include "curbvote/curb_filter.hpp"

#include <algorithm>
#include <cmath>

#include "curbvote/errors.hpp"

namespace curbvote {

void CurbParams::validate() const {
  if (!(plate_fraction > 0.0) || plate_fraction > 1.0) {
    throw ArgumentError("plate fraction must lie in (0, 1]");
  }
  if (!(min_plate_ratio >= 0.0) || min_plate_ratio > 1.0) {
    throw ArgumentError("min plate ratio must lie in [0, 1]");
  }
  if (!(height_ceiling > 0.0)) throw ArgumentError("height ceiling must be positive");
  if (!(height_floor < height_ceiling)) throw ArgumentError("height floor must be below the ceiling");
  if (!(max_footprint_offset >= 0.0)) {
    throw ArgumentError("max footprint offset must be non-negative");
  }
  if (!(outlier_radius > 0.0)) throw ArgumentError("outlier radius must be positive");
  if (outlier_min_neighbors == 0) throw ArgumentError("outlier min neighbors must be positive");
}

std::vector<std::size_t> plate_candidates(const PointCloud& cloud, const CurbParams& params) {
  params.validate();
  std::vector<std::size_t> out;
  if (cloud.empty()) return out;
  const auto& plate = cloud.channel(channels::kPlate);
  const auto& stick = cloud.channel(channels::kStick);
  const auto& ball = cloud.channel(channels::kBall);
  const double max_plate = *std::max_element(plate.begin(), plate.end());
  if (!(max_plate > 0.0)) return out;
  const double floor = params.plate_fraction * max_plate;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (plate[i] < floor) continue;
    const double lambda1 = stick[i] + plate[i] + ball[i];
    if (plate[i] >= params.min_plate_ratio * lambda1) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> height_gate(const PointCloud& cloud,
                                     std::span<const std::size_t> candidates,
                                     const DemGrid& dem, const CurbParams& params,
                                     const NeighborSearch* support, double support_radius) {
  params.validate();
  const bool check_support = support != nullptr && support_radius > 0.0;
  std::vector<std::size_t> out;
  std::vector<Neighbor> neighbors;
  for (std::size_t i : candidates) {
    const Point3& p = cloud[i];
    const auto ground = ground_height_at(dem, p.x, p.y);
    if (!ground) continue;
    const double above = p.z - *ground;
    if (above < params.height_floor || above > params.height_ceiling) continue;
    if (check_support) {
      support->radius_neighbors(p, support_radius, neighbors);
      const bool tall = std::any_of(neighbors.begin(), neighbors.end(), [&](const Neighbor& n) {
        const Point3& q = cloud[n.index];
        const double g = ground_height_at(dem, q.x, q.y).value_or(*ground);
        return q.z - g > params.height_ceiling;
      });
      if (tall) continue;
    }
    out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> footprint_gate(const PointCloud& cloud,
                                        std::span<const std::size_t> candidates,
                                        const NeighborSearch& search, double radius,
                                        double max_offset) {
  if (!(radius > 0.0)) throw ArgumentError("footprint radius must be positive");
  std::vector<std::size_t> out;
  std::vector<Neighbor> neighbors;
  for (std::size_t i : candidates) {
    const Point3& p = cloud[i];
    search.radius_neighbors(p, radius, neighbors);
    double sx = 0.0;
    double sy = 0.0;
    double spread = 0.0;
    for (const Neighbor& n : neighbors) {
      const double dx = cloud[n.index].x - p.x;
      const double dy = cloud[n.index].y - p.y;
      sx += dx;
      sy += dy;
      spread += std::hypot(dx, dy);
    }
    if (spread > 0.0 && std::hypot(sx, sy) > max_offset * spread) continue;
    out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> outlier_removal(const PointCloud& cloud,
                                         std::span<const std::size_t> candidates, double radius,
                                         std::size_t min_neighbors) {
  if (!(radius > 0.0)) throw ArgumentError("outlier radius must be positive");
  std::vector<std::size_t> out;
  if (candidates.empty()) return out;
  const PointCloud subset = cloud.subset(candidates);
  const UniformGridIndex index(subset, radius);
  std::vector<Neighbor> neighbors;
  for (std::size_t k = 0; k < subset.size(); ++k) {
    index.radius_neighbors(subset[k], radius, neighbors);
    // The query point is always among its own neighbors.
    if (neighbors.size() - 1 >= min_neighbors) out.push_back(candidates[k]);
  }
  return out;
}

CurbDetection detect_curbs(const PointCloud& cloud, const DemGrid& dem,
                           const VotingParams& voting, const CurbParams& params) {
  voting.validate();
  params.validate();
  CurbDetection result;
  if (cloud.empty()) return result;

  const auto line_points = plate_candidates(cloud, params);
  const UniformGridIndex support(cloud, voting.cutoff_radius);
  const auto gated = height_gate(cloud, line_points, dem, params, &support, voting.cutoff_radius);
  const auto surrounded =
      params.max_footprint_offset >= 1.0
          ? gated
          : footprint_gate(cloud, gated, support, voting.cutoff_radius,
                           params.max_footprint_offset);
  result.indices =
      outlier_removal(cloud, surrounded, params.outlier_radius, params.outlier_min_neighbors);
  std::sort(result.indices.begin(), result.indices.end());

  const auto& plate = cloud.channel(channels::kPlate);
  const double max_plate = *std::max_element(plate.begin(), plate.end());
  result.confidence.reserve(result.indices.size());
  for (std::size_t i : result.indices) {
    result.confidence.push_back(max_plate > 0.0 ? std::clamp(plate[i] / max_plate, 0.0, 1.0) : 0.0);
  }
  return result;
}

std::vector<double> curb_confidence_channel(std::size_t point_count,
                                            const CurbDetection& detection) {
  std::vector<double> out(point_count, 0.0);
  for (std::size_t k = 0; k < detection.indices.size(); ++k) {
    out.at(detection.indices[k]) = detection.confidence[k];
  }
  return out;
}

}  // namespace curbvote
