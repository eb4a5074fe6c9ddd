// Copyright 2026 The curbvote Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "curbvote/point_cloud.hpp"

namespace curbvote {

struct Neighbor {
  std::size_t index = 0;
  double distance = 0.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Fixed-radius neighbor search over an immutable point set.
///
/// Results hold every point with distance <= radius (inclusive), sorted by
/// point index ascending. Implementations are safe for concurrent queries.
class NeighborSearch {
 public:
  virtual ~NeighborSearch() = default;

  /// Clears `out` and fills it; reusing the buffer avoids per-query allocation.
  virtual void radius_neighbors(const Point3& center, double radius,
                                std::vector<Neighbor>& out) const = 0;

  std::vector<Neighbor> radius_neighbors(const Point3& center, double radius) const;

  virtual std::size_t size() const noexcept = 0;
};

/// Hashes points into cubic cells of a fixed size. The origin is the minimum
/// corner of the cloud's bounds, and a point lands in
/// floor((p - origin) / cell_size) on each axis.
///
/// Holds a pointer to the cloud's points: the cloud must outlive the index.
class UniformGridIndex final : public NeighborSearch {
 public:
  using CellKey = std::array<std::int32_t, 3>;

  UniformGridIndex(const PointCloud& cloud, double cell_size);

  using NeighborSearch::radius_neighbors;
  void radius_neighbors(const Point3& center, double radius,
                        std::vector<Neighbor>& out) const override;

  std::size_t size() const noexcept override { return points_->size(); }
  double cell_size() const noexcept { return cell_size_; }
  const Point3& origin() const noexcept { return origin_; }
  std::size_t cell_count() const noexcept { return cells_.size(); }

  CellKey cell_of(const Point3& p) const;
  /// Point indices stored in a cell, ascending; empty when the cell is unoccupied.
  std::vector<std::size_t> cell_members(const CellKey& key) const;

 private:
  struct KeyHash {
    std::size_t operator()(const CellKey& k) const noexcept;
  };
  struct Range {
    std::uint32_t begin;
    std::uint32_t end;
  };

  const std::vector<Point3>* points_;
  double cell_size_;
  Point3 origin_;
  CellKey min_cell_{0, 0, 0};
  CellKey max_cell_{-1, -1, -1};
  std::vector<std::uint32_t> sorted_;  // point indices grouped by cell
  std::unordered_map<CellKey, Range, KeyHash> cells_;
};

/// Linear scan with the same contract as UniformGridIndex; the validation oracle.
class BruteForceSearch final : public NeighborSearch {
 public:
  explicit BruteForceSearch(const PointCloud& cloud) : points_(&cloud.points()) {}

  using NeighborSearch::radius_neighbors;
  void radius_neighbors(const Point3& center, double radius,
                        std::vector<Neighbor>& out) const override;

  std::size_t size() const noexcept override { return points_->size(); }

 private:
  const std::vector<Point3>* points_;
};

/// Throws ArgumentError unless cell_size > 0.
UniformGridIndex build_index(const PointCloud& cloud, double cell_size);

std::vector<Neighbor> brute_force_neighbors(const PointCloud& cloud, const Point3& center,
                                            double radius);

}  // namespace curbvote
