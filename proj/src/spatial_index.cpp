// Copyright 2026 The curbvote Authors
// SPDX-License-Identifier: Apache-2.0

#include "curbvote/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "curbvote/errors.hpp"

namespace curbvote {
namespace {

std::int32_t cell_coordinate(double offset, double cell_size) {
  const double c = std::floor(offset / cell_size);
  constexpr double lo = std::numeric_limits<std::int32_t>::min();
  constexpr double hi = std::numeric_limits<std::int32_t>::max();
  return static_cast<std::int32_t>(std::clamp(c, lo, hi));
}

bool by_index(const Neighbor& a, const Neighbor& b) { return a.index < b.index; }

}  // namespace

std::vector<Neighbor> NeighborSearch::radius_neighbors(const Point3& center, double radius) const {
  std::vector<Neighbor> out;
  radius_neighbors(center, radius, out);
  return out;
}

std::size_t UniformGridIndex::KeyHash::operator()(const CellKey& k) const noexcept {
  // Teschner et al. spatial hash primes.
  const auto h = static_cast<std::uint64_t>(static_cast<std::uint32_t>(k[0])) * 73856093ULL ^
                 static_cast<std::uint64_t>(static_cast<std::uint32_t>(k[1])) * 19349663ULL ^
                 static_cast<std::uint64_t>(static_cast<std::uint32_t>(k[2])) * 83492791ULL;
  return static_cast<std::size_t>(h);
}

UniformGridIndex::UniformGridIndex(const PointCloud& cloud, double cell_size)
    : points_(&cloud.points()), cell_size_(cell_size) {
  if (!(cell_size > 0.0) || !std::isfinite(cell_size)) {
    throw ArgumentError("cell size must be positive");
  }
  if (cloud.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw ArgumentError("too many points for the grid index");
  }
  if (const auto b = cloud.bounds()) origin_ = b->min;

  const std::size_t n = cloud.size();
  std::vector<CellKey> keys(n);
  for (std::size_t i = 0; i < n; ++i) keys[i] = cell_of(cloud[i]);

  sorted_.resize(n);
  std::iota(sorted_.begin(), sorted_.end(), 0u);
  // Stable sort keeps indices ascending inside each cell.
  std::stable_sort(sorted_.begin(), sorted_.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return keys[a] < keys[b]; });

  cells_.reserve(n / 4 + 1);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && keys[sorted_[j]] == keys[sorted_[i]]) ++j;
    const CellKey& key = keys[sorted_[i]];
    cells_.emplace(key, Range{static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
    if (i == 0) {
      min_cell_ = max_cell_ = key;
    } else {
      for (int a = 0; a < 3; ++a) {
        min_cell_[a] = std::min(min_cell_[a], key[a]);
        max_cell_[a] = std::max(max_cell_[a], key[a]);
      }
    }
    i = j;
  }
}

UniformGridIndex::CellKey UniformGridIndex::cell_of(const Point3& p) const {
  return {cell_coordinate(p.x - origin_.x, cell_size_), cell_coordinate(p.y - origin_.y, cell_size_),
          cell_coordinate(p.z - origin_.z, cell_size_)};
}

std::vector<std::size_t> UniformGridIndex::cell_members(const CellKey& key) const {
  std::vector<std::size_t> out;
  if (const auto it = cells_.find(key); it != cells_.end()) {
    out.assign(sorted_.begin() + it->second.begin, sorted_.begin() + it->second.end);
  }
  return out;
}

void UniformGridIndex::radius_neighbors(const Point3& center, double radius,
                                        std::vector<Neighbor>& out) const {
  out.clear();
  if (cells_.empty() || !(radius >= 0.0)) return;
  const double r2 = radius * radius;
  const auto& pts = *points_;

  auto scan = [&](const Range& range) {
    for (std::uint32_t k = range.begin; k < range.end; ++k) {
      const std::uint32_t i = sorted_[k];
      const double d2 = squared_distance(pts[i], center);
      if (d2 <= r2) out.push_back({i, std::sqrt(d2)});
    }
  };

  CellKey lo = cell_of(center - Vec3{radius, radius, radius});
  CellKey hi = cell_of(center + Vec3{radius, radius, radius});
  double span = 1.0;
  for (int a = 0; a < 3; ++a) {
    lo[a] = std::max(lo[a], min_cell_[a]);
    hi[a] = std::min(hi[a], max_cell_[a]);
    if (lo[a] > hi[a]) return;
    span *= static_cast<double>(hi[a]) - lo[a] + 1.0;
  }

  if (span > static_cast<double>(cells_.size())) {
    // Query box spans more cells than are occupied: walk the occupied ones.
    for (const auto& [key, range] : cells_) {
      if (key[0] >= lo[0] && key[0] <= hi[0] && key[1] >= lo[1] && key[1] <= hi[1] &&
          key[2] >= lo[2] && key[2] <= hi[2]) {
        scan(range);
      }
    }
  } else {
    for (std::int32_t cx = lo[0]; cx <= hi[0]; ++cx) {
      for (std::int32_t cy = lo[1]; cy <= hi[1]; ++cy) {
        for (std::int32_t cz = lo[2]; cz <= hi[2]; ++cz) {
          if (const auto it = cells_.find({cx, cy, cz}); it != cells_.end()) scan(it->second);
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), by_index);
}

void BruteForceSearch::radius_neighbors(const Point3& center, double radius,
                                        std::vector<Neighbor>& out) const {
  out.clear();
  if (!(radius >= 0.0)) return;
  const double r2 = radius * radius;
  const auto& pts = *points_;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double d2 = squared_distance(pts[i], center);
    if (d2 <= r2) out.push_back({i, std::sqrt(d2)});
  }
}

UniformGridIndex build_index(const PointCloud& cloud, double cell_size) {
  return UniformGridIndex(cloud, cell_size);
}

std::vector<Neighbor> brute_force_neighbors(const PointCloud& cloud, const Point3& center,
                                            double radius) {
  return BruteForceSearch(cloud).radius_neighbors(center, radius);
}

}  // namespace curbvote
