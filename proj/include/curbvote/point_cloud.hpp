// Copyright 2026 The curbvote Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "curbvote/geometry.hpp"

namespace curbvote {

/// A named per-point scalar sequence.
struct Channel {
  std::string name;
  std::vector<double> values;

  friend bool operator==(const Channel&, const Channel&) = default;
};

/// Axis-aligned bounds, inclusive on both ends.
struct Aabb {
  Point3 min;
  Point3 max;

  bool contains(const Point3& p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y && p.z >= min.z &&
           p.z <= max.z;
  }

  friend bool operator==(const Aabb&, const Aabb&) = default;
};

/// Crop region. Construction enforces min < max on every axis.
class CropBox {
 public:
  CropBox(const Point3& min, const Point3& max);

  const Point3& min() const noexcept { return bounds_.min; }
  const Point3& max() const noexcept { return bounds_.max; }
  bool contains(const Point3& p) const { return bounds_.contains(p); }

 private:
  Aabb bounds_;
};

/// Ordered finite points plus any number of uniquely named channels, each
/// holding exactly one value per point.
class PointCloud {
 public:
  PointCloud() = default;
  explicit PointCloud(std::vector<Point3> points);

  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }

  const std::vector<Point3>& points() const noexcept { return points_; }
  const Point3& operator[](std::size_t i) const { return points_[i]; }

  const std::vector<Channel>& channels() const noexcept { return channels_; }
  bool has_channel(std::string_view name) const;
  /// Throws ChannelMissingError if absent.
  const std::vector<double>& channel(std::string_view name) const;

  /// Throws ArgumentError on duplicate name or length mismatch.
  void add_channel(std::string name, std::vector<double> values);
  /// Replaces an existing channel or appends a new one.
  void set_channel(std::string name, std::vector<double> values);

  /// Points (and channel values) at the given indices, in the given order.
  PointCloud subset(std::span<const std::size_t> indices) const;

  std::optional<Aabb> bounds() const;

  friend bool operator==(const PointCloud&, const PointCloud&) = default;

 private:
  std::vector<Point3> points_;
  std::vector<Channel> channels_;
};

/// Keeps exactly the points inside the box (inclusive), preserving order.
PointCloud crop(const PointCloud& cloud, const CropBox& box);

}  // namespace curbvote
