// Copyright 2026 The curbvote Authors
// SPDX-License-Identifier: Apache-2.0

#include "curbvote/point_cloud.hpp"

#include <algorithm>
#include <utility>

#include "curbvote/errors.hpp"

namespace curbvote {

CropBox::CropBox(const Point3& min, const Point3& max) : bounds_{min, max} {
  if (!is_finite(min) || !is_finite(max) || !(min.x < max.x) || !(min.y < max.y) ||
      !(min.z < max.z)) {
    throw ArgumentError("crop box needs finite corners with min < max on every axis");
  }
}

PointCloud::PointCloud(std::vector<Point3> points) : points_(std::move(points)) {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!is_finite(points_[i])) {
      throw ArgumentError("point " + std::to_string(i) + " has a non-finite coordinate");
    }
  }
}

bool PointCloud::has_channel(std::string_view name) const {
  return std::any_of(channels_.begin(), channels_.end(),
                     [&](const Channel& c) { return c.name == name; });
}

const std::vector<double>& PointCloud::channel(std::string_view name) const {
  for (const auto& c : channels_) {
    if (c.name == name) return c.values;
  }
  throw ChannelMissingError(std::string(name));
}

void PointCloud::add_channel(std::string name, std::vector<double> values) {
  if (name.empty()) throw ArgumentError("channel name must not be empty");
  if (has_channel(name)) throw ArgumentError("duplicate channel '" + name + "'");
  if (values.size() != points_.size()) {
    throw ArgumentError("channel '" + name + "' has " + std::to_string(values.size()) +
                        " values for " + std::to_string(points_.size()) + " points");
  }
  channels_.push_back({std::move(name), std::move(values)});
}

void PointCloud::set_channel(std::string name, std::vector<double> values) {
  for (auto& c : channels_) {
    if (c.name == name) {
      if (values.size() != points_.size()) {
        throw ArgumentError("channel '" + name + "' length mismatch");
      }
      c.values = std::move(values);
      return;
    }
  }
  add_channel(std::move(name), std::move(values));
}

PointCloud PointCloud::subset(std::span<const std::size_t> indices) const {
  PointCloud out;
  out.points_.reserve(indices.size());
  for (std::size_t i : indices) out.points_.push_back(points_.at(i));
  for (const auto& c : channels_) {
    std::vector<double> values;
    values.reserve(indices.size());
    for (std::size_t i : indices) values.push_back(c.values[i]);
    out.channels_.push_back({c.name, std::move(values)});
  }
  return out;
}

std::optional<Aabb> PointCloud::bounds() const {
  if (points_.empty()) return std::nullopt;
  Aabb box{points_.front(), points_.front()};
  for (const auto& p : points_) {
    box.min.x = std::min(box.min.x, p.x);
    box.min.y = std::min(box.min.y, p.y);
    box.min.z = std::min(box.min.z, p.z);
    box.max.x = std::max(box.max.x, p.x);
    box.max.y = std::max(box.max.y, p.y);
    box.max.z = std::max(box.max.z, p.z);
  }
  return box;
}

PointCloud crop(const PointCloud& cloud, const CropBox& box) {
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (box.contains(cloud[i])) kept.push_back(i);
  }
  return cloud.subset(kept);
}

}  // namespace curbvote
