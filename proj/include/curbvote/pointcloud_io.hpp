// Copyright 2026 The curbvote Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "curbvote/point_cloud.hpp"

namespace curbvote {

/// Supported on-disk encodings. Both are ASCII.
///
/// PCD-ASCII follows the PCL v0.7 header (VERSION, FIELDS, SIZE, TYPE, COUNT,
/// WIDTH, HEIGHT, VIEWPOINT, POINTS, DATA ascii, in that order). Fields other
/// than x, y and z become channels.
///
/// XYZ-text holds one `x y z [extra...]` row per line. Lines starting with '#'
/// are comments; a leading `# x y z name...` comment names the extra columns,
/// otherwise they are called `col3`, `col4`, ...
enum class CloudFormat { PcdAscii, XyzText };

CloudFormat parse_cloud_format(std::string_view name);
std::string_view to_string(CloudFormat format);
/// ".pcd" maps to PcdAscii; anything else to XyzText.
CloudFormat format_from_extension(const std::filesystem::path& path);

/// Rows that parsed but carried a non-finite coordinate are dropped and listed here.
struct ParseSummary {
  std::size_t rows = 0;
  std::size_t rejected = 0;
  std::vector<std::size_t> rejected_lines;
};

struct ParsedCloud {
  PointCloud cloud;
  ParseSummary summary;
};

ParsedCloud parse_cloud(std::istream& in, CloudFormat format);
ParsedCloud parse_cloud(std::string_view text, CloudFormat format);
ParsedCloud read_cloud_file(const std::filesystem::path& path, CloudFormat format);

/// Values are written in shortest round-trip decimal form, so parsing the
/// output reproduces every coordinate and channel value exactly.
void write_cloud(std::ostream& out, const PointCloud& cloud, CloudFormat format);
std::string write_cloud(const PointCloud& cloud, CloudFormat format);
void write_cloud_file(const std::filesystem::path& path, const PointCloud& cloud,
                      CloudFormat format);

}  // namespace curbvote
