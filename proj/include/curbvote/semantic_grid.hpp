// Copyright 2026 The curbvote Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "curbvote/dem.hpp"
#include "curbvote/point_cloud.hpp"

namespace curbvote {

/// Cell semantics. The numeric values are the on-disk codes of the compact format.
enum class SemanticLabel : std::uint8_t {
  RoadCurb = 0,
  Obstacle = 1,
  WallVehicle = 2,
  Road = 3,
  Unknown = 4,
};

inline constexpr std::array<SemanticLabel, 5> kAllLabels = {
    SemanticLabel::RoadCurb, SemanticLabel::Obstacle, SemanticLabel::WallVehicle,
    SemanticLabel::Road, SemanticLabel::Unknown};

enum class Traversability { CertainConditions, No, Yes };

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

std::string_view label_name(SemanticLabel label);
/// Display color name: Green, Black, Red, Gray, DarkGreen.
std::string_view color_name(SemanticLabel label);
Rgb label_color(SemanticLabel label);
Traversability traversability(SemanticLabel label);

struct ClassifyParams {
  double cell_size = 0.12;
  /// Cells with fewer points are Unknown.
  std::size_t min_points = 3;
  /// Robot (UGV) height.
  double robot_height = 1.0;
  /// More points than this above DEM + robot_height make a wall or vehicle.
  std::size_t wall_point_threshold = 10;
  double road_tolerance = 0.1;

  void validate() const;

  friend bool operator==(const ClassifyParams&, const ClassifyParams&) = default;
};

struct GridCell {
  SemanticLabel label = SemanticLabel::Unknown;
  std::uint32_t point_count = 0;
  /// Highest point at or below robot height, relative to the DEM. NaN if none.
  double max_height_above_dem = std::numeric_limits<double>::quiet_NaN();
};

/// Placement of a grid in the x-y plane.
struct GridExtent {
  double origin_x = 0.0;
  double origin_y = 0.0;
  double cell_size = 0.12;
  std::uint32_t cols = 0;
  std::uint32_t rows = 0;

  /// Smallest grid anchored at the bounds' minimum corner that covers them.
  static GridExtent covering(const Aabb& bounds, double cell_size);
};

class SemanticGrid {
 public:
  SemanticGrid() = default;
  explicit SemanticGrid(const GridExtent& extent);

  const GridExtent& extent() const noexcept { return extent_; }
  double origin_x() const noexcept { return extent_.origin_x; }
  double origin_y() const noexcept { return extent_.origin_y; }
  double cell_size() const noexcept { return extent_.cell_size; }
  std::size_t cols() const noexcept { return extent_.cols; }
  std::size_t rows() const noexcept { return extent_.rows; }

  GridCell& at(std::size_t col, std::size_t row) { return cells_[row * cols() + col]; }
  const GridCell& at(std::size_t col, std::size_t row) const { return cells_[row * cols() + col]; }
  const std::vector<GridCell>& cells() const noexcept { return cells_; }

  /// Cell containing (x, y), with points on the far edge clamped into the last cell.
  std::optional<std::pair<std::size_t, std::size_t>> locate(double x, double y) const;

  std::size_t count(SemanticLabel label) const;

 private:
  GridExtent extent_;
  std::vector<GridCell> cells_;
};

/// Labels every cell; the first matching rule wins:
///   1. Unknown      fewer than min_points points
///   2. RoadCurb     at least one detected curb point
///   3. WallVehicle  more than wall_point_threshold points above DEM + robot_height
///   4. Obstacle     max height above DEM in (road_tolerance, robot_height]
///   5. Road         ground candidates are the majority and max height <= road_tolerance
///   otherwise       Unknown
/// Heights are measured against nearest_ground_height at each point; points
/// with no ground height nearby do not contribute to rules 3-5.
///
/// The extent defaults to the cloud's bounds. Throws FrameMismatchError when
/// the cloud and the DEM do not overlap in x-y.
SemanticGrid classify_cells(const PointCloud& cloud, const DemGrid& dem,
                            std::span<const std::size_t> curb_indices,
                            std::span<const std::size_t> ground_candidates,
                            const ClassifyParams& params,
                            const std::optional<GridExtent>& extent = std::nullopt);

/// Binary P6 pixmap, one pixel per cell, northernmost row first.
void render_raster(std::ostream& out, const SemanticGrid& grid);
std::string render_raster(const SemanticGrid& grid);

/// Compact label format (little-endian):
///   bytes 0-3   magic "SGRD" (identifies format version 1)
///   bytes 4-19  origin x, origin y (float64)
///   bytes 20-27 cell size (float64)
///   bytes 28-31 rows (uint32)
///   bytes 32-35 cols (uint32)
///   then rows * cols label codes, one byte each, row 0 (southernmost) first.
inline constexpr std::size_t kCompactHeaderSize = 36;

void write_compact(std::ostream& out, const SemanticGrid& grid);
std::string write_compact(const SemanticGrid& grid);
/// Throws FormatError on a bad magic, a truncated body or an unknown label code.
SemanticGrid read_compact(std::istream& in);
SemanticGrid read_compact(std::string_view bytes);

}  // namespace curbvote
