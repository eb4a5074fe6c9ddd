// Copyright 2026 The curbvote Authors
// SPDX-License-Identifier: Apache-2.0

#include "curbvote/semantic_grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <iterator>
#include <limits>
#include <ostream>
#include <sstream>

#include "curbvote/errors.hpp"

namespace curbvote {
namespace {

constexpr char kMagic[4] = {'S', 'G', 'R', 'D'};

template <typename T>
void put_le(std::string& buf, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  const U bits = std::bit_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    buf.push_back(static_cast<char>((bits >> (8 * i)) & 0xFFu));
  }
}

template <typename T>
T get_le(std::string_view bytes, std::size_t offset) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bits |= static_cast<U>(static_cast<unsigned char>(bytes[offset + i])) << (8 * i);
  }
  return std::bit_cast<T>(bits);
}

}  // namespace

std::string_view label_name(SemanticLabel label) {
  switch (label) {
    case SemanticLabel::RoadCurb: return "road_curb";
    case SemanticLabel::Obstacle: return "obstacle";
    case SemanticLabel::WallVehicle: return "wall_vehicle";
    case SemanticLabel::Road: return "road";
    case SemanticLabel::Unknown: return "unknown";
  }
  return "unknown";
}

std::string_view color_name(SemanticLabel label) {
  switch (label) {
    case SemanticLabel::RoadCurb: return "Green";
    case SemanticLabel::Obstacle: return "Black";
    case SemanticLabel::WallVehicle: return "Red";
    case SemanticLabel::Road: return "Gray";
    case SemanticLabel::Unknown: return "DarkGreen";
  }
  return "DarkGreen";
}

Rgb label_color(SemanticLabel label) {
  switch (label) {
    case SemanticLabel::RoadCurb: return {0, 128, 0};
    case SemanticLabel::Obstacle: return {0, 0, 0};
    case SemanticLabel::WallVehicle: return {255, 0, 0};
    case SemanticLabel::Road: return {128, 128, 128};
    case SemanticLabel::Unknown: return {0, 64, 0};
  }
  return {0, 64, 0};
}

Traversability traversability(SemanticLabel label) {
  switch (label) {
    case SemanticLabel::RoadCurb: return Traversability::CertainConditions;
    case SemanticLabel::Obstacle:
    case SemanticLabel::WallVehicle: return Traversability::No;
    case SemanticLabel::Road:
    case SemanticLabel::Unknown: return Traversability::Yes;
  }
  return Traversability::No;
}

void ClassifyParams::validate() const {
  if (!(cell_size > 0.0) || !std::isfinite(cell_size)) {
    throw ArgumentError("grid cell size must be positive");
  }
  if (min_points == 0) throw ArgumentError("min points must be positive");
  if (!(robot_height > 0.0)) throw ArgumentError("robot height must be positive");
  if (wall_point_threshold == 0) throw ArgumentError("wall point threshold must be positive");
  if (!(road_tolerance > 0.0) || !(road_tolerance < robot_height)) {
    throw ArgumentError("road tolerance must lie in (0, robot height)");
  }
}

GridExtent GridExtent::covering(const Aabb& bounds, double cell_size) {
  if (!(cell_size > 0.0)) throw ArgumentError("grid cell size must be positive");
  GridExtent e;
  e.origin_x = bounds.min.x;
  e.origin_y = bounds.min.y;
  e.cell_size = cell_size;
  e.cols = static_cast<std::uint32_t>(
      std::max(1.0, std::ceil((bounds.max.x - bounds.min.x) / cell_size - 1e-9)));
  e.rows = static_cast<std::uint32_t>(
      std::max(1.0, std::ceil((bounds.max.y - bounds.min.y) / cell_size - 1e-9)));
  return e;
}

SemanticGrid::SemanticGrid(const GridExtent& extent)
    : extent_(extent), cells_(static_cast<std::size_t>(extent.cols) * extent.rows) {
  if (!(extent.cell_size > 0.0)) throw ArgumentError("grid cell size must be positive");
}

std::optional<std::pair<std::size_t, std::size_t>> SemanticGrid::locate(double x, double y) const {
  const double fx = std::floor((x - extent_.origin_x) / extent_.cell_size);
  const double fy = std::floor((y - extent_.origin_y) / extent_.cell_size);
  // Points exactly on (or a rounding error past) the far edge join the last cell.
  const double far_x = extent_.origin_x + extent_.cols * extent_.cell_size;
  const double far_y = extent_.origin_y + extent_.rows * extent_.cell_size;
  if (!(fx >= 0.0) || !(fy >= 0.0) || x > far_x + 1e-9 || y > far_y + 1e-9) return std::nullopt;
  return std::pair{std::min<std::size_t>(static_cast<std::size_t>(fx), cols() - 1),
                   std::min<std::size_t>(static_cast<std::size_t>(fy), rows() - 1)};
}

std::size_t SemanticGrid::count(SemanticLabel label) const {
  return static_cast<std::size_t>(std::count_if(
      cells_.begin(), cells_.end(), [&](const GridCell& c) { return c.label == label; }));
}

SemanticGrid classify_cells(const PointCloud& cloud, const DemGrid& dem,
                            std::span<const std::size_t> curb_indices,
                            std::span<const std::size_t> ground_candidates,
                            const ClassifyParams& params,
                            const std::optional<GridExtent>& extent) {
  params.validate();
  const auto bounds = cloud.bounds();
  if (!bounds && !extent) throw EmptyInputError("cannot size a grid for an empty cloud");

  if (bounds) {
    const double dem_x1 = dem.origin_x() + dem.cols() * dem.cell_size();
    const double dem_y1 = dem.origin_y() + dem.rows() * dem.cell_size();
    if (dem.cols() == 0 || dem.rows() == 0 || bounds->max.x < dem.origin_x() ||
        bounds->min.x > dem_x1 || bounds->max.y < dem.origin_y() || bounds->min.y > dem_y1) {
      throw FrameMismatchError("point cloud and DEM do not overlap");
    }
  }

  SemanticGrid grid(extent ? *extent : GridExtent::covering(*bounds, params.cell_size));
  const std::size_t cells = grid.cols() * grid.rows();
  std::vector<std::uint32_t> curb_count(cells, 0), ground_count(cells, 0), high_count(cells, 0);
  std::vector<double> max_height(cells, std::numeric_limits<double>::quiet_NaN());
  std::vector<std::size_t> cell_of(cloud.size(), cells);

  // Binning pass.
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Point3& p = cloud[i];
    const auto loc = grid.locate(p.x, p.y);
    if (!loc) continue;
    const std::size_t k = loc->second * grid.cols() + loc->first;
    cell_of[i] = k;
    GridCell& cell = grid.at(loc->first, loc->second);
    ++cell.point_count;
    const auto ground = nearest_ground_height(dem, p.x, p.y);
    if (!ground) continue;
    const double above = p.z - *ground;
    if (above > params.robot_height) {
      ++high_count[k];
    } else if (std::isnan(max_height[k]) || above > max_height[k]) {
      max_height[k] = above;
    }
  }
  for (std::size_t i : curb_indices) {
    if (i < cell_of.size() && cell_of[i] < cells) ++curb_count[cell_of[i]];
  }
  for (std::size_t i : ground_candidates) {
    if (i < cell_of.size() && cell_of[i] < cells) ++ground_count[cell_of[i]];
  }

  for (std::size_t k = 0; k < cells; ++k) {
    GridCell& cell = grid.at(k % grid.cols(), k / grid.cols());
    cell.max_height_above_dem = max_height[k];
    const double h = max_height[k];
    SemanticLabel label = SemanticLabel::Unknown;
    if (cell.point_count < params.min_points) {
      label = SemanticLabel::Unknown;
    } else if (curb_count[k] >= 1) {
      label = SemanticLabel::RoadCurb;
    } else if (high_count[k] > params.wall_point_threshold) {
      label = SemanticLabel::WallVehicle;
    } else if (h > params.road_tolerance && h <= params.robot_height) {
      label = SemanticLabel::Obstacle;
    } else if (2 * ground_count[k] > cell.point_count && h <= params.road_tolerance) {
      label = SemanticLabel::Road;
    }
    cell.label = label;
  }
  return grid;
}

void render_raster(std::ostream& out, const SemanticGrid& grid) {
  out << "P6\n" << grid.cols() << ' ' << grid.rows() << "\n255\n";
  std::string row(grid.cols() * 3, '\0');
  for (std::size_t r = grid.rows(); r-- > 0;) {
    for (std::size_t c = 0; c < grid.cols(); ++c) {
      const Rgb rgb = label_color(grid.at(c, r).label);
      row[3 * c] = static_cast<char>(rgb.r);
      row[3 * c + 1] = static_cast<char>(rgb.g);
      row[3 * c + 2] = static_cast<char>(rgb.b);
    }
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
}

std::string render_raster(const SemanticGrid& grid) {
  std::ostringstream out;
  render_raster(out, grid);
  return out.str();
}

std::string write_compact(const SemanticGrid& grid) {
  std::string buf;
  buf.reserve(kCompactHeaderSize + grid.cols() * grid.rows());
  buf.append(kMagic, 4);
  put_le(buf, grid.origin_x());
  put_le(buf, grid.origin_y());
  put_le(buf, grid.cell_size());
  put_le(buf, static_cast<std::uint32_t>(grid.rows()));
  put_le(buf, static_cast<std::uint32_t>(grid.cols()));
  for (const GridCell& c : grid.cells()) buf.push_back(static_cast<char>(c.label));
  return buf;
}

void write_compact(std::ostream& out, const SemanticGrid& grid) {
  const std::string buf = write_compact(grid);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

SemanticGrid read_compact(std::string_view bytes) {
  if (bytes.size() < kCompactHeaderSize) throw FormatError("compact grid shorter than its header");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("bad compact grid magic");
  GridExtent e;
  e.origin_x = get_le<double>(bytes, 4);
  e.origin_y = get_le<double>(bytes, 12);
  e.cell_size = get_le<double>(bytes, 20);
  e.rows = get_le<std::uint32_t>(bytes, 28);
  e.cols = get_le<std::uint32_t>(bytes, 32);
  if (!(e.cell_size > 0.0) || !std::isfinite(e.origin_x) || !std::isfinite(e.origin_y)) {
    throw FormatError("compact grid header holds an invalid geometry");
  }
  const std::size_t cells = static_cast<std::size_t>(e.rows) * e.cols;
  if (bytes.size() != kCompactHeaderSize + cells) {
    throw FormatError("compact grid body holds " + std::to_string(bytes.size() - kCompactHeaderSize) +
                      " bytes for " + std::to_string(cells) + " cells");
  }
  SemanticGrid grid(e);
  for (std::size_t k = 0; k < cells; ++k) {
    const auto code = static_cast<unsigned char>(bytes[kCompactHeaderSize + k]);
    if (code > static_cast<unsigned char>(SemanticLabel::Unknown)) {
      throw FormatError("unknown label code " + std::to_string(code));
    }
    GridCell& cell = grid.at(k % e.cols, k / e.cols);
    cell.label = static_cast<SemanticLabel>(code);
    cell.max_height_above_dem = std::numeric_limits<double>::quiet_NaN();
  }
  return grid;
}

SemanticGrid read_compact(std::istream& in) {
  const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return read_compact(std::string_view(bytes));
}

}  // namespace curbvote
