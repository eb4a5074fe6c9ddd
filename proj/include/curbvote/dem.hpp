// Copyright 2026 The curbvote Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "curbvote/point_cloud.hpp"

namespace curbvote {

struct GroundParams {
  /// Ground points need stick >= stick_fraction * max(stick).
  double stick_fraction = 0.5;
  /// Largest admitted angle between the (sign-folded) normal and +z.
  double max_normal_angle_deg = 15.0;
  double coarse_cell = 10.0;
  double refined_cell = 1.0;
  /// Cell size of the height grid that collects ground samples.
  double height_cell = 0.5;
  /// Refined cells further than this from their coarse cell are rejected.
  double consistency = 0.3;
  std::size_t min_samples = 3;

  void validate() const;

  friend bool operator==(const GroundParams&, const GroundParams&) = default;
};

struct DemCell {
  double height = 0.0;
  std::size_t samples = 0;
  bool valid = false;
  /// Set when refinement replaced the height by interpolation.
  bool filled = false;
};

/// Regular 2D height field. Column index grows with x, row index with y.
class DemGrid {
 public:
  DemGrid() = default;
  DemGrid(double origin_x, double origin_y, double cell_size, std::size_t cols,
          std::size_t rows);

  double origin_x() const noexcept { return origin_x_; }
  double origin_y() const noexcept { return origin_y_; }
  double cell_size() const noexcept { return cell_size_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t rows() const noexcept { return rows_; }

  DemCell& at(std::size_t col, std::size_t row) { return cells_[row * cols_ + col]; }
  const DemCell& at(std::size_t col, std::size_t row) const { return cells_[row * cols_ + col]; }
  const std::vector<DemCell>& cells() const noexcept { return cells_; }

  /// Cell containing (x, y); empty outside the grid. Cells are half-open.
  std::optional<std::pair<std::size_t, std::size_t>> locate(double x, double y) const;
  double cell_center_x(std::size_t col) const { return origin_x_ + (col + 0.5) * cell_size_; }
  double cell_center_y(std::size_t row) const { return origin_y_ + (row + 0.5) * cell_size_; }

  std::size_t valid_count() const;

  /// ESRI ASCII grid: ncols, nrows, xllcorner, yllcorner, cellsize,
  /// NODATA_value, then heights with the northernmost row first.
  void write_esri_ascii(std::ostream& out, double nodata = -9999.0) const;

 private:
  double origin_x_ = 0.0;
  double origin_y_ = 0.0;
  double cell_size_ = 1.0;
  std::size_t cols_ = 0;
  std::size_t rows_ = 0;
  std::vector<DemCell> cells_;
};

/// Points that look like ground: strong stick saliency and a normal within
/// max_normal_angle_deg of vertical. Requires channels stick, nx, ny, nz.
std::vector<std::size_t> extract_ground_candidates(const PointCloud& cloud,
                                                   const GroundParams& params);

/// Median height of the candidate points per cell. The grid origin is the
/// candidates' minimum (x, y) snapped down to a multiple of `alignment`, so
/// grids built with a shared alignment nest cleanly. Cells with fewer than
/// `min_samples` samples stay invalid. Throws EmptyInputError when there are
/// no candidates.
DemGrid build_height_grid(const PointCloud& cloud, std::span<const std::size_t> candidates,
                          double cell, std::size_t min_samples, double alignment);

/// Outputs of the two-stage refinement.
struct RefinedDem {
  DemGrid coarse;
  DemGrid refined;
};

/// Aggregates the height grid into coarse and refined grids (median of the
/// valid height cells each one covers), invalidates refined cells that deviate
/// from their coarse cell by more than `consistency`, and refills an
/// invalidated cell from a least-squares plane through its valid 8-neighbors
/// when at least two exist and the refilled height is itself consistent.
///
/// Both cell sizes must be integer multiples of the height grid's cell size.
RefinedDem refine_dem(const DemGrid& height_grid, double coarse_cell, double refined_cell,
                      double consistency);

/// Height of the enclosing cell if it is valid.
std::optional<double> ground_height_at(const DemGrid& dem, double x, double y);

/// Like ground_height_at, but falls back to the nearest valid cell among the
/// 3x3 block around (x, y) when the enclosing cell is invalid or (x, y) lies
/// within one cell outside the grid. Ties go to the lower row, then column.
std::optional<double> nearest_ground_height(const DemGrid& dem, double x, double y);

/// Every DEM layer the pipeline produces.
struct Dem {
  std::vector<std::size_t> ground_candidates;
  DemGrid height_grid;
  DemGrid coarse;
  DemGrid refined;
};

/// extract_ground_candidates -> build_height_grid -> refine_dem.
Dem build_dem(const PointCloud& cloud, const GroundParams& params);

}  // namespace curbvote
