// Copyright 2026 The curbvote Authors
// SPDX-License-Identifier: Apache-2.0

#include "curbvote/dem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "curbvote/config.hpp"
#include "curbvote/errors.hpp"
#include "curbvote/tensor_voting.hpp"

namespace curbvote {
namespace {

double median(std::vector<double>& values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

/// Cell-size ratio that must be a positive integer.
std::size_t integer_ratio(double big, double small, const char* what) {
  const double ratio = big / small;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * ratio) {
    throw ArgumentError(std::string(what) + " must be an integer multiple of the height cell");
  }
  return static_cast<std::size_t>(rounded);
}

/// Median of the valid height cells grouped `factor` x `factor` into each output cell.
DemGrid aggregate(const DemGrid& fine, std::size_t factor) {
  const std::size_t cols = (fine.cols() + factor - 1) / factor;
  const std::size_t rows = (fine.rows() + factor - 1) / factor;
  DemGrid out(fine.origin_x(), fine.origin_y(), fine.cell_size() * factor, cols, rows);
  std::vector<double> heights;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      heights.clear();
      std::size_t samples = 0;
      for (std::size_t fr = r * factor; fr < std::min((r + 1) * factor, fine.rows()); ++fr) {
        for (std::size_t fc = c * factor; fc < std::min((c + 1) * factor, fine.cols()); ++fc) {
          const DemCell& cell = fine.at(fc, fr);
          if (!cell.valid) continue;
          heights.push_back(cell.height);
          samples += cell.samples;
        }
      }
      DemCell& cell = out.at(c, r);
      cell.samples = samples;
      if (!heights.empty()) {
        cell.height = median(heights);
        cell.valid = true;
      }
    }
  }
  return out;
}

/// Least-squares plane through valid neighbors (offsets in cells), evaluated
/// at the center; the mean when the neighbors are collinear.
std::optional<double> interpolate(const DemGrid& grid, const std::vector<char>& usable,
                                  std::size_t col, std::size_t row) {
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0, sh = 0, sxh = 0, syh = 0;
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      if (dx == 0 && dy == 0) continue;
      const long c = static_cast<long>(col) + dx;
      const long r = static_cast<long>(row) + dy;
      if (c < 0 || r < 0 || c >= static_cast<long>(grid.cols()) ||
          r >= static_cast<long>(grid.rows())) {
        continue;
      }
      const std::size_t k = static_cast<std::size_t>(r) * grid.cols() + static_cast<std::size_t>(c);
      if (!usable[k]) continue;
      const double h = grid.cells()[k].height;
      n += 1;
      sx += dx;
      sy += dy;
      sxx += dx * dx;
      sxy += dx * dy;
      syy += dy * dy;
      sh += h;
      sxh += dx * h;
      syh += dy * h;
    }
  }
  if (n < 2) return std::nullopt;
  // Normal equations for h = a + b*dx + c*dy; Cramer's rule for a.
  const double det = n * (sxx * syy - sxy * sxy) - sx * (sx * syy - sxy * sy) +
                     sy * (sx * sxy - sxx * sy);
  if (std::abs(det) < 1e-9) return sh / n;
  const double det_a = sh * (sxx * syy - sxy * sxy) - sx * (sxh * syy - sxy * syh) +
                       sy * (sxh * sxy - sxx * syh);
  return det_a / det;
}

}  // namespace

void GroundParams::validate() const {
  if (!(stick_fraction > 0.0) || stick_fraction > 1.0) {
    throw ArgumentError("ground stick fraction must lie in (0, 1]");
  }
  if (!(max_normal_angle_deg > 0.0) || !(max_normal_angle_deg < 90.0)) {
    throw ArgumentError("max normal angle must lie in (0, 90) degrees");
  }
  if (!(coarse_cell > 0.0) || !(refined_cell > 0.0) || !(height_cell > 0.0)) {
    throw ArgumentError("DEM cell sizes must be positive");
  }
  if (!(consistency > 0.0)) throw ArgumentError("DEM consistency threshold must be positive");
  if (min_samples == 0) throw ArgumentError("DEM min samples must be positive");
  integer_ratio(coarse_cell, height_cell, "coarse cell");
  integer_ratio(refined_cell, height_cell, "refined cell");
}

DemGrid::DemGrid(double origin_x, double origin_y, double cell_size, std::size_t cols,
                 std::size_t rows)
    : origin_x_(origin_x), origin_y_(origin_y), cell_size_(cell_size), cols_(cols), rows_(rows),
      cells_(cols * rows) {
  if (!(cell_size > 0.0)) throw ArgumentError("DEM cell size must be positive");
}

std::optional<std::pair<std::size_t, std::size_t>> DemGrid::locate(double x, double y) const {
  const double fx = std::floor((x - origin_x_) / cell_size_);
  const double fy = std::floor((y - origin_y_) / cell_size_);
  if (!(fx >= 0.0) || !(fy >= 0.0) || fx >= static_cast<double>(cols_) ||
      fy >= static_cast<double>(rows_)) {
    return std::nullopt;
  }
  return std::pair{static_cast<std::size_t>(fx), static_cast<std::size_t>(fy)};
}

std::size_t DemGrid::valid_count() const {
  return static_cast<std::size_t>(
      std::count_if(cells_.begin(), cells_.end(), [](const DemCell& c) { return c.valid; }));
}

void DemGrid::write_esri_ascii(std::ostream& out, double nodata) const {
  out << "ncols " << cols_ << "\nnrows " << rows_ << "\nxllcorner " << format_double(origin_x_)
      << "\nyllcorner " << format_double(origin_y_) << "\ncellsize " << format_double(cell_size_)
      << "\nNODATA_value " << format_double(nodata) << '\n';
  for (std::size_t r = rows_; r-- > 0;) {
    for (std::size_t c = 0; c < cols_; ++c) {
      const DemCell& cell = at(c, r);
      if (c > 0) out << ' ';
      out << format_double(cell.valid ? cell.height : nodata);
    }
    out << '\n';
  }
}

std::vector<std::size_t> extract_ground_candidates(const PointCloud& cloud,
                                                   const GroundParams& params) {
  params.validate();
  const auto& stick = cloud.channel(channels::kStick);
  const auto& nx = cloud.channel(channels::kNx);
  const auto& ny = cloud.channel(channels::kNy);
  const auto& nz = cloud.channel(channels::kNz);
  std::vector<std::size_t> out;
  if (cloud.empty()) return out;
  const double max_stick = *std::max_element(stick.begin(), stick.end());
  if (!(max_stick > 0.0)) return out;
  const double stick_floor = params.stick_fraction * max_stick;
  const double cos_max = std::cos(params.max_normal_angle_deg * std::numbers::pi / 180.0);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (stick[i] < stick_floor) continue;
    // Fold the normal onto the upper hemisphere, then compare cos(angle to z).
    const double len = std::sqrt(nx[i] * nx[i] + ny[i] * ny[i] + nz[i] * nz[i]);
    if (!(len > 0.0)) continue;
    if (std::abs(nz[i]) / len >= cos_max) out.push_back(i);
  }
  return out;
}

DemGrid build_height_grid(const PointCloud& cloud, std::span<const std::size_t> candidates,
                          double cell, std::size_t min_samples, double alignment) {
  if (!(cell > 0.0) || !(alignment > 0.0)) throw ArgumentError("cell sizes must be positive");
  if (candidates.empty()) throw EmptyInputError("no ground candidates for the height grid");
  double min_x = std::numeric_limits<double>::infinity();
  double min_y = min_x;
  double max_x = -min_x;
  double max_y = -min_x;
  for (std::size_t i : candidates) {
    const Point3& p = cloud[i];
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  }
  const double ox = std::floor(min_x / alignment) * alignment;
  const double oy = std::floor(min_y / alignment) * alignment;
  const auto cols = static_cast<std::size_t>(std::floor((max_x - ox) / cell)) + 1;
  const auto rows = static_cast<std::size_t>(std::floor((max_y - oy) / cell)) + 1;
  DemGrid grid(ox, oy, cell, cols, rows);

  // Samples sorted by point index per cell before taking the median.
  std::vector<std::size_t> sorted(candidates.begin(), candidates.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::vector<double>> samples(cols * rows);
  for (std::size_t i : sorted) {
    const auto loc = grid.locate(cloud[i].x, cloud[i].y);
    if (!loc) continue;
    samples[loc->second * cols + loc->first].push_back(cloud[i].z);
  }
  for (std::size_t k = 0; k < samples.size(); ++k) {
    DemCell& c = grid.at(k % cols, k / cols);
    c.samples = samples[k].size();
    if (c.samples > 0) c.height = median(samples[k]);
    c.valid = c.samples >= min_samples && c.samples > 0;
  }
  return grid;
}

RefinedDem refine_dem(const DemGrid& height_grid, double coarse_cell, double refined_cell,
                      double consistency) {
  if (!(consistency > 0.0)) throw ArgumentError("consistency threshold must be positive");
  const std::size_t coarse_factor =
      integer_ratio(coarse_cell, height_grid.cell_size(), "coarse cell");
  const std::size_t refined_factor =
      integer_ratio(refined_cell, height_grid.cell_size(), "refined cell");

  RefinedDem out{aggregate(height_grid, coarse_factor), aggregate(height_grid, refined_factor)};
  DemGrid& refined = out.refined;
  const DemGrid& coarse = out.coarse;

  auto coarse_height = [&](std::size_t col, std::size_t row) -> std::optional<double> {
    const auto loc = coarse.locate(refined.cell_center_x(col), refined.cell_center_y(row));
    if (!loc) return std::nullopt;
    const DemCell& c = coarse.at(loc->first, loc->second);
    return c.valid ? std::optional<double>(c.height) : std::nullopt;
  };

  const std::size_t n = refined.cols() * refined.rows();
  std::vector<char> rejected(n, 0);
  for (std::size_t r = 0; r < refined.rows(); ++r) {
    for (std::size_t c = 0; c < refined.cols(); ++c) {
      DemCell& cell = refined.at(c, r);
      if (!cell.valid) continue;
      const auto reference = coarse_height(c, r);
      if (!reference || std::abs(cell.height - *reference) > consistency) {
        cell.valid = false;
        rejected[r * refined.cols() + c] = 1;
      }
    }
  }

  // Refill from the surviving cells only, so fills never cascade.
  std::vector<char> usable(n);
  for (std::size_t k = 0; k < n; ++k) usable[k] = refined.cells()[k].valid ? 1 : 0;
  for (std::size_t r = 0; r < refined.rows(); ++r) {
    for (std::size_t c = 0; c < refined.cols(); ++c) {
      if (!rejected[r * refined.cols() + c]) continue;
      const auto fill = interpolate(refined, usable, c, r);
      const auto reference = coarse_height(c, r);
      if (!fill || !reference || std::abs(*fill - *reference) > consistency) continue;
      DemCell& cell = refined.at(c, r);
      cell.height = *fill;
      cell.valid = true;
      cell.filled = true;
    }
  }
  return out;
}

std::optional<double> ground_height_at(const DemGrid& dem, double x, double y) {
  const auto loc = dem.locate(x, y);
  if (!loc) return std::nullopt;
  const DemCell& c = dem.at(loc->first, loc->second);
  if (!c.valid) return std::nullopt;
  return c.height;
}

std::optional<double> nearest_ground_height(const DemGrid& dem, double x, double y) {
  if (auto h = ground_height_at(dem, x, y)) return h;
  if (dem.cols() == 0 || dem.rows() == 0) return std::nullopt;
  const double fx = std::floor((x - dem.origin_x()) / dem.cell_size());
  const double fy = std::floor((y - dem.origin_y()) / dem.cell_size());
  const auto cols = static_cast<double>(dem.cols());
  const auto rows = static_cast<double>(dem.rows());
  if (!(fx >= -1.0 && fx <= cols && fy >= -1.0 && fy <= rows)) return std::nullopt;
  std::optional<double> best;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (double r = fy - 1.0; r <= fy + 1.0; r += 1.0) {
    for (double c = fx - 1.0; c <= fx + 1.0; c += 1.0) {
      if (c < 0.0 || r < 0.0 || c >= cols || r >= rows) continue;
      const auto col = static_cast<std::size_t>(c);
      const auto row = static_cast<std::size_t>(r);
      const DemCell& cell = dem.at(col, row);
      if (!cell.valid) continue;
      const double dx = dem.cell_center_x(col) - x;
      const double dy = dem.cell_center_y(row) - y;
      const double d2 = dx * dx + dy * dy;
      if (d2 < best_d2) {
        best_d2 = d2;
        best = cell.height;
      }
    }
  }
  return best;
}

Dem build_dem(const PointCloud& cloud, const GroundParams& params) {
  params.validate();
  Dem dem;
  dem.ground_candidates = extract_ground_candidates(cloud, params);
  dem.height_grid = build_height_grid(cloud, dem.ground_candidates, params.height_cell,
                                      params.min_samples, params.coarse_cell);
  auto refined = refine_dem(dem.height_grid, params.coarse_cell, params.refined_cell,
                            params.consistency);
  dem.coarse = std::move(refined.coarse);
  dem.refined = std::move(refined.refined);
  return dem;
}

}  // namespace curbvote
