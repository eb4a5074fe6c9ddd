// Copyright 2026 The curbvote Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "curbvote/dem.hpp"
#include "curbvote/errors.hpp"
#include "curbvote/scene.hpp"
#include "curbvote/tensor_voting.hpp"
#include "oracles.hpp"

namespace curbvote {
namespace {

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

/// Lattice plane through the origin whose normal is tilted by `deg` from +z
/// towards +x.
PointCloud tilted_plane(double deg, double half, double spacing) {
  const double a = deg * std::numbers::pi / 180.0;
  std::vector<Point3> pts;
  for (double u = -half; u <= half; u += spacing) {
    for (double v = -half; v <= half; v += spacing) {
      pts.push_back({u * std::cos(a), v, u * std::sin(a)});
    }
  }
  return PointCloud(pts);
}

DemGrid flat_height_grid(std::size_t cols, std::size_t rows, double height) {
  DemGrid g(0.0, 0.0, 0.5, cols, rows);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) g.at(c, r) = {height, 5, true, false};
  }
  return g;
}

TEST(GroundCandidates, HorizontalPlaneSelected) {
  const auto field = saliency_field(oracle::noisy_disc(8000, 3.0, 0.01, 1), VotingParams{});
  const auto cands = extract_ground_candidates(field, GroundParams{});
  std::size_t interior = 0;
  std::size_t selected = 0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < field.size(); ++i) {
    while (k < cands.size() && cands[k] < i) ++k;
    if (std::hypot(field[i].x, field[i].y) > 3.0 - VotingParams{}.cutoff_radius) continue;
    ++interior;
    if (k < cands.size() && cands[k] == i) ++selected;
  }
  EXPECT_GE(selected, 0.95 * interior);
}

TEST(GroundCandidates, WallRejected) {
  const auto plane = tilted_plane(90.0, 2.0, 0.08);
  const auto field = saliency_field(plane, VotingParams{});
  EXPECT_TRUE(extract_ground_candidates(field, GroundParams{}).empty());
}

TEST(GroundCandidates, TiltThreshold) {
  const VotingParams p;
  const auto mild = saliency_field(tilted_plane(10.0, 2.0, 0.08), p);
  const auto steep = saliency_field(tilted_plane(30.0, 2.0, 0.08), p);
  EXPECT_GT(extract_ground_candidates(mild, GroundParams{}).size(), mild.size() / 2);
  EXPECT_TRUE(extract_ground_candidates(steep, GroundParams{}).empty());
}

TEST(GroundCandidates, MissingChannel) {
  const PointCloud c({{0, 0, 0}});
  EXPECT_THROW(extract_ground_candidates(c, GroundParams{}), ChannelMissingError);
}

TEST(HeightGrid, SingleSample) {
  const PointCloud c({{0.2, 0.3, 1.5}});
  const auto g = build_height_grid(c, all_indices(1), 0.5, 1, 0.5);
  ASSERT_EQ(g.cols(), 1u);
  ASSERT_EQ(g.rows(), 1u);
  EXPECT_TRUE(g.at(0, 0).valid);
  EXPECT_EQ(g.at(0, 0).height, 1.5);
}

TEST(HeightGrid, MedianIgnoresOutlier) {
  const PointCloud c({{0.1, 0.1, 1.0}, {0.2, 0.2, 1.1}, {0.3, 0.3, 5.0}});
  const auto g = build_height_grid(c, all_indices(3), 0.5, 3, 0.5);
  EXPECT_DOUBLE_EQ(g.at(0, 0).height, 1.1);
  EXPECT_EQ(g.at(0, 0).samples, 3u);
}

TEST(HeightGrid, SparseCellInvalidAndEmptyInputRejected) {
  const PointCloud c({{0.1, 0.1, 1.0}, {0.2, 0.2, 1.1}});
  EXPECT_FALSE(build_height_grid(c, all_indices(2), 0.5, 3, 0.5).at(0, 0).valid);
  EXPECT_THROW(build_height_grid(c, {}, 0.5, 3, 0.5), EmptyInputError);
}

TEST(HeightGrid, OriginSnappedToAlignment) {
  const PointCloud c({{13.7, -4.2, 0.0}, {21.0, 3.0, 0.0}});
  const auto g = build_height_grid(c, all_indices(2), 0.5, 1, 10.0);
  EXPECT_EQ(g.origin_x(), 10.0);
  EXPECT_EQ(g.origin_y(), -10.0);
}

TEST(HeightGrid, CellHeightWithinSampleRange) {
  const auto cloud = oracle::random_cloud(3000, 4.0, 12);
  const auto g = build_height_grid(cloud, all_indices(cloud.size()), 0.5, 1, 0.5);
  for (std::size_t r = 0; r < g.rows(); ++r) {
    for (std::size_t c = 0; c < g.cols(); ++c) {
      if (!g.at(c, r).valid) continue;
      double lo = 1e9;
      double hi = -1e9;
      for (const auto& p : cloud.points()) {
        const auto cell = g.locate(p.x, p.y);
        if (cell && cell->first == c && cell->second == r) {
          lo = std::min(lo, p.z);
          hi = std::max(hi, p.z);
        }
      }
      EXPECT_GE(g.at(c, r).height, lo);
      EXPECT_LE(g.at(c, r).height, hi);
    }
  }
}

TEST(RefineDem, FlatGridUnchanged) {
  const auto r = refine_dem(flat_height_grid(40, 40, 2.0), 10.0, 1.0, 0.3);
  ASSERT_EQ(r.refined.cols(), 20u);
  ASSERT_EQ(r.coarse.cols(), 2u);
  for (const auto& c : r.refined.cells()) {
    EXPECT_TRUE(c.valid);
    EXPECT_FALSE(c.filled);
    EXPECT_EQ(c.height, 2.0);
  }
}

TEST(RefineDem, PollutedCellInvalidatedAndFilled) {
  auto g = flat_height_grid(40, 40, 0.0);
  for (std::size_t r = 10; r < 12; ++r) {
    for (std::size_t c = 10; c < 12; ++c) g.at(c, r).height = 3.0;
  }
  const auto r = refine_dem(g, 10.0, 1.0, 0.3);
  const DemCell& cell = r.refined.at(5, 5);
  EXPECT_TRUE(cell.filled);
  EXPECT_TRUE(cell.valid);
  EXPECT_NEAR(cell.height, 0.0, 0.05);
}

TEST(RefineDem, IsolatedPollutionWithoutSupportStaysInvalid) {
  DemGrid g(0.0, 0.0, 0.5, 40, 40);
  for (std::size_t r = 0; r < 40; ++r) {
    for (std::size_t c = 0; c < 40; ++c) {
      // Only a sparse checkerboard of 1 m cells has data.
      if ((c / 2) % 3 == 0 && (r / 2) % 3 == 0) g.at(c, r) = {0.0, 5, true, false};
    }
  }
  for (std::size_t r = 12; r < 14; ++r) {
    for (std::size_t c = 12; c < 14; ++c) g.at(c, r) = {3.0, 5, true, false};
  }
  const auto r = refine_dem(g, 10.0, 1.0, 0.3);
  EXPECT_FALSE(r.refined.at(6, 6).valid);
  EXPECT_FALSE(ground_height_at(r.refined, 6.5, 6.5).has_value());
}

TEST(RefineDem, GradeSurvivesConsistency) {
  DemGrid g(0.0, 0.0, 0.5, 40, 40);
  for (std::size_t r = 0; r < 40; ++r) {
    for (std::size_t c = 0; c < 40; ++c) g.at(c, r) = {0.02 * g.cell_center_y(r), 5, true, false};
  }
  const auto r = refine_dem(g, 10.0, 1.0, 0.3);
  for (std::size_t row = 0; row < r.refined.rows(); ++row) {
    for (std::size_t col = 0; col < r.refined.cols(); ++col) {
      const DemCell& cell = r.refined.at(col, row);
      EXPECT_TRUE(cell.valid);
      EXPECT_FALSE(cell.filled);
      EXPECT_NEAR(cell.height, 0.02 * r.refined.cell_center_y(row), 1e-12);
    }
  }
}

TEST(RefineDem, EveryValidCellConsistent) {
  const auto cloud = oracle::random_cloud(5000, 20.0, 3);
  const auto g = build_height_grid(cloud, all_indices(cloud.size()), 0.5, 1, 10.0);
  const auto r = refine_dem(g, 10.0, 1.0, 0.3);
  for (std::size_t row = 0; row < r.refined.rows(); ++row) {
    for (std::size_t col = 0; col < r.refined.cols(); ++col) {
      const DemCell& cell = r.refined.at(col, row);
      if (!cell.valid) continue;
      const auto coarse = r.coarse.locate(r.refined.cell_center_x(col), r.refined.cell_center_y(row));
      ASSERT_TRUE(coarse);
      EXPECT_LE(std::abs(cell.height - r.coarse.at(coarse->first, coarse->second).height), 0.3 + 1e-12);
    }
  }
}

TEST(RefineDem, RejectsNonIntegerRatio) {
  EXPECT_THROW(refine_dem(flat_height_grid(4, 4, 0.0), 10.0, 0.75, 0.3), ArgumentError);
}

TEST(GroundHeightAt, Queries) {
  const auto r = refine_dem(flat_height_grid(20, 20, 1.25), 10.0, 1.0, 0.3);
  EXPECT_EQ(ground_height_at(r.refined, 3.5, 4.5).value(), 1.25);
  EXPECT_FALSE(ground_height_at(r.refined, -0.5, 4.5).has_value());
  EXPECT_FALSE(ground_height_at(r.refined, 3.5, 10.0).has_value());
}

TEST(NearestGroundHeight, FallsBackToNearestValidNeighbor) {
  DemGrid g(0.0, 0.0, 1.0, 3, 1);
  g.at(0, 0) = {1.0, 3, true, false};
  g.at(2, 0) = {2.0, 3, true, false};
  EXPECT_EQ(nearest_ground_height(g, 0.5, 0.5).value(), 1.0);
  EXPECT_EQ(nearest_ground_height(g, 1.4, 0.5).value(), 1.0);
  EXPECT_EQ(nearest_ground_height(g, 1.6, 0.5).value(), 2.0);
  // Within one cell past the far edge.
  EXPECT_EQ(nearest_ground_height(g, 3.3, 0.5).value(), 2.0);
  EXPECT_EQ(nearest_ground_height(g, 2.5, 1.2).value(), 2.0);
  EXPECT_FALSE(nearest_ground_height(g, 4.5, 0.5).has_value());
  EXPECT_FALSE(nearest_ground_height(g, -1.5, 0.5).has_value());
}

TEST(DemGridType, EsriAsciiNorthFirst) {
  DemGrid g(5.0, 6.0, 1.0, 2, 2);
  g.at(0, 0) = {1.0, 3, true, false};
  g.at(1, 1) = {2.5, 3, true, false};
  std::ostringstream out;
  g.write_esri_ascii(out);
  EXPECT_EQ(out.str(),
            "ncols 2\nnrows 2\nxllcorner 5\nyllcorner 6\ncellsize 1\nNODATA_value -9999\n"
            "-9999 2.5\n1 -9999\n");
}

TEST(BuildDem, TranslationEquivariant) {
  SceneSpec spec;
  spec.x_min = -4;
  spec.x_max = 4;
  spec.y_min = -4;
  spec.y_max = 4;
  const auto scene = generate_scene(spec);
  const auto field = saliency_field(scene.cloud, VotingParams{});
  std::vector<Point3> lifted;
  for (const auto& p : scene.cloud.points()) lifted.push_back(p + Vec3{0, 0, 2.5});
  PointCloud shifted(lifted);
  for (const auto& ch : field.channels()) shifted.set_channel(ch.name, ch.values);
  const auto a = build_dem(field, GroundParams{});
  const auto b = build_dem(shifted, GroundParams{});
  ASSERT_EQ(a.refined.cells().size(), b.refined.cells().size());
  for (std::size_t i = 0; i < a.refined.cells().size(); ++i) {
    ASSERT_EQ(a.refined.cells()[i].valid, b.refined.cells()[i].valid);
    if (a.refined.cells()[i].valid) {
      EXPECT_NEAR(b.refined.cells()[i].height - a.refined.cells()[i].height, 2.5, 1e-9);
    }
  }
}

TEST(BuildDem, FlatNoisyGroundAccurate) {
  SceneSpec spec;
  spec.x_min = -5;
  spec.x_max = 5;
  spec.y_min = -5;
  spec.y_max = 5;
  spec.curb_height = 0.0;
  spec.noise = 0.01;
  const auto scene = generate_scene(spec);
  const auto dem = build_dem(saliency_field(scene.cloud, VotingParams{}), GroundParams{});
  ASSERT_GT(dem.refined.valid_count(), 50u);
  for (std::size_t r = 0; r < dem.refined.rows(); ++r) {
    for (std::size_t c = 0; c < dem.refined.cols(); ++c) {
      if (!dem.refined.at(c, r).valid) continue;
      EXPECT_NEAR(dem.refined.at(c, r).height, 0.0, 0.05);
    }
  }
}

}  // namespace
}  // namespace curbvote
