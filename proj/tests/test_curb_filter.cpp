// Copyright 2026 The curbvote Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "curbvote/curb_filter.hpp"
#include "curbvote/errors.hpp"
#include "curbvote/scene.hpp"
#include "oracles.hpp"

namespace curbvote {
namespace {

DemGrid flat_dem(double x0, double y0, std::size_t n, double height) {
  DemGrid g(x0, y0, 1.0, n, n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) g.at(c, r) = {height, 10, true, false};
  }
  return g;
}

PointCloud with_plate(std::vector<Point3> pts, std::vector<double> plate) {
  PointCloud c(std::move(pts));
  const std::size_t n = c.size();
  c.add_channel("plate", plate);
  c.add_channel("stick", std::vector<double>(n, 1.0));
  c.add_channel("ball", std::vector<double>(n, 0.0));
  return c;
}

struct Metrics {
  double recall;
  double precision;
};

Metrics score(const Scene& scene, const std::vector<std::size_t>& detected) {
  std::size_t truth = 0;
  std::size_t hits = 0;
  for (auto t : scene.truth) truth += t == TruthClass::Curb;
  for (auto i : detected) hits += scene.truth[i] == TruthClass::Curb;
  return {static_cast<double>(hits) / truth,
          detected.empty() ? 0.0 : static_cast<double>(hits) / detected.size()};
}

/// Full-length street, trimmed in x. Curb points within a voting radius of
/// the scan's end see one-sided neighborhoods, so short streets understate recall.
SceneSpec small_street() {
  SceneSpec spec = SceneSpec::street();
  spec.x_min = -7.5;
  spec.x_max = 9.0;
  return spec;
}

TEST(PlateCandidates, ThresholdAgainstMax) {
  const auto c = with_plate({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}}, {1.0, 0.29, 0.3});
  EXPECT_EQ(plate_candidates(c, CurbParams{}), (std::vector<std::size_t>{0, 2}));
  EXPECT_TRUE(plate_candidates(PointCloud{}, CurbParams{}).empty());
  EXPECT_THROW(plate_candidates(PointCloud({{0, 0, 0}}), CurbParams{}), ChannelMissingError);
}

TEST(PlateCandidates, RaisingThresholdNeverAdds) {
  const auto field = saliency_field(oracle::random_cloud(800, 2.0, 4), VotingParams{});
  CurbParams p;
  p.min_plate_ratio = 0.0;
  std::vector<std::size_t> previous = plate_candidates(field, p);
  for (double tau : {0.35, 0.5, 0.7, 0.9}) {
    p.plate_fraction = tau;
    const auto next = plate_candidates(field, p);
    EXPECT_TRUE(std::includes(previous.begin(), previous.end(), next.begin(), next.end()));
    previous = next;
  }
}

TEST(PlateCandidates, FlatPlaneInteriorBelowStepJunction) {
  const auto scene = oracle::step_scene(2.0, 0.15, 0.06);
  const VotingParams v;
  const auto field = saliency_field(scene.cloud, v);
  const auto cands = plate_candidates(field, CurbParams{});
  ASSERT_FALSE(cands.empty());
  for (auto i : cands) {
    const auto& p = field[i];
    const bool rim = std::max(std::abs(p.x), std::abs(p.y)) > 2.0 - v.cutoff_radius;
    if (!rim) EXPECT_LE(scene.junction_distance[i], v.cutoff_radius) << i;
  }
}

TEST(HeightGate, Band) {
  const PointCloud c({{0.5, 0.5, 1.15}, {0.5, 0.5, 3.0}, {0.5, 0.5, 0.7}, {50, 50, 1.0}});
  const auto dem = flat_dem(0, 0, 4, 1.0);
  const std::vector<std::size_t> all{0, 1, 2, 3};
  EXPECT_EQ(height_gate(c, all, dem, CurbParams{}), (std::vector<std::size_t>{0}));
}

TEST(HeightGate, RaisingCeilingNeverRemoves) {
  const auto cloud = oracle::random_cloud(500, 3.0, 8);
  std::vector<std::size_t> all(cloud.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const auto dem = flat_dem(0, 0, 3, 1.0);
  CurbParams p;
  std::vector<std::size_t> previous = height_gate(cloud, all, dem, p);
  for (double ceiling : {0.8, 1.2, 2.5}) {
    p.height_ceiling = ceiling;
    const auto next = height_gate(cloud, all, dem, p);
    EXPECT_TRUE(std::includes(next.begin(), next.end(), previous.begin(), previous.end()));
    previous = next;
  }
}

TEST(HeightGate, SupportNeighborhoodCheck) {
  // A candidate at the foot of a tall structure is rejected.
  const PointCloud c({{0.5, 0.5, 0.0}, {0.6, 0.5, 1.5}, {3.5, 3.5, 0.1}});
  const auto dem = flat_dem(0, 0, 4, 0.0);
  const BruteForceSearch search(c);
  const std::vector<std::size_t> cands{0, 2};
  EXPECT_EQ(height_gate(c, cands, dem, CurbParams{}, &search, 2.0), (std::vector<std::size_t>{2}));
  EXPECT_EQ(height_gate(c, cands, dem, CurbParams{}), cands);
}

TEST(FootprintGate, RimRejectedInteriorKept) {
  std::vector<Point3> pts;
  for (int i = 0; i < 40; ++i) {
    for (int j = 0; j < 40; ++j) pts.push_back({i * 0.05, j * 0.05, 0.0});
  }
  const PointCloud c(pts);
  const BruteForceSearch search(c);
  const std::vector<std::size_t> cands{0, 20 * 40 + 20, 20};  // corner, center, edge
  EXPECT_EQ(footprint_gate(c, cands, search, 0.3, 0.25), (std::vector<std::size_t>{20 * 40 + 20}));
}

TEST(OutlierRemoval, Cases) {
  const PointCloud lone({{0, 0, 0}});
  EXPECT_TRUE(outlier_removal(lone, std::vector<std::size_t>{0}, 0.3, 3).empty());

  const PointCloud dup({{1, 1, 1}, {1, 1, 1}, {1, 1, 1}, {1, 1, 1}});
  const std::vector<std::size_t> all{0, 1, 2, 3};
  EXPECT_EQ(outlier_removal(dup, all, 0.3, 3), all);

  std::vector<Point3> seg;
  for (int i = 0; i < 50; ++i) seg.push_back({i * 0.05, 0, 0});
  seg.push_back({10, 10, 0});
  const PointCloud segment(seg);
  std::vector<std::size_t> idx(seg.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  const auto kept = outlier_removal(segment, idx, 0.3, 3);
  EXPECT_EQ(kept.size(), 50u);
  EXPECT_EQ(kept.back(), 49u);
}

TEST(DetectCurbs, FlatPlaneYieldsNothing) {
  SceneSpec spec;
  spec.x_min = -4;
  spec.x_max = 4;
  spec.y_min = -4;
  spec.y_max = 4;
  spec.curb_height = 0.0;
  const auto scene = generate_scene(spec);
  const VotingParams v;
  const auto field = saliency_field(scene.cloud, v);
  const auto dem = build_dem(field, GroundParams{});
  EXPECT_TRUE(detect_curbs(field, dem.refined, v, CurbParams{}).indices.empty());
}

TEST(DetectCurbs, StreetRecallPrecisionAndClusters) {
  const auto scene = generate_scene(small_street());
  const VotingParams v;
  const auto field = saliency_field(scene.cloud, v);
  const auto dem = build_dem(field, GroundParams{});
  const auto det = detect_curbs(field, dem.refined, v, CurbParams{});
  const auto m = score(scene, det.indices);
  EXPECT_GE(m.recall, 0.9);
  EXPECT_GE(m.precision, 0.8);
  for (auto i : det.indices) EXPECT_NE(scene.truth[i], TruthClass::Canopy);
  for (double c : det.confidence) {
    EXPECT_GE(c, 0.0);
    EXPECT_LE(c, 1.0);
  }
  // Subset of the plate candidates.
  const auto cands = plate_candidates(field, CurbParams{});
  EXPECT_TRUE(std::includes(cands.begin(), cands.end(), det.indices.begin(), det.indices.end()));

  // Two clusters under 1 m connectivity, one per curb.
  const PointCloud found = field.subset(det.indices);
  const BruteForceSearch search(found);
  std::vector<int> cluster(found.size(), -1);
  int clusters = 0;
  for (std::size_t s = 0; s < found.size(); ++s) {
    if (cluster[s] >= 0) continue;
    std::vector<std::size_t> stack{s};
    cluster[s] = clusters;
    while (!stack.empty()) {
      const auto k = stack.back();
      stack.pop_back();
      for (const auto& n : search.radius_neighbors(found[k], 1.0)) {
        if (cluster[n.index] < 0) {
          cluster[n.index] = clusters;
          stack.push_back(n.index);
        }
      }
    }
    ++clusters;
  }
  EXPECT_EQ(clusters, 2);
}

TEST(DetectCurbs, RotationAboutVerticalBarelyMatters) {
  const auto scene = generate_scene(small_street());
  const VotingParams v;
  const auto run = [&](const PointCloud& cloud) {
    const auto field = saliency_field(cloud, v);
    const auto dem = build_dem(field, GroundParams{});
    return score(scene, detect_curbs(field, dem.refined, v, CurbParams{}).indices);
  };
  const auto base = run(scene.cloud);
  const double a = 0.5;
  std::vector<Point3> rotated;
  for (const auto& p : scene.cloud.points()) {
    rotated.push_back({std::cos(a) * p.x - std::sin(a) * p.y, std::sin(a) * p.x + std::cos(a) * p.y, p.z});
  }
  const auto turned = run(PointCloud(rotated));
  EXPECT_LT(std::abs(turned.recall - base.recall), 0.02);
  EXPECT_LT(std::abs(turned.precision - base.precision), 0.02);
}

TEST(DetectCurbs, Deterministic) {
  const auto scene = generate_scene(small_street());
  const VotingParams v;
  const auto f1 = saliency_field(scene.cloud, v, 1);
  const auto f4 = saliency_field(scene.cloud, v, 4);
  ASSERT_EQ(f1, f4);
  const auto dem = build_dem(f1, GroundParams{});
  EXPECT_EQ(detect_curbs(f1, dem.refined, v, CurbParams{}).indices,
            detect_curbs(f4, dem.refined, v, CurbParams{}).indices);
}

TEST(CurbParamsType, Validation) {
  CurbParams p;
  p.plate_fraction = 0.0;
  EXPECT_THROW(p.validate(), ArgumentError);
  p = CurbParams{};
  p.height_floor = 1.0;
  EXPECT_THROW(p.validate(), ArgumentError);
  p = CurbParams{};
  p.outlier_min_neighbors = 0;
  EXPECT_THROW(p.validate(), ArgumentError);
}

}  // namespace
}  // namespace curbvote
