// Copyright 2026 The curbvote Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "curbvote/geometry.hpp"
#include "curbvote/point_cloud.hpp"

namespace curbvote {

/// Ground-truth class of a synthetic point.
enum class TruthClass : std::uint8_t {
  Road = 0,
  Sidewalk = 1,
  Curb = 2,  // within curb_truth_distance of a curb face
  Wall = 3,
  Canopy = 4,
};

std::string_view truth_name(TruthClass c);

enum class Sampling {
  /// Square lattice at spacing 1/sqrt(density): the regular pattern of a
  /// scanning sensor after accumulation.
  Lattice,
  /// Independent uniform samples, round(area * density) per surface.
  Uniform,
};

/// Vertical wall plane x = position, running the full y extent from the
/// ground up to `height` above it. Nothing is generated behind it.
struct WallSpec {
  double x = 8.0;
  double height = 1.8;
};

/// Ellipsoidal foliage blob filled with uniformly random points. The center's
/// z is measured from the local ground.
struct CanopySpec {
  Point3 center{-6.0, 0.0, 1.5};
  Vec3 radii{1.5, 3.0, 0.3};
  std::size_t points = 1500;
};

/// Horizontal crown surface at a fixed height above the ground; it occludes
/// the ground beneath it.
struct CrownSpec {
  double x0 = 0.0;
  double x1 = 1.0;
  double y0 = 0.0;
  double y1 = 1.0;
  double height = 3.0;
};

/// A straight street along y: road for |x| < road_half_width, raised
/// sidewalks beyond, curb faces at x = +-road_half_width.
struct SceneSpec {
  double x_min = -10.0;
  double x_max = 10.0;
  double y_min = -10.0;
  double y_max = 10.0;
  double road_half_width = 3.0;
  /// 0 gives a flat street with no curbs.
  double curb_height = 0.15;
  /// Ground rise per meter along +y.
  double grade = 0.0;
  std::vector<WallSpec> walls;
  std::vector<CanopySpec> canopies;
  std::vector<CrownSpec> crowns;
  /// Points per square meter of surface.
  double density = 250.0;
  /// Standard deviation of isotropic Gaussian position noise.
  double noise = 0.005;
  Sampling sampling = Sampling::Lattice;
  /// Points this close to a curb face are labeled Curb.
  double curb_truth_distance = 0.1;
  std::uint64_t seed = 1;

  /// Throws ArgumentError on non-physical values.
  void validate() const;

  /// Road, 0.15 m curbs, a wall behind the +x sidewalk and a canopy over the
  /// -x sidewalk: about 100k points in a 20 m x 20 m x 2 m box.
  static SceneSpec street();
};

struct Scene {
  /// Carries a "truth" channel holding the TruthClass code of each point.
  PointCloud cloud;
  std::vector<TruthClass> truth;
  /// Noise-free ground height at (x, y).
  double ground_height(double x, double y) const;

  SceneSpec spec;
};

/// Deterministic for a given spec (including its seed).
Scene generate_scene(const SceneSpec& spec);

}  // namespace curbvote
