// Copyright 2026 The curbvote Authors
// SPDX-License-Identifier: Apache-2.0

#include "curbvote/scene.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "curbvote/errors.hpp"

namespace curbvote {
namespace {

class SceneBuilder {
 public:
  explicit SceneBuilder(const SceneSpec& spec) : spec_(spec), rng_(spec.seed) {}

  double ground(double x, double y) const {
    double z = spec_.grade * y;
    if (spec_.curb_height > 0.0 && std::abs(x) >= spec_.road_half_width) z += spec_.curb_height;
    return z;
  }

  /// Samples the rectangle [u0, u1) x [v0, v1) of a surface parametrized by `place`.
  template <typename Place>
  void surface(double u0, double u1, double v0, double v1, Place&& place) {
    if (!(u1 > u0) || !(v1 > v0)) return;
    if (spec_.sampling == Sampling::Lattice) {
      const double s = 1.0 / std::sqrt(spec_.density);
      // Lattice nodes sit at (k + 0.5) * s so that adjoining patches line up.
      const auto first = [s](double a) { return static_cast<long long>(std::ceil(a / s - 0.5)); };
      for (long long j = first(v0); (j + 0.5) * s < v1; ++j) {
        for (long long i = first(u0); (i + 0.5) * s < u1; ++i) place((i + 0.5) * s, (j + 0.5) * s);
      }
    } else {
      const auto count = static_cast<std::size_t>(std::llround((u1 - u0) * (v1 - v0) * spec_.density));
      std::uniform_real_distribution<double> du(u0, u1), dv(v0, v1);
      for (std::size_t k = 0; k < count; ++k) {
        const double u = du(rng_);
        const double v = dv(rng_);
        place(u, v);
      }
    }
  }

  void emit(const Point3& exact, TruthClass cls) {
    Point3 p = exact;
    if (spec_.noise > 0.0) {
      p.x += noise_(rng_) * spec_.noise;
      p.y += noise_(rng_) * spec_.noise;
      p.z += noise_(rng_) * spec_.noise;
    }
    if (cls == TruthClass::Road || cls == TruthClass::Sidewalk) {
      if (near_curb_face(exact)) cls = TruthClass::Curb;
    }
    points_.push_back(p);
    truth_.push_back(cls);
  }

  bool occluded(double x, double y) const {
    for (const auto& c : spec_.crowns) {
      if (x >= c.x0 && x < c.x1 && y >= c.y0 && y < c.y1) return true;
    }
    return false;
  }

  bool behind_wall(double x) const {
    for (const auto& w : spec_.walls) {
      if ((w.x > 0.0 && x > w.x) || (w.x < 0.0 && x < w.x)) return true;
    }
    return false;
  }

  Scene build() {
    const double rw = spec_.road_half_width;
    const bool curbs = spec_.curb_height > 0.0;
    double x0 = spec_.x_min;
    double x1 = spec_.x_max;
    for (const auto& w : spec_.walls) {
      if (w.x > 0.0) x1 = std::min(x1, w.x);
      if (w.x < 0.0) x0 = std::max(x0, w.x);
    }

    auto ground_patch = [&](double a, double b, TruthClass cls) {
      surface(std::max(a, x0), std::min(b, x1), spec_.y_min, spec_.y_max, [&](double x, double y) {
        if (!occluded(x, y)) emit({x, y, ground(x, y)}, cls);
      });
    };
    if (curbs) {
      ground_patch(-rw, rw, TruthClass::Road);
      ground_patch(x0, -rw, TruthClass::Sidewalk);
      ground_patch(rw, x1, TruthClass::Sidewalk);
      for (double side : {-rw, rw}) {
        if (side < x0 || side > x1) continue;
        surface(spec_.y_min, spec_.y_max, 0.0, spec_.curb_height, [&](double y, double h) {
          emit({side, y, spec_.grade * y + h}, TruthClass::Curb);
        });
      }
    } else {
      ground_patch(x0, x1, TruthClass::Road);
    }

    for (const auto& w : spec_.walls) {
      surface(spec_.y_min, spec_.y_max, 0.0, w.height, [&](double y, double h) {
        emit({w.x, y, ground(w.x - std::copysign(1e-9, w.x), y) + h}, TruthClass::Wall);
      });
    }

    for (const auto& c : spec_.crowns) {
      surface(c.x0, c.x1, c.y0, c.y1, [&](double x, double y) {
        if (!behind_wall(x)) emit({x, y, ground(x, y) + c.height}, TruthClass::Canopy);
      });
    }

    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (const auto& c : spec_.canopies) {
      std::size_t made = 0;
      while (made < c.points) {
        const Vec3 u{unit(rng_), unit(rng_), unit(rng_)};
        if (squared_norm(u) > 1.0) continue;
        const Point3 p{c.center.x + u.x * c.radii.x, c.center.y + u.y * c.radii.y,
                       c.center.z + u.z * c.radii.z};
        ++made;
        if (behind_wall(p.x)) continue;
        emit({p.x, p.y, ground(p.x, p.y) + p.z}, TruthClass::Canopy);
      }
    }

    Scene scene;
    scene.spec = spec_;
    std::vector<double> codes(truth_.size());
    for (std::size_t i = 0; i < truth_.size(); ++i) codes[i] = static_cast<double>(truth_[i]);
    scene.cloud = PointCloud(std::move(points_));
    scene.cloud.add_channel("truth", std::move(codes));
    scene.truth = std::move(truth_);
    return scene;
  }

 private:
  bool near_curb_face(const Point3& p) const {
    if (!(spec_.curb_height > 0.0)) return false;
    const double base = spec_.grade * p.y;
    const double dz = std::max({0.0, base - p.z, p.z - (base + spec_.curb_height)});
    const double dx = std::abs(std::abs(p.x) - spec_.road_half_width);
    return std::sqrt(dx * dx + dz * dz) <= spec_.curb_truth_distance;
  }

  const SceneSpec& spec_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> noise_{0.0, 1.0};
  std::vector<Point3> points_;
  std::vector<TruthClass> truth_;
};

}  // namespace

std::string_view truth_name(TruthClass c) {
  switch (c) {
    case TruthClass::Road: return "road";
    case TruthClass::Sidewalk: return "sidewalk";
    case TruthClass::Curb: return "curb";
    case TruthClass::Wall: return "wall";
    case TruthClass::Canopy: return "canopy";
  }
  return "road";
}

void SceneSpec::validate() const {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!(x_max > x_min) || !(y_max > y_min)) throw ArgumentError("scene extent must be non-empty");
  if (!positive(density)) throw ArgumentError("scene density must be positive");
  if (!(road_half_width >= 0.0)) throw ArgumentError("road half width must be non-negative");
  if (!(curb_height >= 0.0)) throw ArgumentError("curb height must be non-negative");
  if (!(noise >= 0.0)) throw ArgumentError("noise must be non-negative");
  if (!(curb_truth_distance >= 0.0)) throw ArgumentError("curb truth distance must be non-negative");
  if (!std::isfinite(grade)) throw ArgumentError("grade must be finite");
  for (const auto& w : walls) {
    if (!positive(w.height)) throw ArgumentError("wall height must be positive");
    if (w.x == 0.0) throw ArgumentError("a wall cannot stand on the road center line");
  }
  for (const auto& c : canopies) {
    if (!positive(c.radii.x) || !positive(c.radii.y) || !positive(c.radii.z)) {
      throw ArgumentError("canopy radii must be positive");
    }
  }
  for (const auto& c : crowns) {
    if (!(c.x1 > c.x0) || !(c.y1 > c.y0) || !positive(c.height)) {
      throw ArgumentError("crown patch must have positive size and height");
    }
  }
}

SceneSpec SceneSpec::street() {
  SceneSpec s;
  s.walls = {WallSpec{8.0, 1.8}};
  s.canopies = {CanopySpec{}};
  return s;
}

double Scene::ground_height(double x, double y) const {
  double z = spec.grade * y;
  if (spec.curb_height > 0.0 && std::abs(x) >= spec.road_half_width) z += spec.curb_height;
  return z;
}

Scene generate_scene(const SceneSpec& spec) {
  spec.validate();
  return SceneBuilder(spec).build();
}

}  // namespace curbvote
