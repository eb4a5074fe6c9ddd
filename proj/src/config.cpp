// Copyright 2026 The curbvote Authors
// SPDX-License-Identifier: Apache-2.0

#include "curbvote/config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "curbvote/errors.hpp"
#include "curbvote/pipeline.hpp"

namespace curbvote {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(std::string_view text, const std::string& what) {
  text = trim(text);
  double v = 0.0;
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ArgumentError(what + ": not a number: '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace

std::string format_double(double value) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ec == std::errc() ? ptr : buf.data());
}

std::vector<std::string> split_list(std::string_view text, char separator) {
  std::vector<std::string> out;
  text = trim(text);
  if (text.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(separator, start);
    out.emplace_back(trim(text.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

KeyValueDocument KeyValueDocument::parse(std::string_view text) {
  KeyValueDocument doc;
  std::string section;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    std::string_view line = text.substr(start, end == std::string_view::npos ? end : end - start);
    start = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line = line.substr(0, i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) throw ParseError(line_no, "malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ParseError(line_no, "empty key");
    auto value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    const std::string full = section.empty() ? std::string(key) : section + "." + std::string(key);
    if (doc.values_.count(full)) throw ParseError(line_no, "duplicate key '" + full + "'");
    doc.values_[full] = {std::string(value), line_no};
    doc.order_.push_back(full);
  }
  return doc;
}

KeyValueDocument KeyValueDocument::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::optional<std::string> KeyValueDocument::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second.first;
}

void KeyValueDocument::set(const std::string& key, std::string value) {
  if (!values_.count(key)) order_.push_back(key);
  values_[key] = {std::move(value), 0};
}

std::optional<double> KeyValueDocument::get_double(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  try {
    return parse_number(it->second.first, key);
  } catch (const ArgumentError& e) {
    throw ParseError(it->second.second, e.what());
  }
}

std::optional<long long> KeyValueDocument::get_integer(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  const std::string_view text = trim(it->second.first);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError(it->second.second, key + ": not an integer: '" + std::string(text) + "'");
  }
  return v;
}

std::optional<bool> KeyValueDocument::get_bool(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  const std::string_view v = trim(it->second.first);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ParseError(it->second.second, key + ": not a boolean: '" + std::string(v) + "'");
}

// ---------------------------------------------------------------------------
// Pipeline configuration

Aabb parse_crop_box(std::string_view text) {
  const auto parts = split_list(text);
  if (parts.size() != 6) throw ArgumentError("crop box needs six values x0,y0,z0,x1,y1,z1");
  std::array<double, 6> v{};
  for (std::size_t i = 0; i < 6; ++i) v[i] = parse_number(parts[i], "crop box");
  const CropBox box({v[0], v[1], v[2]}, {v[3], v[4], v[5]});
  return {box.min(), box.max()};
}

namespace {

struct Writer {
  std::ostringstream out;
  bool annotated;

  void section(const char* name) { out << (out.tellp() > 0 ? "\n[" : "[") << name << "]\n"; }
  void entry(const char* key, const std::string& value, const char* doc) {
    if (annotated) out << "# " << doc << '\n';
    out << key << " = " << value << '\n';
  }
  void entry(const char* key, double value, const char* doc) { entry(key, format_double(value), doc); }
  void entry(const char* key, std::size_t value, const char* doc) {
    entry(key, std::to_string(value), doc);
  }
  void entry(const char* key, bool value, const char* doc) {
    entry(key, std::string(value ? "true" : "false"), doc);
  }
};

std::string quote(const std::filesystem::path& p) { return "\"" + p.string() + "\""; }

std::size_t to_count(long long v, const std::string& key) {
  if (v < 0) throw ArgumentError(key + " must be non-negative");
  return static_cast<std::size_t>(v);
}

}  // namespace

std::string serialize_config(const PipelineConfig& c, bool annotated) {
  Writer w{{}, annotated};
  w.section("input");
  w.entry("path", quote(c.input), "point cloud to process");
  w.entry("format", std::string(to_string(c.input_format)), "pcd (PCD ASCII) or xyz (text rows)");

  w.section("crop");
  w.entry("enabled", c.crop.has_value(), "restrict processing to the box below");
  const Aabb box = c.crop.value_or(Aabb{{-10, -10, -1}, {10, 10, 1}});
  w.entry("box",
          format_double(box.min.x) + "," + format_double(box.min.y) + "," + format_double(box.min.z) +
              "," + format_double(box.max.x) + "," + format_double(box.max.y) + "," +
              format_double(box.max.z),
          "x0,y0,z0,x1,y1,z1 in meters, inclusive");

  w.section("tensor_voting");
  w.entry("sigma", c.voting.sigma, "decay scale in meters (default 0.3)");
  w.entry("cutoff_radius", c.voting.cutoff_radius,
          "vote truncation radius in meters (default sigma * sqrt(ln 1000))");
  w.entry("include_self", c.voting.include_self, "keep each point's unit ball tensor (default true)");

  w.section("dem");
  w.entry("stick_fraction", c.ground.stick_fraction,
          "ground needs stick >= fraction * max stick (default 0.5)");
  w.entry("max_normal_angle_deg", c.ground.max_normal_angle_deg,
          "largest normal tilt from vertical for ground (default 15)");
  w.entry("height_cell", c.ground.height_cell, "height grid cell in meters (default 0.5)");
  w.entry("coarse_cell", c.ground.coarse_cell, "coarse DEM cell in meters (default 10)");
  w.entry("refined_cell", c.ground.refined_cell, "refined DEM cell in meters (default 1)");
  w.entry("consistency", c.ground.consistency,
          "max refined-vs-coarse height difference in meters (default 0.3)");
  w.entry("min_samples", c.ground.min_samples, "samples needed for a valid height cell (default 3)");

  w.section("curb_filter");
  w.entry("plate_fraction", c.curb.plate_fraction,
          "curb candidates need plate >= fraction * max plate (default 0.3)");
  w.entry("min_plate_ratio", c.curb.min_plate_ratio,
          "... and plate >= ratio * lambda1 at the point (default 0.04)");
  w.entry("height_floor", c.curb.height_floor, "lowest curb height above the DEM (default -0.2)");
  w.entry("height_ceiling", c.curb.height_ceiling, "highest curb height above the DEM (default 0.5)");
  w.entry("max_footprint_offset", c.curb.max_footprint_offset,
          "max neighborhood centroid offset / mean neighbor distance; 1 disables (default 0.25)");
  w.entry("outlier_radius", c.curb.outlier_radius, "radius outlier filter radius (default 0.3)");
  w.entry("outlier_min_neighbors", c.curb.outlier_min_neighbors,
          "radius outlier filter minimum neighbors (default 3)");

  w.section("semantic_grid");
  w.entry("cell_size", c.classify.cell_size, "grid resolution in meters (default 0.12)");
  w.entry("min_points", c.classify.min_points, "points needed for a known cell (default 3)");
  w.entry("robot_height", c.classify.robot_height, "UGV height in meters (default 1.0)");
  w.entry("wall_point_threshold", c.classify.wall_point_threshold,
          "points above robot height that make a wall/vehicle (default 10)");
  w.entry("road_tolerance", c.classify.road_tolerance,
          "max height above the DEM for road in meters (default 0.1)");

  w.section("output");
  w.entry("cloud", quote(c.out_cloud), "labeled point cloud (empty: skip)");
  w.entry("dem", quote(c.out_dem), "refined DEM as an ESRI ASCII grid (empty: skip)");
  w.entry("raster", quote(c.out_raster), "semantic grid as a P6 pixmap (empty: skip)");
  w.entry("grid", quote(c.out_grid), "semantic grid in the compact SGRD format (empty: skip)");

  w.section("runtime");
  w.entry("threads", static_cast<std::size_t>(c.threads), "worker threads, 0 = all cores (default 1)");
  w.entry("oracle", c.oracle, "brute-force neighbor search instead of the grid index");
  return w.out.str();
}

PipelineConfig parse_config(std::string_view text, PipelineConfig c) {
  const auto doc = KeyValueDocument::parse(text);
  static const std::vector<std::string_view> kKnown = {
      "input.path", "input.format", "crop.enabled", "crop.box", "tensor_voting.sigma",
      "tensor_voting.cutoff_radius", "tensor_voting.include_self", "dem.stick_fraction",
      "dem.max_normal_angle_deg", "dem.height_cell", "dem.coarse_cell", "dem.refined_cell",
      "dem.consistency", "dem.min_samples", "curb_filter.plate_fraction",
      "curb_filter.min_plate_ratio", "curb_filter.height_floor", "curb_filter.height_ceiling",
      "curb_filter.max_footprint_offset", "curb_filter.outlier_radius", "curb_filter.outlier_min_neighbors", "semantic_grid.cell_size",
      "semantic_grid.min_points", "semantic_grid.robot_height",
      "semantic_grid.wall_point_threshold", "semantic_grid.road_tolerance", "output.cloud",
      "output.dem", "output.raster", "output.grid", "runtime.threads", "runtime.oracle"};
  for (const auto& key : doc.keys()) {
    bool known = false;
    for (const auto k : kKnown) known = known || key == k;
    if (!known) throw ArgumentError("unknown config key '" + key + "'");
  }

  auto number = [&](const char* key, double& target) {
    if (auto v = doc.get_double(key)) target = *v;
  };
  auto count = [&](const char* key, std::size_t& target) {
    if (auto v = doc.get_integer(key)) target = to_count(*v, key);
  };
  if (auto v = doc.get("input.path")) c.input = *v;
  if (auto v = doc.get("input.format")) c.input_format = parse_cloud_format(*v);
  if (auto v = doc.get("crop.box")) c.crop = parse_crop_box(*v);
  if (auto v = doc.get_bool("crop.enabled"); v && !*v) c.crop.reset();
  if (auto v = doc.get_bool("crop.enabled"); v && *v && !c.crop) {
    throw ArgumentError("crop.enabled is set but crop.box is missing");
  }

  if (auto v = doc.get_double("tensor_voting.sigma")) {
    c.voting.sigma = *v;
    if (!doc.has("tensor_voting.cutoff_radius")) {
      c.voting.cutoff_radius = VotingParams::default_cutoff(*v);
    }
  }
  number("tensor_voting.cutoff_radius", c.voting.cutoff_radius);
  if (auto v = doc.get_bool("tensor_voting.include_self")) c.voting.include_self = *v;

  number("dem.stick_fraction", c.ground.stick_fraction);
  number("dem.max_normal_angle_deg", c.ground.max_normal_angle_deg);
  number("dem.height_cell", c.ground.height_cell);
  number("dem.coarse_cell", c.ground.coarse_cell);
  number("dem.refined_cell", c.ground.refined_cell);
  number("dem.consistency", c.ground.consistency);
  count("dem.min_samples", c.ground.min_samples);

  number("curb_filter.plate_fraction", c.curb.plate_fraction);
  number("curb_filter.min_plate_ratio", c.curb.min_plate_ratio);
  number("curb_filter.height_floor", c.curb.height_floor);
  number("curb_filter.height_ceiling", c.curb.height_ceiling);
  number("curb_filter.max_footprint_offset", c.curb.max_footprint_offset);
  number("curb_filter.outlier_radius", c.curb.outlier_radius);
  count("curb_filter.outlier_min_neighbors", c.curb.outlier_min_neighbors);

  number("semantic_grid.cell_size", c.classify.cell_size);
  count("semantic_grid.min_points", c.classify.min_points);
  number("semantic_grid.robot_height", c.classify.robot_height);
  count("semantic_grid.wall_point_threshold", c.classify.wall_point_threshold);
  number("semantic_grid.road_tolerance", c.classify.road_tolerance);

  if (auto v = doc.get("output.cloud")) c.out_cloud = *v;
  if (auto v = doc.get("output.dem")) c.out_dem = *v;
  if (auto v = doc.get("output.raster")) c.out_raster = *v;
  if (auto v = doc.get("output.grid")) c.out_grid = *v;

  if (auto v = doc.get_integer("runtime.threads")) {
    c.threads = static_cast<unsigned>(to_count(*v, "runtime.threads"));
  }
  if (auto v = doc.get_bool("runtime.oracle")) c.oracle = *v;
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), std::move(base));
}

// ---------------------------------------------------------------------------
// Scene description

SceneSpec parse_scene_spec(std::string_view text, bool street_defaults) {
  SceneSpec s = street_defaults ? SceneSpec::street() : SceneSpec{};
  const auto doc = KeyValueDocument::parse(text);
  auto number = [&](const char* key, double& target) {
    if (auto v = doc.get_double(std::string("scene.") + key)) target = *v;
  };
  number("x_min", s.x_min);
  number("x_max", s.x_max);
  number("y_min", s.y_min);
  number("y_max", s.y_max);
  number("road_half_width", s.road_half_width);
  number("curb_height", s.curb_height);
  number("grade", s.grade);
  number("density", s.density);
  number("noise", s.noise);
  number("curb_truth_distance", s.curb_truth_distance);
  if (auto v = doc.get_integer("scene.seed")) s.seed = static_cast<std::uint64_t>(*v);
  if (auto v = doc.get("scene.sampling")) {
    if (*v == "lattice") {
      s.sampling = Sampling::Lattice;
    } else if (*v == "uniform") {
      s.sampling = Sampling::Uniform;
    } else {
      throw ArgumentError("scene.sampling must be lattice or uniform");
    }
  }

  auto fields = [](const std::string& item, std::size_t n, const char* what) {
    const auto parts = split_list(item, ':');
    if (parts.size() != n) {
      throw ArgumentError(std::string(what) + " entries need " + std::to_string(n) + " values");
    }
    std::vector<double> v;
    for (const auto& p : parts) v.push_back(parse_number(p, what));
    return v;
  };
  if (auto v = doc.get("walls.positions")) {
    s.walls.clear();
    for (const auto& item : split_list(*v)) {
      const auto f = fields(item, 2, "wall");
      s.walls.push_back({f[0], f[1]});
    }
  }
  if (auto v = doc.get("canopies.blobs")) {
    s.canopies.clear();
    for (const auto& item : split_list(*v)) {
      const auto f = fields(item, 7, "canopy");
      if (f[6] < 0) throw ArgumentError("canopy point count must be non-negative");
      s.canopies.push_back({{f[0], f[1], f[2]}, {f[3], f[4], f[5]}, static_cast<std::size_t>(f[6])});
    }
  }
  if (auto v = doc.get("crowns.patches")) {
    s.crowns.clear();
    for (const auto& item : split_list(*v)) {
      const auto f = fields(item, 5, "crown");
      s.crowns.push_back({f[0], f[1], f[2], f[3], f[4]});
    }
  }
  s.validate();
  return s;
}

}  // namespace curbvote
