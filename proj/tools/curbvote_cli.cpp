// Copyright 2026 The curbvote Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end: runs the curb detection pipeline, writes the default
// config template, or generates a synthetic street scene.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "curbvote/errors.hpp"
#include "curbvote/pipeline.hpp"
#include "curbvote/pointcloud_io.hpp"
#include "curbvote/scene.hpp"

namespace {

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw curbvote::Error("cannot open '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

int generate(const std::string& spec_path, const std::string& out_path) {
  const curbvote::SceneSpec spec = curbvote::parse_scene_spec(read_text(spec_path));
  const curbvote::Scene scene = curbvote::generate_scene(spec);
  if (out_path.empty()) {
    curbvote::write_cloud(std::cout, scene.cloud, curbvote::CloudFormat::PcdAscii);
  } else {
    curbvote::write_cloud_file(out_path, scene.cloud, curbvote::format_from_extension(out_path));
    std::cerr << "scene: " << scene.cloud.size() << " points written to " << out_path << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Curb detection and semantic grid mapping for LiDAR point clouds"};

  std::string input;
  std::string format;
  std::string config_path;
  std::string crop;
  std::optional<double> sigma;
  std::optional<unsigned> threads;
  std::string out_cloud;
  std::string out_dem;
  std::string out_raster;
  std::string out_grid;
  bool oracle = false;
  std::string gen_scene;
  bool write_default = false;

  app.add_option("--input", input, "Input point cloud");
  app.add_option("--format", format, "Input format: pcd or xyz (default: from extension)");
  app.add_option("--config", config_path, "Config file (key = value with [section] headers)");
  app.add_option("--crop", crop, "Crop box \"x0,y0,z0,x1,y1,z1\"");
  app.add_option("--sigma", sigma, "Voting scale in meters");
  app.add_option("--threads", threads, "Worker threads (0 = all cores)");
  app.add_option("--out-cloud", out_cloud, "Labeled cloud output (.pcd or .xyz)");
  app.add_option("--out-dem", out_dem, "DEM output (ESRI ASCII grid)");
  app.add_option("--out-raster", out_raster, "Semantic grid raster output (P6 pixmap)");
  app.add_option("--out-grid", out_grid, "Semantic grid compact output");
  app.add_flag("--oracle", oracle, "Use brute-force neighbor search");
  app.add_option("--gen-scene", gen_scene, "Generate a synthetic scene from a spec file");
  app.add_flag("--write-default-config", write_default, "Print the annotated default config");

  CLI11_PARSE(app, argc, argv);

  try {
    if (write_default) {
      std::cout << curbvote::serialize_config(curbvote::PipelineConfig{}, true);
      return 0;
    }
    if (!gen_scene.empty()) return generate(gen_scene, out_cloud);

    curbvote::PipelineConfig config;
    if (!config_path.empty()) config = curbvote::load_config(config_path, config);
    if (!input.empty()) {
      config.input = input;
      if (format.empty()) config.input_format = curbvote::format_from_extension(input);
    }
    if (!format.empty()) config.input_format = curbvote::parse_cloud_format(format);
    if (!crop.empty()) config.crop = curbvote::parse_crop_box(crop);
    if (sigma) {
      const bool include_self = config.voting.include_self;
      config.voting = curbvote::VotingParams::with_sigma(*sigma);
      config.voting.include_self = include_self;
    }
    if (threads) config.threads = *threads;
    if (!out_cloud.empty()) config.out_cloud = out_cloud;
    if (!out_dem.empty()) config.out_dem = out_dem;
    if (!out_raster.empty()) config.out_raster = out_raster;
    if (!out_grid.empty()) config.out_grid = out_grid;
    if (oracle) config.oracle = true;
    if (config.input.empty()) throw curbvote::ArgumentError("no input given (--input or config)");

    const curbvote::PipelineResult result = curbvote::run_pipeline(config);
    result.report.print(std::cout);
    std::cout << "curb_points: " << result.curbs.indices.size() << '\n';
    for (const auto label : curbvote::kAllLabels) {
      std::cout << "cells." << curbvote::label_name(label) << ": " << result.grid.count(label)
                << '\n';
    }
    return 0;
  } catch (const curbvote::StageError& e) {
    std::cerr << "curbvote: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "curbvote: stage 'setup' failed: " << e.what() << '\n';
    return 1;
  }
}
