// Copyright 2026 The curbvote Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "curbvote/curb_filter.hpp"
#include "curbvote/dem.hpp"
#include "curbvote/pointcloud_io.hpp"
#include "curbvote/scene.hpp"
#include "curbvote/semantic_grid.hpp"
#include "curbvote/tensor_voting.hpp"

namespace curbvote {

struct PipelineConfig {
  std::filesystem::path input;
  CloudFormat input_format = CloudFormat::PcdAscii;
  std::optional<Aabb> crop;

  VotingParams voting;
  GroundParams ground;
  CurbParams curb;
  ClassifyParams classify;

  std::filesystem::path out_cloud;
  std::filesystem::path out_dem;
  std::filesystem::path out_raster;
  std::filesystem::path out_grid;

  unsigned threads = 1;
  /// Use the brute-force neighbor scan instead of the grid index.
  bool oracle = false;

  /// Checks every parameter block and the crop box.
  void validate() const;

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

/// Config file text (sections input, crop, tensor_voting, dem, curb_filter,
/// semantic_grid, output, runtime). With `annotated` set every key carries a
/// comment describing it; this is the --write-default-config template.
std::string serialize_config(const PipelineConfig& config, bool annotated = false);
/// Keys absent from the text keep the values already in `base`.
PipelineConfig parse_config(std::string_view text, PipelineConfig base = {});
PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base = {});

/// Parses "x0,y0,z0,x1,y1,z1"; throws ArgumentError unless min < max on each axis.
Aabb parse_crop_box(std::string_view text);

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
  std::size_t points_in = 0;
  std::size_t points_out = 0;
};

struct TimingReport {
  /// parse, index, vote, decompose, dem, curb, grid, export, in that order.
  std::vector<StageTiming> stages;
  double total_seconds = 0.0;

  double stage_seconds(const std::string& stage) const;
  double stage_sum() const;
  /// `key: value` lines, times at microsecond precision.
  void print(std::ostream& out) const;
};

/// Everything run_pipeline computed, for callers that want more than files.
struct PipelineResult {
  TimingReport report;
  PointCloud cloud;  // cropped input with saliency and curb_conf channels
  Dem dem;
  CurbDetection curbs;
  SemanticGrid grid;
};

/// crop -> index -> saliency -> DEM -> curbs -> semantic grid -> exports.
///
/// Reads config.input. Outputs are written to temporary siblings and renamed
/// once every stage has succeeded, so a failure leaves no partial outputs.
/// Failures are rethrown as StageError naming the stage.
PipelineResult run_pipeline(const PipelineConfig& config);

/// Same, starting from an in-memory cloud (the parse stage is then free).
PipelineResult run_pipeline(const PointCloud& input, const PipelineConfig& config);

/// Scene description in the key = value format:
///   [scene] x_min x_max y_min y_max road_half_width curb_height grade density
///           noise sampling (lattice|uniform) curb_truth_distance seed
///   [walls] positions = "x:height,x:height"
///   [canopies] blobs = "cx:cy:cz:rx:ry:rz:count,..."
///   [crowns] patches = "x0:x1:y0:y1:height,..."
/// Starts from SceneSpec::street() when `street_defaults` is set, else from an
/// empty flat street.
SceneSpec parse_scene_spec(std::string_view text, bool street_defaults = true);

}  // namespace curbvote
