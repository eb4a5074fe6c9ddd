// Copyright 2026 The curbvote Authors
// SPDX-License-Identifier: Apache-2.0

#include "curbvote/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <memory>
#include <ostream>
#include <utility>

#include "curbvote/errors.hpp"

namespace curbvote {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Runs `fn` as the named stage, recording its time and rethrowing failures
/// as StageError.
template <typename Fn>
auto run_stage(TimingReport& report, const std::string& name, std::size_t points_in, Fn&& fn) {
  const auto start = Clock::now();
  try {
    auto result = fn();
    report.stages.push_back({name, seconds_since(start), points_in, 0});
    return result;
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

/// Output files staged next to their targets and moved into place together.
class OutputSet {
 public:
  OutputSet() = default;
  OutputSet(const OutputSet&) = delete;
  OutputSet& operator=(const OutputSet&) = delete;
  ~OutputSet() {
    for (const auto& [staged, target] : files_) {
      std::error_code ec;
      std::filesystem::remove(staged, ec);
    }
  }

  std::ofstream open(const std::filesystem::path& target, bool binary) {
    auto staged = target;
    staged += ".partial";
    std::ofstream out(staged, binary ? std::ios::binary : std::ios::out);
    if (!out) throw Error("cannot open '" + staged.string() + "' for writing");
    files_.emplace_back(staged, target);
    return out;
  }

  void commit() {
    for (const auto& [staged, target] : files_) std::filesystem::rename(staged, target);
    files_.clear();
  }

 private:
  std::vector<std::pair<std::filesystem::path, std::filesystem::path>> files_;
};

void close_checked(std::ofstream& out, const std::filesystem::path& target) {
  out.close();
  if (!out) throw Error("failed writing '" + target.string() + "'");
}

PipelineResult run_stages(PointCloud input, const PipelineConfig& config, TimingReport report,
                          Clock::time_point start) {
  PipelineResult result;

  if (config.crop) {
    const CropBox box(config.crop->min, config.crop->max);
    const std::size_t before = input.size();
    input = crop(input, box);
    if (input.empty()) {
      throw StageError("crop", EmptyInputError("no points of " + std::to_string(before) +
                                               " fall inside the crop box")
                                   .what());
    }
  }
  if (input.empty()) throw StageError("parse", "input cloud is empty");
  if (!report.stages.empty()) report.stages.back().points_out = input.size();
  const std::size_t n = input.size();

  std::unique_ptr<NeighborSearch> search = run_stage(report, "index", n, [&] {
    std::unique_ptr<NeighborSearch> s;
    if (config.oracle) {
      s = std::make_unique<BruteForceSearch>(input);
    } else {
      s = std::make_unique<UniformGridIndex>(input, config.voting.cutoff_radius);
    }
    return s;
  });
  report.stages.back().points_out = n;

  const auto tensors = run_stage(report, "vote", n, [&] {
    return sparse_vote(input, *search, config.voting, config.threads);
  });
  report.stages.back().points_out = n;

  result.cloud = run_stage(report, "decompose", n, [&] {
    PointCloud cloud = std::move(input);
    attach_saliency(cloud, decompose_all(tensors, config.threads));
    return cloud;
  });
  report.stages.back().points_out = n;

  result.dem = run_stage(report, "dem", n, [&] { return build_dem(result.cloud, config.ground); });
  report.stages.back().points_out = result.dem.ground_candidates.size();

  result.curbs = run_stage(report, "curb", n, [&] {
    return detect_curbs(result.cloud, result.dem.refined, config.voting, config.curb);
  });
  report.stages.back().points_out = result.curbs.indices.size();
  result.cloud.set_channel("curb_conf", curb_confidence_channel(n, result.curbs));

  result.grid = run_stage(report, "grid", n, [&] {
    std::optional<GridExtent> extent;
    if (config.crop) {
      extent = GridExtent::covering(*config.crop, config.classify.cell_size);
    }
    return classify_cells(result.cloud, result.dem.refined, result.curbs.indices,
                          result.dem.ground_candidates, config.classify, extent);
  });
  report.stages.back().points_out = n;

  run_stage(report, "export", n, [&] {
    OutputSet outputs;
    if (!config.out_cloud.empty()) {
      auto out = outputs.open(config.out_cloud, false);
      write_cloud(out, result.cloud, format_from_extension(config.out_cloud));
      close_checked(out, config.out_cloud);
    }
    if (!config.out_dem.empty()) {
      auto out = outputs.open(config.out_dem, false);
      result.dem.refined.write_esri_ascii(out);
      close_checked(out, config.out_dem);
    }
    if (!config.out_raster.empty()) {
      auto out = outputs.open(config.out_raster, true);
      render_raster(out, result.grid);
      close_checked(out, config.out_raster);
    }
    if (!config.out_grid.empty()) {
      auto out = outputs.open(config.out_grid, true);
      write_compact(out, result.grid);
      close_checked(out, config.out_grid);
    }
    outputs.commit();
    return 0;
  });
  report.stages.back().points_out = n;

  report.total_seconds = seconds_since(start);
  result.report = std::move(report);
  return result;
}

}  // namespace

void PipelineConfig::validate() const {
  voting.validate();
  ground.validate();
  curb.validate();
  classify.validate();
  if (crop) CropBox(crop->min, crop->max);
}

double TimingReport::stage_seconds(const std::string& stage) const {
  for (const auto& s : stages) {
    if (s.stage == stage) return s.seconds;
  }
  return 0.0;
}

double TimingReport::stage_sum() const {
  double sum = 0.0;
  for (const auto& s : stages) sum += s.seconds;
  return sum;
}

void TimingReport::print(std::ostream& out) const {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::fixed << std::setprecision(6);
  for (const auto& s : stages) {
    out << s.stage << ".seconds: " << s.seconds << '\n'
        << s.stage << ".points_in: " << s.points_in << '\n'
        << s.stage << ".points_out: " << s.points_out << '\n';
  }
  out << "total.seconds: " << total_seconds << '\n';
  out.flags(flags);
  out.precision(precision);
}

PipelineResult run_pipeline(const PipelineConfig& config) {
  const auto start = Clock::now();
  try {
    config.validate();
  } catch (const std::exception& e) {
    throw StageError("config", e.what());
  }
  TimingReport report;
  ParsedCloud parsed = run_stage(report, "parse", 0, [&] {
    return read_cloud_file(config.input, config.input_format);
  });
  report.stages.back().points_in = parsed.summary.rows;
  report.stages.back().points_out = parsed.cloud.size();
  return run_stages(std::move(parsed.cloud), config, std::move(report), start);
}

PipelineResult run_pipeline(const PointCloud& input, const PipelineConfig& config) {
  const auto start = Clock::now();
  try {
    config.validate();
  } catch (const std::exception& e) {
    throw StageError("config", e.what());
  }
  TimingReport report;
  report.stages.push_back({"parse", 0.0, input.size(), input.size()});
  return run_stages(input, config, std::move(report), start);
}

}  // namespace curbvote
