// Copyright 2026 The curbvote Authors
// SPDX-License-Identifier: Apache-2.0

#include "curbvote/pointcloud_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>

#include "curbvote/config.hpp"
#include "curbvote/errors.hpp"

namespace curbvote {
namespace {

std::vector<std::string_view> tokenize(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

std::optional<double> to_double(std::string_view token) {
  double value = 0.0;
  // from_chars rejects a leading '+', which some writers emit.
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) return std::nullopt;
  return value;
}

std::optional<long long> to_integer(std::string_view token) {
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) return std::nullopt;
  return value;
}

bool is_comment_or_blank(std::string_view line) {
  for (char c : line) {
    if (c == '#') return true;
    if (c != ' ' && c != '\t' && c != '\r') return false;
  }
  return true;
}

/// Accumulates rows into points and channel columns.
class CloudBuilder {
 public:
  CloudBuilder(std::array<std::size_t, 3> xyz, std::vector<std::pair<std::string, std::size_t>> extra)
      : xyz_(xyz), extra_(std::move(extra)), columns_(extra_.size()) {}

  void add_row(const std::vector<std::string_view>& tokens, std::size_t line) {
    ++summary_.rows;
    std::vector<double> values(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      const auto v = to_double(tokens[i]);
      if (!v) throw ParseError(line, "not a number: '" + std::string(tokens[i]) + "'");
      values[i] = *v;
    }
    const Point3 p{values[xyz_[0]], values[xyz_[1]], values[xyz_[2]]};
    if (!is_finite(p)) {
      ++summary_.rejected;
      summary_.rejected_lines.push_back(line);
      return;
    }
    points_.push_back(p);
    for (std::size_t c = 0; c < extra_.size(); ++c) columns_[c].push_back(values[extra_[c].second]);
  }

  ParsedCloud finish() {
    ParsedCloud out{PointCloud(std::move(points_)), summary_};
    for (std::size_t c = 0; c < extra_.size(); ++c) {
      out.cloud.add_channel(extra_[c].first, std::move(columns_[c]));
    }
    return out;
  }

  std::size_t rows() const noexcept { return summary_.rows; }

 private:
  std::array<std::size_t, 3> xyz_;
  std::vector<std::pair<std::string, std::size_t>> extra_;
  std::vector<Point3> points_;
  std::vector<std::vector<double>> columns_;
  ParseSummary summary_;
};

CloudBuilder builder_for_fields(const std::vector<std::string>& fields, std::size_t line) {
  std::array<std::optional<std::size_t>, 3> xyz;
  std::vector<std::pair<std::string, std::size_t>> extra;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const auto& f = fields[i];
    const int axis = f == "x" ? 0 : f == "y" ? 1 : f == "z" ? 2 : -1;
    if (axis >= 0) {
      if (xyz[axis]) throw ParseError(line, "field '" + f + "' repeated");
      xyz[axis] = i;
      continue;
    }
    for (const auto& e : extra) {
      if (e.first == f) throw ParseError(line, "field '" + f + "' repeated");
    }
    extra.emplace_back(f, i);
  }
  if (!xyz[0] || !xyz[1] || !xyz[2]) throw ParseError(line, "fields must include x, y and z");
  return CloudBuilder({*xyz[0], *xyz[1], *xyz[2]}, std::move(extra));
}

ParsedCloud parse_pcd(std::istream& in) {
  static constexpr std::array<std::string_view, 10> kOrder = {
      "VERSION", "FIELDS", "SIZE", "TYPE", "COUNT", "WIDTH", "HEIGHT", "VIEWPOINT", "POINTS", "DATA"};

  std::string text;
  std::size_t line_no = 0;
  std::size_t next_keyword = 0;
  std::vector<std::string> fields;
  std::optional<long long> width, height, points;

  auto expect_count = [&](const std::vector<std::string_view>& t, std::size_t line) {
    if (fields.empty()) throw ParseError(line, std::string(t[0]) + " before FIELDS");
    if (t.size() - 1 != fields.size()) {
      throw ParseError(line, std::string(t[0]) + " lists " + std::to_string(t.size() - 1) +
                                 " entries for " + std::to_string(fields.size()) + " fields");
    }
  };

  bool in_data = false;
  std::size_t data_line = 0;
  while (!in_data && std::getline(in, text)) {
    ++line_no;
    if (is_comment_or_blank(text)) continue;
    const auto t = tokenize(text);
    std::size_t k = next_keyword;
    while (k < kOrder.size() && kOrder[k] != t[0]) ++k;
    if (k == kOrder.size()) {
      throw ParseError(line_no, "unexpected header entry '" + std::string(t[0]) + "'");
    }
    next_keyword = k + 1;
    const std::string_view key = t[0];
    if (key == "VERSION") {
      continue;
    } else if (key == "FIELDS") {
      for (std::size_t i = 1; i < t.size(); ++i) fields.emplace_back(t[i]);
      if (fields.empty()) throw ParseError(line_no, "FIELDS is empty");
    } else if (key == "SIZE") {
      expect_count(t, line_no);
    } else if (key == "TYPE") {
      expect_count(t, line_no);
      for (std::size_t i = 1; i < t.size(); ++i) {
        if (t[i] != "F" && t[i] != "I" && t[i] != "U") {
          throw ParseError(line_no, "unknown TYPE '" + std::string(t[i]) + "'");
        }
      }
    } else if (key == "COUNT") {
      expect_count(t, line_no);
      for (std::size_t i = 1; i < t.size(); ++i) {
        if (t[i] != "1") throw ParseError(line_no, "only COUNT 1 fields are supported");
      }
    } else if (key == "WIDTH" || key == "HEIGHT" || key == "POINTS") {
      const auto v = t.size() == 2 ? to_integer(t[1]) : std::nullopt;
      if (!v || *v < 0) throw ParseError(line_no, std::string(key) + " needs one non-negative integer");
      (key == "WIDTH" ? width : key == "HEIGHT" ? height : points) = *v;
    } else if (key == "VIEWPOINT") {
      if (t.size() != 8) throw ParseError(line_no, "VIEWPOINT needs 7 values");
    } else if (key == "DATA") {
      if (t.size() != 2 || t[1] != "ascii") {
        throw ParseError(line_no, "only 'DATA ascii' is supported");
      }
      in_data = true;
      data_line = line_no;
    }
  }
  if (!in_data) throw ParseError(line_no + 1, "header ended without DATA");
  if (fields.empty()) throw ParseError(data_line, "header has no FIELDS");
  long long declared = 0;
  if (points) {
    declared = *points;
  } else if (width) {
    declared = *width * height.value_or(1);
  } else {
    throw ParseError(data_line, "header declares neither POINTS nor WIDTH");
  }

  CloudBuilder builder = builder_for_fields(fields, data_line);
  while (std::getline(in, text)) {
    ++line_no;
    if (is_comment_or_blank(text)) continue;
    const auto t = tokenize(text);
    if (t.size() != fields.size()) {
      throw ParseError(line_no, "row has " + std::to_string(t.size()) + " values, expected " +
                                    std::to_string(fields.size()));
    }
    builder.add_row(t, line_no);
  }
  if (static_cast<long long>(builder.rows()) != declared) {
    throw ParseError(line_no, "header declares " + std::to_string(declared) + " points, found " +
                                  std::to_string(builder.rows()));
  }
  return builder.finish();
}

ParsedCloud parse_xyz(std::istream& in) {
  std::string text;
  std::size_t line_no = 0;
  std::vector<std::string> names;  // from a "# x y z ..." comment
  std::optional<CloudBuilder> builder;
  std::size_t columns = 0;

  while (std::getline(in, text)) {
    ++line_no;
    if (is_comment_or_blank(text)) {
      if (!builder && names.empty()) {
        const auto hash = text.find('#');
        if (hash != std::string::npos) {
          const auto t = tokenize(std::string_view(text).substr(hash + 1));
          if (t.size() >= 3 && t[0] == "x" && t[1] == "y" && t[2] == "z") {
            for (auto tok : t) names.emplace_back(tok);
          }
        }
      }
      continue;
    }
    const auto t = tokenize(text);
    if (!builder) {
      columns = t.size();
      if (columns < 3) throw ParseError(line_no, "rows need at least x y z");
      if (!names.empty() && names.size() != columns) {
        throw ParseError(line_no, "row has " + std::to_string(columns) +
                                      " values but the header names " +
                                      std::to_string(names.size()));
      }
      if (names.empty()) {
        names = {"x", "y", "z"};
        for (std::size_t c = 3; c < columns; ++c) names.push_back("col" + std::to_string(c));
      }
      builder.emplace(builder_for_fields(names, line_no));
    }
    if (t.size() != columns) {
      throw ParseError(line_no, "row has " + std::to_string(t.size()) + " values, expected " +
                                    std::to_string(columns));
    }
    builder->add_row(t, line_no);
  }
  if (!builder) {
    std::vector<std::pair<std::string, std::size_t>> extra;
    for (std::size_t c = 3; c < names.size(); ++c) extra.emplace_back(names[c], c);
    builder.emplace(CloudBuilder({0, 1, 2}, std::move(extra)));
  }
  return builder->finish();
}

void write_row(std::ostream& out, const PointCloud& cloud, std::size_t i) {
  const auto& p = cloud[i];
  out << format_double(p.x) << ' ' << format_double(p.y) << ' ' << format_double(p.z);
  for (const auto& c : cloud.channels()) out << ' ' << format_double(c.values[i]);
  out << '\n';
}

}  // namespace

CloudFormat parse_cloud_format(std::string_view name) {
  if (name == "pcd" || name == "pcd-ascii" || name == "PCD-ASCII") return CloudFormat::PcdAscii;
  if (name == "xyz" || name == "xyz-text" || name == "XYZ-text") return CloudFormat::XyzText;
  throw ArgumentError("unknown cloud format '" + std::string(name) + "' (expected pcd or xyz)");
}

std::string_view to_string(CloudFormat format) {
  return format == CloudFormat::PcdAscii ? "pcd" : "xyz";
}

CloudFormat format_from_extension(const std::filesystem::path& path) {
  return path.extension() == ".pcd" ? CloudFormat::PcdAscii : CloudFormat::XyzText;
}

ParsedCloud parse_cloud(std::istream& in, CloudFormat format) {
  return format == CloudFormat::PcdAscii ? parse_pcd(in) : parse_xyz(in);
}

ParsedCloud parse_cloud(std::string_view text, CloudFormat format) {
  std::istringstream in{std::string(text)};
  return parse_cloud(in, format);
}

ParsedCloud read_cloud_file(const std::filesystem::path& path, CloudFormat format) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "' for reading");
  return parse_cloud(in, format);
}

void write_cloud(std::ostream& out, const PointCloud& cloud, CloudFormat format) {
  const std::size_t n = cloud.size();
  const std::size_t fields = 3 + cloud.channels().size();
  if (format == CloudFormat::PcdAscii) {
    out << "# .PCD v0.7 - Point Cloud Data file format\nVERSION 0.7\nFIELDS x y z";
    for (const auto& c : cloud.channels()) out << ' ' << c.name;
    out << "\nSIZE";
    for (std::size_t i = 0; i < fields; ++i) out << " 8";
    out << "\nTYPE";
    for (std::size_t i = 0; i < fields; ++i) out << " F";
    out << "\nCOUNT";
    for (std::size_t i = 0; i < fields; ++i) out << " 1";
    out << "\nWIDTH " << n << "\nHEIGHT 1\nVIEWPOINT 0 0 0 1 0 0 0\nPOINTS " << n
        << "\nDATA ascii\n";
  } else {
    out << "# x y z";
    for (const auto& c : cloud.channels()) out << ' ' << c.name;
    out << '\n';
  }
  for (std::size_t i = 0; i < n; ++i) write_row(out, cloud, i);
  if (!out) throw Error("write failed");
}

std::string write_cloud(const PointCloud& cloud, CloudFormat format) {
  std::ostringstream out;
  write_cloud(out, cloud, format);
  return out.str();
}

void write_cloud_file(const std::filesystem::path& path, const PointCloud& cloud,
                      CloudFormat format) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  write_cloud(out, cloud, format);
}

}  // namespace curbvote
