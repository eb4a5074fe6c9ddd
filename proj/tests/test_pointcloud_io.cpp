// Copyright 2026 The curbvote Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "curbvote/errors.hpp"
#include "curbvote/pointcloud_io.hpp"

namespace curbvote {
namespace {

constexpr const char* kPcd3 =
    "# .PCD v0.7\n"
    "VERSION 0.7\n"
    "FIELDS x y z intensity\n"
    "SIZE 4 4 4 4\n"
    "TYPE F F F F\n"
    "COUNT 1 1 1 1\n"
    "WIDTH 3\n"
    "HEIGHT 1\n"
    "VIEWPOINT 0 0 0 1 0 0 0\n"
    "POINTS 3\n"
    "DATA ascii\n"
    "0 0 0 10\n"
    "1 0 0 20\n"
    "0 1 0.5 30\n";

TEST(ParseCloud, XyzTwoRows) {
  const auto parsed = parse_cloud("0 0 0\n1 2 3\n", CloudFormat::XyzText);
  ASSERT_EQ(parsed.cloud.size(), 2u);
  EXPECT_EQ(parsed.cloud[1], (Point3{1, 2, 3}));
  EXPECT_EQ(parsed.summary.rejected, 0u);
}

TEST(ParseCloud, PcdExtraFieldBecomesChannel) {
  const auto parsed = parse_cloud(kPcd3, CloudFormat::PcdAscii);
  ASSERT_EQ(parsed.cloud.size(), 3u);
  ASSERT_TRUE(parsed.cloud.has_channel("intensity"));
  EXPECT_EQ(parsed.cloud.channel("intensity"), (std::vector<double>{10, 20, 30}));
  EXPECT_DOUBLE_EQ(parsed.cloud[2].z, 0.5);
}

TEST(ParseCloud, NonFiniteRowDroppedAndReported) {
  const auto parsed = parse_cloud("0 0 0\n1 nan 3\n2 2 2\n", CloudFormat::XyzText);
  EXPECT_EQ(parsed.cloud.size(), 2u);
  EXPECT_EQ(parsed.summary.rejected, 1u);
  ASSERT_EQ(parsed.summary.rejected_lines.size(), 1u);
  EXPECT_EQ(parsed.summary.rejected_lines[0], 2u);
}

TEST(ParseCloud, PcdNonFiniteStillCountsTowardDeclaredPoints) {
  std::string text = kPcd3;
  text.replace(text.find("1 0 0 20"), 8, "1 inf 0 20");
  const auto parsed = parse_cloud(text, CloudFormat::PcdAscii);
  EXPECT_EQ(parsed.cloud.size(), 2u);
  EXPECT_EQ(parsed.summary.rejected, 1u);
}

TEST(ParseCloud, PcdCountMismatchIsParseError) {
  std::string text = kPcd3;
  text += "5 5 5 40\n";
  EXPECT_THROW(parse_cloud(text, CloudFormat::PcdAscii), ParseError);
}

TEST(ParseCloud, MalformedHeaderReportsLine) {
  std::string text = kPcd3;
  text.replace(text.find("COUNT 1 1 1 1"), 13, "COUNT 1 1 1");
  try {
    parse_cloud(text, CloudFormat::PcdAscii);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 6u);
  }
}

TEST(ParseCloud, MissingCoordinateFieldRejected) {
  const std::string text =
      "VERSION 0.7\nFIELDS x y i\nSIZE 4 4 4\nTYPE F F F\nCOUNT 1 1 1\nWIDTH 0\nHEIGHT 1\n"
      "VIEWPOINT 0 0 0 1 0 0 0\nPOINTS 0\nDATA ascii\n";
  EXPECT_THROW(parse_cloud(text, CloudFormat::PcdAscii), ParseError);
}

TEST(ParseCloud, BinaryDataRejected) {
  std::string text = kPcd3;
  text.replace(text.find("DATA ascii"), 10, "DATA binary");
  EXPECT_THROW(parse_cloud(text, CloudFormat::PcdAscii), ParseError);
}

TEST(ParseCloud, XyzRaggedRowsRejected) {
  EXPECT_THROW(parse_cloud("0 0 0\n1 2\n", CloudFormat::XyzText), ParseError);
  EXPECT_THROW(parse_cloud("0 0 0 1\n1 2 3\n", CloudFormat::XyzText), ParseError);
  EXPECT_THROW(parse_cloud("0 0 zero\n", CloudFormat::XyzText), ParseError);
}

TEST(ParseCloud, XyzHeaderNamesColumns) {
  const auto parsed = parse_cloud("# x y z truth\n0 0 0 2\n1 1 1 3\n", CloudFormat::XyzText);
  ASSERT_TRUE(parsed.cloud.has_channel("truth"));
  EXPECT_EQ(parsed.cloud.channel("truth")[1], 3.0);
  const auto unnamed = parse_cloud("0 0 0 2\n", CloudFormat::XyzText);
  EXPECT_TRUE(unnamed.cloud.has_channel("col3"));
}

TEST(ParseCloud, FormatNames) {
  EXPECT_EQ(parse_cloud_format("pcd"), CloudFormat::PcdAscii);
  EXPECT_EQ(parse_cloud_format("xyz"), CloudFormat::XyzText);
  EXPECT_THROW(parse_cloud_format("las"), ArgumentError);
  EXPECT_EQ(format_from_extension("a/b.pcd"), CloudFormat::PcdAscii);
  EXPECT_EQ(format_from_extension("a/b.xyz"), CloudFormat::XyzText);
}

TEST(WriteCloud, EmptyCloudHasHeaderOnly) {
  const std::string text = write_cloud(PointCloud{}, CloudFormat::PcdAscii);
  EXPECT_NE(text.find("POINTS 0\n"), std::string::npos);
  EXPECT_EQ(text.substr(text.size() - 11), "DATA ascii\n");
  EXPECT_EQ(parse_cloud(text, CloudFormat::PcdAscii).cloud.size(), 0u);
}

TEST(WriteCloud, ChannelListedInFields) {
  PointCloud c({{1, 2, 3}});
  c.add_channel("stick", {0.5});
  const std::string text = write_cloud(c, CloudFormat::PcdAscii);
  EXPECT_NE(text.find("FIELDS x y z stick\n"), std::string::npos);
}

class RoundTrip : public ::testing::TestWithParam<CloudFormat> {};

TEST_P(RoundTrip, RandomCloudIsReproduced) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  std::vector<Point3> pts;
  std::vector<double> a, b;
  for (int i = 0; i < 100; ++i) {
    pts.push_back({u(rng), u(rng), u(rng) * 1e-6});
    a.push_back(u(rng));
    b.push_back(std::exp(u(rng) / 50.0));
  }
  PointCloud c(pts);
  c.add_channel("a", a);
  c.add_channel("b", b);
  const auto back = parse_cloud(write_cloud(c, GetParam()), GetParam()).cloud;
  ASSERT_EQ(back.size(), c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    EXPECT_NEAR(back[i].x, c[i].x, 1e-9 * std::abs(c[i].x));
    EXPECT_NEAR(back[i].z, c[i].z, 1e-9 * std::abs(c[i].z));
  }
  // Shortest round-trip formatting makes the identity exact.
  EXPECT_EQ(back, c);
}

INSTANTIATE_TEST_SUITE_P(Formats, RoundTrip,
                         ::testing::Values(CloudFormat::PcdAscii, CloudFormat::XyzText));

TEST(Crop, InclusiveBox) {
  const CropBox box({-1, -1, -1}, {1, 1, 1});
  const PointCloud c({{0, 0, 0}, {2, 0, 0}, {1, 1, 1}, {-1, 0, 1.0000001}});
  const auto out = crop(c, box);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0], (Point3{0, 0, 0}));
  EXPECT_EQ(out[1], (Point3{1, 1, 1}));
}

TEST(Crop, InvalidBoxRejected) {
  EXPECT_THROW(CropBox({0, 0, 0}, {1, 0, 1}), ArgumentError);
  EXPECT_THROW(CropBox({0, 0, 0}, {1, 1, -1}), ArgumentError);
}

TEST(Crop, MatchesPerPointCheckAndIsIdempotent) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::vector<Point3> pts;
  std::vector<double> tag;
  for (int i = 0; i < 1000; ++i) {
    pts.push_back({u(rng), u(rng), u(rng)});
    tag.push_back(i);
  }
  PointCloud c(pts);
  c.add_channel("tag", tag);
  const CropBox box({0, 0, 0}, {5, 10, 10});
  std::size_t expected = 0;
  for (const auto& p : pts) expected += (p.x >= 0 && p.x <= 5) ? 1 : 0;
  const auto once = crop(c, box);
  EXPECT_EQ(once.size(), expected);
  EXPECT_EQ(crop(once, box), once);
  // Subsequence of the input, order preserved, channels carried along.
  const auto& t = once.channel("tag");
  for (std::size_t i = 0; i < once.size(); ++i) {
    EXPECT_EQ(once[i], c[static_cast<std::size_t>(t[i])]);
    if (i > 0) EXPECT_LT(t[i - 1], t[i]);
  }
}

TEST(PointCloudType, RejectsNonFiniteAndBadChannels) {
  EXPECT_THROW(PointCloud({{0, std::nan(""), 0}}), ArgumentError);
  PointCloud c({{0, 0, 0}, {1, 1, 1}});
  EXPECT_THROW(c.add_channel("a", {1.0}), ArgumentError);
  c.add_channel("a", {1.0, 2.0});
  EXPECT_THROW(c.add_channel("a", {1.0, 2.0}), ArgumentError);
  EXPECT_THROW(c.channel("missing"), ChannelMissingError);
}

}  // namespace
}  // namespace curbvote
