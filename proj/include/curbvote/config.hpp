// Copyright 2026 The curbvote Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace curbvote {

/// Flat `key = value` text grouped under `[section]` headers. '#' starts a
/// comment. Keys are addressed as "section.key".
class KeyValueDocument {
 public:
  static KeyValueDocument parse(std::string_view text);
  static KeyValueDocument load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::optional<std::string> get(const std::string& key) const;
  void set(const std::string& key, std::string value);

  /// Throws ParseError naming the key's line on a malformed number.
  std::optional<double> get_double(const std::string& key) const;
  std::optional<long long> get_integer(const std::string& key) const;
  std::optional<bool> get_bool(const std::string& key) const;

  /// Keys in first-seen order.
  const std::vector<std::string>& keys() const noexcept { return order_; }

 private:
  std::map<std::string, std::pair<std::string, std::size_t>> values_;  // value, line
  std::vector<std::string> order_;
};

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

/// Splits "a,b,c" into trimmed fields.
std::vector<std::string> split_list(std::string_view text, char separator = ',');

}  // namespace curbvote
