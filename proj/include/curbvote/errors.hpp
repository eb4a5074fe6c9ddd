// Copyright 2026 The curbvote Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace curbvote {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numeric argument violates its documented domain.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Malformed input text; carries the 1-based line number of the offending line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class EmptyInputError : public Error {
 public:
  using Error::Error;
};

/// Two coincident points were asked to exchange a directional vote.
class ZeroDistanceError : public Error {
 public:
  using Error::Error;
};

class ChannelMissingError : public Error {
 public:
  explicit ChannelMissingError(const std::string& channel)
      : Error("missing point channel '" + channel + "'"), channel_(channel) {}

  const std::string& channel() const noexcept { return channel_; }

 private:
  std::string channel_;
};

/// Inputs that should share a coordinate frame do not overlap at all.
class FrameMismatchError : public Error {
 public:
  using Error::Error;
};

/// Binary file with a bad magic number, version or size.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Wraps a failure inside one pipeline stage.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& cause)
      : Error("stage '" + stage + "' failed: " + cause), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace curbvote
