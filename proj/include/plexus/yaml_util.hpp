// Copyright 2026 The plexus-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Strict, line-numbered accessors over yaml-cpp nodes. Every failure is an
// Error(kSchemaError) whose message starts with "<source>:<line>:<col>:".

#pragma once

#include <yaml-cpp/yaml.h>

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "plexus/geometry.hpp"
#include "plexus/hand_model.hpp"

namespace plexus::yamlio {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  // Parses text; syntax errors are reported with their line number.
  YAML::Node parse(const std::string& text) const;
  // Reads a file (kIoFailure when unreadable) and parses it.
  YAML::Node parse_file(const std::string& path) const;

  [[noreturn]] void fail(const YAML::Node& at, const std::string& message) const;

  YAML::Node map(const YAML::Node& parent, const char* key) const;
  YAML::Node seq(const YAML::Node& parent, const char* key) const;
  bool has(const YAML::Node& parent, const char* key) const;
  double num(const YAML::Node& parent, const char* key) const;
  double num_or(const YAML::Node& parent, const char* key, double fallback) const;
  double as_num(const YAML::Node& node) const;
  std::int64_t integer(const YAML::Node& parent, const char* key) const;
  std::int64_t integer_or(const YAML::Node& parent, const char* key, std::int64_t fallback) const;
  std::uint64_t uinteger(const YAML::Node& parent, const char* key) const;
  std::string str(const YAML::Node& parent, const char* key) const;
  std::string str_or(const YAML::Node& parent, const char* key, const std::string& fallback) const;
  bool boolean_or(const YAML::Node& parent, const char* key, bool fallback) const;
  Vec2 vec2(const YAML::Node& parent, const char* key) const;
  Interval interval(const YAML::Node& parent, const char* key) const;
  std::vector<double> numbers(const YAML::Node& parent, const char* key) const;
  // Rejects keys outside `allowed` (catches typos in hand-written files).
  void expect_keys(const YAML::Node& map, std::initializer_list<const char*> allowed) const;

  const std::string& source() const { return source_; }

 private:
  YAML::Node require(const YAML::Node& parent, const char* key) const;
  std::string where(const YAML::Node& node) const;
  std::string source_;
};

// Shortest round-trip decimal text for a double (deterministic output).
std::string format_double(double v);

// Emitter helpers producing deterministic flow sequences.
void emit_vec2(YAML::Emitter& out, Vec2 v);
void emit_interval(YAML::Emitter& out, const Interval& i);
void emit_num(YAML::Emitter& out, double v);

// 64-bit FNV-1a, rendered as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& data);
std::uint64_t fnv1a(const std::string& data);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace plexus::yamlio
