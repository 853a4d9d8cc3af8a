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

#include "plexus/yaml_util.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "plexus/error.hpp"

namespace plexus::yamlio {

std::string Reader::where(const YAML::Node& node) const {
  const YAML::Mark m = node.Mark();
  std::ostringstream os;
  os << source_ << ':' << (m.line >= 0 ? m.line + 1 : 0) << ':' << (m.column >= 0 ? m.column + 1 : 0);
  return os.str();
}

void Reader::fail(const YAML::Node& at, const std::string& message) const {
  throw Error(ErrorCode::kSchemaError, where(at) + ": " + message);
}

YAML::Node Reader::parse(const std::string& text) const {
  try {
    YAML::Node root = YAML::Load(text);
    if (!root.IsMap()) {
      throw Error(ErrorCode::kSchemaError, source_ + ":1:1: top level must be a mapping");
    }
    return root;
  } catch (const YAML::ParserException& e) {
    std::ostringstream os;
    os << source_ << ':' << e.mark.line + 1 << ':' << e.mark.column + 1 << ": " << e.msg;
    throw Error(ErrorCode::kSchemaError, os.str());
  }
}

YAML::Node Reader::parse_file(const std::string& path) const { return parse(read_text_file(path)); }

YAML::Node Reader::require(const YAML::Node& parent, const char* key) const {
  if (!parent.IsMap()) fail(parent, "expected a mapping");
  YAML::Node n = parent[key];
  if (!n) fail(parent, std::string("missing required key '") + key + "'");
  return n;
}

bool Reader::has(const YAML::Node& parent, const char* key) const {
  return parent.IsMap() && parent[key] && !parent[key].IsNull();
}

YAML::Node Reader::map(const YAML::Node& parent, const char* key) const {
  YAML::Node n = require(parent, key);
  if (!n.IsMap()) fail(n, std::string("'") + key + "' must be a mapping");
  return n;
}

YAML::Node Reader::seq(const YAML::Node& parent, const char* key) const {
  YAML::Node n = require(parent, key);
  if (!n.IsSequence()) fail(n, std::string("'") + key + "' must be a sequence");
  return n;
}

double Reader::as_num(const YAML::Node& node) const {
  if (!node.IsScalar()) fail(node, "expected a number");
  const std::string s = node.Scalar();
  double v = 0.0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  if (!s.empty() && *b == '+') ++b;
  const auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e || !std::isfinite(v)) fail(node, "'" + s + "' is not a finite number");
  return v;
}

double Reader::num(const YAML::Node& parent, const char* key) const { return as_num(require(parent, key)); }

double Reader::num_or(const YAML::Node& parent, const char* key, double fallback) const {
  return has(parent, key) ? num(parent, key) : fallback;
}

std::int64_t Reader::integer(const YAML::Node& parent, const char* key) const {
  const YAML::Node n = require(parent, key);
  if (!n.IsScalar()) fail(n, std::string("'") + key + "' must be an integer");
  const std::string s = n.Scalar();
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) fail(n, "'" + s + "' is not an integer");
  return v;
}

std::int64_t Reader::integer_or(const YAML::Node& parent, const char* key, std::int64_t fallback) const {
  return has(parent, key) ? integer(parent, key) : fallback;
}

std::uint64_t Reader::uinteger(const YAML::Node& parent, const char* key) const {
  const YAML::Node n = require(parent, key);
  if (!n.IsScalar()) fail(n, std::string("'") + key + "' must be a non-negative integer");
  const std::string s = n.Scalar();
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) fail(n, "'" + s + "' is not a non-negative integer");
  return v;
}

std::string Reader::str(const YAML::Node& parent, const char* key) const {
  const YAML::Node n = require(parent, key);
  if (!n.IsScalar()) fail(n, std::string("'") + key + "' must be a string");
  return n.Scalar();
}

std::string Reader::str_or(const YAML::Node& parent, const char* key, const std::string& fallback) const {
  return has(parent, key) ? str(parent, key) : fallback;
}

bool Reader::boolean_or(const YAML::Node& parent, const char* key, bool fallback) const {
  if (!has(parent, key)) return fallback;
  const YAML::Node n = parent[key];
  const std::string s = n.IsScalar() ? n.Scalar() : "";
  if (s == "true") return true;
  if (s == "false") return false;
  fail(n, std::string("'") + key + "' must be true or false");
}

Vec2 Reader::vec2(const YAML::Node& parent, const char* key) const {
  const YAML::Node n = require(parent, key);
  if (!n.IsSequence() || n.size() != 2) fail(n, std::string("'") + key + "' must be a pair [x, y]");
  return {as_num(n[0]), as_num(n[1])};
}

Interval Reader::interval(const YAML::Node& parent, const char* key) const {
  const YAML::Node n = require(parent, key);
  if (!n.IsSequence() || n.size() != 2) fail(n, std::string("'") + key + "' must be a pair [min, max]");
  Interval i{as_num(n[0]), as_num(n[1])};
  if (!(i.min < i.max)) fail(n, std::string("'") + key + "' must satisfy min < max");
  return i;
}

std::vector<double> Reader::numbers(const YAML::Node& parent, const char* key) const {
  const YAML::Node n = seq(parent, key);
  std::vector<double> out;
  for (const YAML::Node& v : n) out.push_back(as_num(v));
  return out;
}

void Reader::expect_keys(const YAML::Node& map, std::initializer_list<const char*> allowed) const {
  if (!map.IsMap()) fail(map, "expected a mapping");
  for (const auto& kv : map) {
    const std::string k = kv.first.Scalar();
    const bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; });
    if (!ok) fail(kv.first, "unknown key '" + k + "'");
  }
}

std::string format_double(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

void emit_num(YAML::Emitter& out, double v) { out << YAML::Value << format_double(v); }

void emit_vec2(YAML::Emitter& out, Vec2 v) {
  out << YAML::Flow << YAML::BeginSeq << format_double(v.x) << format_double(v.y) << YAML::EndSeq;
}

void emit_interval(YAML::Emitter& out, const Interval& i) {
  out << YAML::Flow << YAML::BeginSeq << format_double(i.min) << format_double(i.max) << YAML::EndSeq;
}

std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string fnv1a_hex(const std::string& data) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << fnv1a(data);
  return os.str();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write '" + path + "'");
  out << text;
  out.flush();
  if (!out) throw Error(ErrorCode::kIoFailure, "write to '" + path + "' failed");
}

}  // namespace plexus::yamlio
