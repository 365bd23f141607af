// Copyright 2026 The qsindy Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qsindy/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace qsindy {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Drops a trailing comment that is not inside a string.
std::string_view strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

class ValueParser {
 public:
  ValueParser(std::string_view s, std::string where) : s_(s), where_(std::move(where)) {}

  ConfigValue parse_all() {
    ConfigValue v = parse_value(true);
    skip_ws();
    if (pos_ != s_.size()) fail("trailing characters after value");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ConfigError(where_ + ": " + what); }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  ConfigValue parse_value(bool allow_array) {
    skip_ws();
    if (pos_ >= s_.size()) fail("missing value");
    const char c = s_[pos_];
    if (c == '[') {
      if (!allow_array) fail("nested arrays are not supported");
      return parse_array();
    }
    if (c == '"') return parse_string();
    return parse_bare();
  }

  ConfigValue parse_array() {
    ConfigValue v;
    v.type = ConfigValue::Type::Array;
    ++pos_;
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == ']') {
      ++pos_;
      return v;
    }
    while (true) {
      v.items.push_back(parse_value(false));
      skip_ws();
      if (pos_ >= s_.size()) fail("unterminated array");
      if (s_[pos_] == ',') {
        ++pos_;
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == ']') {
          ++pos_;
          return v;
        }
        continue;
      }
      if (s_[pos_] == ']') {
        ++pos_;
        return v;
      }
      fail("expected ',' or ']' in array");
    }
  }

  ConfigValue parse_string() {
    ConfigValue v;
    ++pos_;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      if (s_[pos_] == '\\' && pos_ + 1 < s_.size()) ++pos_;
      v.text.push_back(s_[pos_++]);
    }
    if (pos_ >= s_.size()) fail("unterminated string");
    ++pos_;
    return v;
  }

  ConfigValue parse_bare() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != ']' &&
           !std::isspace(static_cast<unsigned char>(s_[pos_]))) {
      ++pos_;
    }
    const std::string_view tok = s_.substr(start, pos_ - start);
    ConfigValue v;
    if (tok == "true" || tok == "false") {
      v.type = ConfigValue::Type::Bool;
      v.boolean = tok == "true";
      return v;
    }
    std::string num(tok);
    num.erase(std::remove(num.begin(), num.end(), '_'), num.end());
    double d = 0.0;
    const auto res = std::from_chars(num.data(), num.data() + num.size(), d);
    if (res.ec != std::errc() || res.ptr != num.data() + num.size()) fail("invalid value '" + std::string(tok) + "'");
    v.type = ConfigValue::Type::Number;
    v.number = d;
    v.text = std::string(tok);
    return v;
  }

  std::string_view s_;
  std::string where_;
  std::size_t pos_ = 0;
};

const char* type_name(ConfigValue::Type t) {
  switch (t) {
    case ConfigValue::Type::String: return "string";
    case ConfigValue::Type::Number: return "number";
    case ConfigValue::Type::Bool: return "boolean";
    case ConfigValue::Type::Array: return "array";
  }
  return "?";
}

const ConfigValue& expect(const ConfigValue& v, ConfigValue::Type t, const std::string& key) {
  if (v.type != t) throw ConfigError("config key '" + key + "' must be a " + type_name(t));
  return v;
}

}  // namespace

ConfigTable ConfigTable::parse(std::string_view text, const std::string& origin) {
  ConfigTable table;
  std::string section;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find('\n', start), text.size());
    const std::string_view line = trim(strip_comment(text.substr(start, end - start)));
    start = end + 1;
    ++line_no;
    const std::string where = origin + ":" + std::to_string(line_no);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section.empty()) throw ConfigError(where + ": empty section name");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty()) throw ConfigError(where + ": empty key");
    const std::string full = section.empty() ? key : section + "." + key;
    if (table.has(full)) throw ConfigError(where + ": duplicate key '" + full + "'");
    table.values_[full] = ValueParser(line.substr(eq + 1), where).parse_all();
  }
  return table;
}

ConfigTable ConfigTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

const ConfigValue* ConfigTable::find(const std::string& key) const {
  const auto it = values_.find(key);
  return it == values_.end() ? nullptr : &it->second;
}

std::string ConfigTable::get_string(const std::string& key, const std::string& fallback) const {
  const auto* v = find(key);
  return v ? expect(*v, ConfigValue::Type::String, key).text : fallback;
}

double ConfigTable::get_double(const std::string& key, double fallback) const {
  const auto* v = find(key);
  return v ? expect(*v, ConfigValue::Type::Number, key).number : fallback;
}

std::int64_t ConfigTable::get_int(const std::string& key, std::int64_t fallback) const {
  const auto* v = find(key);
  if (!v) return fallback;
  const double d = expect(*v, ConfigValue::Type::Number, key).number;
  if (d != std::floor(d) || std::abs(d) > 9.0e15) throw ConfigError("config key '" + key + "' must be an integer");
  return static_cast<std::int64_t>(d);
}

bool ConfigTable::get_bool(const std::string& key, bool fallback) const {
  const auto* v = find(key);
  return v ? expect(*v, ConfigValue::Type::Bool, key).boolean : fallback;
}

std::vector<double> ConfigTable::get_doubles(const std::string& key, std::vector<double> fallback) const {
  const auto* v = find(key);
  if (!v) return fallback;
  std::vector<double> out;
  for (const auto& item : expect(*v, ConfigValue::Type::Array, key).items) {
    out.push_back(expect(item, ConfigValue::Type::Number, key).number);
  }
  return out;
}

std::vector<std::string> ConfigTable::get_strings(const std::string& key, std::vector<std::string> fallback) const {
  const auto* v = find(key);
  if (!v) return fallback;
  std::vector<std::string> out;
  for (const auto& item : expect(*v, ConfigValue::Type::Array, key).items) {
    out.push_back(expect(item, ConfigValue::Type::String, key).text);
  }
  return out;
}

std::vector<std::string> ConfigTable::keys_under(const std::string& prefix) const {
  std::vector<std::string> out;
  const std::string p = prefix + ".";
  for (const auto& [k, v] : values_) {
    if (k.size() > p.size() && k.compare(0, p.size(), p) == 0) out.push_back(k.substr(p.size()));
  }
  return out;
}

}  // namespace qsindy
