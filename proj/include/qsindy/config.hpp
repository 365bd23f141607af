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

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "qsindy/errors.hpp"

namespace qsindy {

/// One value from a TOML-style file: a string, number, boolean or a flat
/// array of those.
struct ConfigValue {
  enum class Type { String, Number, Bool, Array };
  Type type = Type::String;
  std::string text;
  double number = 0.0;
  bool boolean = false;
  std::vector<ConfigValue> items;
};

/// Flat key/value store parsed from a subset of TOML: `[section]` headers,
/// `key = value` lines, `#` comments, quoted strings, numbers, booleans and
/// single-line arrays. Keys are stored as "section.key".
class ConfigTable {
 public:
  static ConfigTable parse(std::string_view text, const std::string& origin = "<string>");
  static ConfigTable load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, ConfigValue>& values() const { return values_; }
  void set(const std::string& key, ConfigValue value) { values_[key] = std::move(value); }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key, std::vector<double> fallback) const;
  std::vector<std::string> get_strings(const std::string& key, std::vector<std::string> fallback) const;

  /// Keys under "prefix." with the prefix stripped.
  std::vector<std::string> keys_under(const std::string& prefix) const;

 private:
  const ConfigValue* find(const std::string& key) const;
  std::map<std::string, ConfigValue> values_;
};

}  // namespace qsindy
