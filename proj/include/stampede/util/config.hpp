// Copyright 2026 The Stampede Authors
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

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace stampede::util {

// Line-oriented `key = value` config with [section] headers and '#'
// comments. Parsing keeps section/key order so a file round-trips through
// serialize() losslessly (modulo comments and whitespace).
class ConfigFile {
 public:
  struct Entry {
    std::string section;  // "" = top level
    std::string key;
    std::string value;
  };

  static ConfigFile parse_text(const std::string& text);
  static ConfigFile load(const std::string& path);

  std::string serialize() const;
  void save(const std::string& path) const;

  bool has(const std::string& section, const std::string& key) const;
  const std::string& get_raw(const std::string& section, const std::string& key) const;
  void set(const std::string& section, const std::string& key, const std::string& value);

  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::vector<Entry> entries_;
  std::map<std::pair<std::string, std::string>, std::size_t> index_;
};

// Typed reader that records which keys were consumed; finish() rejects any
// key the caller never asked about, so misspelled config keys fail loudly.
class ConfigBinder {
 public:
  explicit ConfigBinder(const ConfigFile& file) : file_(file) {}

  std::string get_string(const std::string& section, const std::string& key, const std::string& fallback);
  double get_double(const std::string& section, const std::string& key, double fallback);
  int get_int(const std::string& section, const std::string& key, int fallback);
  bool get_bool(const std::string& section, const std::string& key, bool fallback);
  std::vector<double> get_doubles(const std::string& section, const std::string& key, std::vector<double> fallback);

  void finish() const;  // throws std::invalid_argument listing unknown keys

 private:
  const std::string* lookup(const std::string& section, const std::string& key);
  const ConfigFile& file_;
  std::set<std::pair<std::string, std::string>> consumed_;
};

}  // namespace stampede::util
