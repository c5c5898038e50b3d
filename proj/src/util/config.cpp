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

#include "stampede/util/config.hpp"

#include <fstream>
#include <sstream>

namespace stampede::util {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

ConfigFile ConfigFile::parse_text(const std::string& text) {
  ConfigFile cfg;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw std::invalid_argument("config line " + std::to_string(lineno) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
    cfg.set(section, key, value);
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_text(buf.str());
}

std::string ConfigFile::serialize() const {
  std::ostringstream os;
  std::string current;
  bool first = true;
  for (const auto& e : entries_) {
    if (e.section != current || (first && !e.section.empty())) {
      if (!first) os << "\n";
      os << "[" << e.section << "]\n";
      current = e.section;
    }
    os << e.key << " = " << e.value << "\n";
    first = false;
  }
  return os.str();
}

void ConfigFile::save(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write config file: " + path);
  f << serialize();
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  return index_.count({section, key}) != 0;
}

const std::string& ConfigFile::get_raw(const std::string& section, const std::string& key) const {
  auto it = index_.find({section, key});
  if (it == index_.end()) throw std::out_of_range("missing config key [" + section + "] " + key);
  return entries_[it->second].value;
}

void ConfigFile::set(const std::string& section, const std::string& key, const std::string& value) {
  auto it = index_.find({section, key});
  if (it != index_.end()) {
    entries_[it->second].value = value;
    return;
  }
  index_[{section, key}] = entries_.size();
  entries_.push_back({section, key, value});
}

const std::string* ConfigBinder::lookup(const std::string& section, const std::string& key) {
  consumed_.insert({section, key});
  if (!file_.has(section, key)) return nullptr;
  return &file_.get_raw(section, key);
}

std::string ConfigBinder::get_string(const std::string& section, const std::string& key, const std::string& fallback) {
  const std::string* v = lookup(section, key);
  return v ? *v : fallback;
}

double ConfigBinder::get_double(const std::string& section, const std::string& key, double fallback) {
  const std::string* v = lookup(section, key);
  if (!v) return fallback;
  std::size_t pos = 0;
  double d = std::stod(*v, &pos);
  if (pos != v->size()) throw std::invalid_argument("config key " + key + ": not a number: " + *v);
  return d;
}

int ConfigBinder::get_int(const std::string& section, const std::string& key, int fallback) {
  const std::string* v = lookup(section, key);
  if (!v) return fallback;
  std::size_t pos = 0;
  int i = std::stoi(*v, &pos);
  if (pos != v->size()) throw std::invalid_argument("config key " + key + ": not an integer: " + *v);
  return i;
}

bool ConfigBinder::get_bool(const std::string& section, const std::string& key, bool fallback) {
  const std::string* v = lookup(section, key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1") return true;
  if (*v == "false" || *v == "0") return false;
  throw std::invalid_argument("config key " + key + ": not a bool: " + *v);
}

std::vector<double> ConfigBinder::get_doubles(const std::string& section, const std::string& key, std::vector<double> fallback) {
  const std::string* v = lookup(section, key);
  if (!v) return fallback;
  std::vector<double> out;
  std::istringstream is(*v);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    if (tok.find_first_not_of(" \t") == std::string::npos) continue;
    out.push_back(std::stod(tok));
  }
  return out;
}

void ConfigBinder::finish() const {
  std::string unknown;
  for (const auto& e : file_.entries()) {
    if (!consumed_.count({e.section, e.key})) {
      if (!unknown.empty()) unknown += ", ";
      unknown += e.section.empty() ? e.key : ("[" + e.section + "] " + e.key);
    }
  }
  if (!unknown.empty()) throw std::invalid_argument("unknown config keys: " + unknown);
}

}  // namespace stampede::util
