// Copyright 2026 The voxtend Authors
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

#include "settings.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace voxtend_cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::map<std::string, std::string> parse_key_values(const std::string& text,
                                                    const std::string& origin) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  for (int n = 1; std::getline(in, line); ++n) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || trim(line.substr(0, eq)).empty()) {
      invalid(origin + ":" + std::to_string(n) + ": expected key=value");
    }
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) invalid("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw CommandError(kExitRuntime, "cannot write " + path);
}

void Settings::declare(CLI::App& app, const std::string& key, const std::string& fallback,
                       const std::string& help) {
  values_[key] = fallback;
  std::string name = key;
  std::replace(name.begin(), name.end(), '_', '-');
  app.add_option_function<std::string>(
         "--" + name, [this, key](const std::string& v) { flags_[key] = v; }, help)
      ->default_str(fallback);
}

void Settings::bind_env(const std::string& key, const std::string& variable) {
  if (const char* v = std::getenv(variable.c_str()); v != nullptr && *v != '\0') {
    env_[key] = v;
  }
}

void Settings::add_config_option(CLI::App& app) {
  app.add_option("--config", config_path_, "key=value settings file (flags win)");
}

void Settings::resolve() {
  if (!config_path_.empty()) {
    for (const auto& [k, v] : parse_key_values(read_file(config_path_), config_path_)) {
      if (!values_.count(k)) invalid(config_path_ + ": unknown key '" + k + "'");
      values_[k] = v;
    }
  }
  for (const auto& [k, v] : env_) values_[k] = v;
  for (const auto& [k, v] : flags_) values_[k] = v;
}

const std::string& Settings::text(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw std::logic_error("undeclared setting " + key);
  return it->second;
}

double Settings::number(const std::string& key) const {
  const std::string& s = text(key);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || end != s.data() + s.size() || !std::isfinite(v)) {
    invalid(key + ": expected a number, got '" + s + "'");
  }
  return v;
}

std::size_t Settings::count(const std::string& key) const {
  const std::string& s = text(key);
  std::size_t v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || end != s.data() + s.size()) {
    invalid(key + ": expected a non-negative integer, got '" + s + "'");
  }
  return v;
}

std::uint64_t Settings::seed(const std::string& key) const {
  const std::string& s = text(key);
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || end != s.data() + s.size()) {
    invalid(key + ": expected a non-negative integer, got '" + s + "'");
  }
  return v;
}

bool Settings::flag(const std::string& key) const {
  const std::string& s = text(key);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  invalid(key + ": expected true or false, got '" + s + "'");
}

std::vector<std::string> Settings::list(const std::string& key) const {
  std::vector<std::string> out;
  std::istringstream in(text(key));
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string Settings::echo() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
  return out;
}

}  // namespace voxtend_cli
