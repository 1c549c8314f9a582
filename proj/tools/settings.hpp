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

#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

namespace voxtend_cli {

// Exit codes.
constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitDiverged = 3;

struct CommandError : std::runtime_error {
  CommandError(int code, const std::string& what) : std::runtime_error(what), code(code) {}
  int code;
};

[[noreturn]] inline void invalid(const std::string& what) {
  throw CommandError(kExitValidation, what);
}

/// Flat key=value settings for one command. Values come from, in rising
/// priority: declared defaults, the --config file, an environment variable
/// bound to the key, and command-line flags.
class Settings {
 public:
  /// Registers `key` with a default and exposes it as --key (underscores
  /// become dashes).
  void declare(CLI::App& app, const std::string& key, const std::string& fallback,
               const std::string& help);
  /// Lets `variable` override the config file (but not a flag).
  void bind_env(const std::string& key, const std::string& variable);
  /// Adds --config to `app`.
  void add_config_option(CLI::App& app);

  /// Merges the sources. Unknown or malformed config lines are validation
  /// errors.
  void resolve();

  const std::string& text(const std::string& key) const;
  bool is_set(const std::string& key) const { return !text(key).empty(); }
  double number(const std::string& key) const;
  std::size_t count(const std::string& key) const;
  std::uint64_t seed(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::vector<std::string> list(const std::string& key) const;

  /// Sorted "key=value" lines of the resolved values.
  std::string echo() const;

 private:
  std::map<std::string, std::string> values_;
  std::map<std::string, std::string> flags_;
  std::map<std::string, std::string> env_;
  std::string config_path_;
};

/// Reads "key=value" lines; blank lines and lines starting with '#' are
/// skipped.
std::map<std::string, std::string> parse_key_values(const std::string& text,
                                                    const std::string& origin);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace voxtend_cli
