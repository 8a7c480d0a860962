// Copyright 2026 The fragvqe Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file config.hpp
 * @brief Flat "key = value" configuration with dotted sections and
 *        environment overrides.
 *
 * Every key k can be overridden by FRAGVQE_<K>, where K is k upper-cased
 * with '.' and '-' replaced by '_'.
 */

#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fragvqe {

/// Schema violation with the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key, const std::string& what);
  [[nodiscard]] const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

class Config {
 public:
  Config() = default;

  static Config parse(std::istream& in);
  static Config load(const std::filesystem::path& path);

  /// Known keys; parse rejects anything else.
  static const std::vector<std::string>& schema();
  static std::string env_name(const std::string& key);

  /// Applies FRAGVQE_* variables for every schema key.
  void apply_env();

  void set(const std::string& key, const std::string& value);
  [[nodiscard]] bool has(const std::string& key) const;
  [[nodiscard]] std::optional<std::string> get(const std::string& key) const;

  [[nodiscard]] std::string str(const std::string& key, const std::string& fallback) const;
  [[nodiscard]] std::string require(const std::string& key) const;
  [[nodiscard]] int integer(const std::string& key, int fallback) const;
  [[nodiscard]] double real(const std::string& key, double fallback) const;
  [[nodiscard]] bool boolean(const std::string& key, bool fallback) const;
  [[nodiscard]] std::vector<std::string> list(const std::string& key) const;

  /// Directory relative paths are resolved against.
  std::filesystem::path base_dir;

  [[nodiscard]] std::filesystem::path path(const std::string& key) const;
  [[nodiscard]] const std::map<std::string, std::string>& values() const noexcept { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace fragvqe
