// Copyright 2026 The fragvqe Authors
// SPDX-License-Identifier: Apache-2.0

#include "fragvqe/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace fragvqe {

ConfigError::ConfigError(const std::string& key, const std::string& what)
    : std::runtime_error(key.empty() ? what : key + ": " + what), key_(key) {}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

const std::vector<std::string>& Config::schema() {
  static const std::vector<std::string> keys = {
      "integrals",
      "rotation",
      "partition",
      "partition.electrons",
      "reference",
      "method",
      "embed.occ",
      "embed.prefactor",
      "hea.layers",
      "hea.entangler",
      "hea.sequence",
      "hea.final_layer",
      "fragment.number_penalty",
      "fragment.spin_penalty",
      "fragment.solver",
      "optimizer.gtol",
      "optimizer.max_evals",
      "optimizer.restarts",
      "optimizer.seed",
      "optimizer.init_low",
      "optimizer.init_high",
      "optimizer.bound",
      "adapt.pool",
      "adapt.grad_threshold",
      "adapt.max_depth",
      "exact.sector",
      "exact.multiplicity",
      "scan.integrals",
      "scan.method",
      "output.dir",
      "run.jobs",
  };
  return keys;
}

std::string Config::env_name(const std::string& key) {
  std::string s = "FRAGVQE_";
  for (char c : key) s += (c == '.' || c == '-') ? '_' : static_cast<char>(std::toupper(c));
  return s;
}

Config Config::parse(std::istream& in) {
  Config c;
  std::string line;
  std::string section;
  std::size_t lineno = 0;
  const auto& keys = schema();
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("", "line " + std::to_string(lineno) + ": unterminated section");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("", "line " + std::to_string(lineno) + ": expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    if (!section.empty()) key = section + "." + key;
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw ConfigError(key, "unknown key");
    c.values_[key] = trim(line.substr(eq + 1));
  }
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  Config c = parse(in);
  c.base_dir = path.parent_path();
  return c;
}

void Config::apply_env() {
  for (const std::string& key : schema())
    if (const char* v = std::getenv(env_name(key).c_str())) values_[key] = v;
}

void Config::set(const std::string& key, const std::string& value) {
  const auto& keys = schema();
  if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw ConfigError(key, "unknown key");
  values_[key] = value;
}

bool Config::has(const std::string& key) const { return values_.count(key) != 0; }

std::optional<std::string> Config::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string Config::str(const std::string& key, const std::string& fallback) const {
  return get(key).value_or(fallback);
}

std::string Config::require(const std::string& key) const {
  auto v = get(key);
  if (!v || v->empty()) throw ConfigError(key, "required field is missing");
  return *v;
}

int Config::integer(const std::string& key, int fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  int out = 0;
  const auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || p != v->data() + v->size()) throw ConfigError(key, "expected an integer, got '" + *v + "'");
  return out;
}

double Config::real(const std::string& key, double fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  char* end = nullptr;
  const double d = std::strtod(v->c_str(), &end);
  if (v->empty() || *end != '\0') throw ConfigError(key, "expected a number, got '" + *v + "'");
  return d;
}

bool Config::boolean(const std::string& key, bool fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  throw ConfigError(key, "expected true or false, got '" + *v + "'");
}

std::vector<std::string> Config::list(const std::string& key) const {
  std::vector<std::string> out;
  auto v = get(key);
  if (!v) return out;
  std::stringstream ss(*v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::filesystem::path Config::path(const std::string& key) const {
  std::filesystem::path p = require(key);
  if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
  return p;
}

}  // namespace fragvqe
