#pragma once

// Run configuration: a small INI dialect with the three sections [grid],
// [scenario], [run]. Unknown sections or keys are errors, as are malformed
// values; every diagnostic carries the line number or key name.

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gcme/algebra.hpp"
#include "gcme/core.hpp"
#include "gcme/grid.hpp"

namespace gcme {

struct IniEntry {
  std::string section;
  std::string key;
  std::string value;
  int line = 0;
};

namespace detail {

inline std::string trimmed(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i)
    if (i == s.size() || s[i] == sep) {
      out.push_back(trimmed(s.substr(start, i - start)));
      start = i + 1;
    }
  return out;
}

}  // namespace detail

inline std::vector<IniEntry> parse_ini(std::istream& is) {
  std::vector<IniEntry> entries;
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string body = detail::trimmed(line);
    if (body.empty() || body[0] == '#' || body[0] == ';') continue;
    if (body.front() == '[') {
      if (body.back() != ']' || body.size() < 3)
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": malformed section header '" + body + "'");
      section = detail::trimmed(body.substr(1, body.size() - 2));
      continue;
    }
    const std::size_t eq = body.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value, got '" + body + "'");
    if (section.empty())
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": key outside any [section]");
    IniEntry e;
    e.section = section;
    e.key = detail::trimmed(body.substr(0, eq));
    e.value = detail::trimmed(body.substr(eq + 1));
    e.line = lineno;
    for (const IniEntry& prev : entries)
      if (prev.section == e.section && prev.key == e.key)
        throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" +
                          e.key + "' in [" + e.section + "]");
    entries.push_back(std::move(e));
  }
  return entries;
}

namespace detail {

inline double config_number(const IniEntry& e) {
  const std::string& v = e.value;
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || !std::isfinite(x))
    throw ConfigError("config key " + e.section + "." + e.key + ": expected a number, got '" +
                      v + "'");
  return x;
}

inline long long config_integer(const IniEntry& e) {
  long long out = 0;
  const auto [ptr, ec] =
      std::from_chars(e.value.data(), e.value.data() + e.value.size(), out);
  if (ec != std::errc() || ptr != e.value.data() + e.value.size())
    throw ConfigError("config key " + e.section + "." + e.key +
                      ": expected an integer, got '" + e.value + "'");
  return out;
}

inline bool config_bool(const IniEntry& e) {
  if (e.value == "true" || e.value == "1" || e.value == "on") return true;
  if (e.value == "false" || e.value == "0" || e.value == "off") return false;
  throw ConfigError("config key " + e.section + "." + e.key + ": expected a boolean, got '" +
                    e.value + "'");
}

}  // namespace detail

inline Rep parse_rep(const std::string& s) {
  if (s == "so3") return Rep::kSo3;
  if (s == "su2") return Rep::kSu2;
  throw ConfigError("unknown representation '" + s + "' (expected so3 or su2)");
}

inline std::vector<double> parse_number_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  for (const std::string& piece : detail::split(s, ',')) {
    if (piece.empty()) throw ConfigError(what + ": empty entry in '" + s + "'");
    char* end = nullptr;
    const double x = std::strtod(piece.c_str(), &end);
    if (end != piece.c_str() + piece.size() || !std::isfinite(x))
      throw ConfigError(what + ": expected a number, got '" + piece + "'");
    out.push_back(x);
  }
  return out;
}

/// Everything a run needs: grid geometry, scenario choice, and the
/// command-specific knobs. Flags applied by the front end override what the
/// config file set; the file overrides the defaults here.
struct RunConfig {
  // [grid]
  int dim = 3;
  double h = 0.1;
  int nx = 16, ny = 16, nt = 16;
  double origin_x = 0.0, origin_y = 0.0, origin_t = 0.0;

  // [scenario]
  std::string scenario = "zero";
  Rep rep = Rep::kSo3;
  int beta = +1;
  std::uint64_t higgs_seed = 101;
  double higgs_amplitude = 0.8;
  int higgs_bandwidth = 2;

  // [run]
  std::string out_dir = ".";
  std::string convention_path;  // empty: documented default convention
  std::string tolerance_profile = "default";
  std::vector<double> lambdas = {0.0, 1.0, -1.0};
  int substeps = 1;
  bool reproject = true;
  bool exact_derivatives = true;
  std::array<int, 3> corner = {1, 1, 1};
  std::string plane = "xy";
  double sqrt_e = 1.0;
  std::optional<double> expected_radius;
  std::array<double, 3> expected_center = {0.0, 0.0, 0.0};
  std::string oracles;  // semicolon-separated scenario specs for calibrate

  Grid make_grid() const {
    if (dim == 2) return Grid(2, h, {nx, nt, 1}, {origin_x, origin_t, 0.0});
    return Grid(3, h, {nx, ny, nt}, {origin_x, origin_y, origin_t});
  }
};

inline RunConfig parse_run_config(std::istream& is) {
  const std::vector<IniEntry> entries = parse_ini(is);
  RunConfig cfg;

  // dim steers which grid keys are legal, so resolve it first.
  for (const IniEntry& e : entries)
    if (e.section == "grid" && e.key == "dim") {
      const long long d = detail::config_integer(e);
      if (d != 2 && d != 3)
        throw ConfigError("config key grid.dim: must be 2 or 3, got '" + e.value + "'");
      cfg.dim = static_cast<int>(d);
    }

  for (const IniEntry& e : entries) {
    if (e.section == "grid") {
      if (e.key == "dim") continue;
      if ((e.key == "ny" || e.key == "origin_y") && cfg.dim == 2)
        throw ConfigError("config key grid." + e.key + ": needs dim = 3");
      if (e.key == "h") cfg.h = detail::config_number(e);
      else if (e.key == "nx") cfg.nx = static_cast<int>(detail::config_integer(e));
      else if (e.key == "ny") cfg.ny = static_cast<int>(detail::config_integer(e));
      else if (e.key == "nt") cfg.nt = static_cast<int>(detail::config_integer(e));
      else if (e.key == "origin_x") cfg.origin_x = detail::config_number(e);
      else if (e.key == "origin_y") cfg.origin_y = detail::config_number(e);
      else if (e.key == "origin_t") cfg.origin_t = detail::config_number(e);
      else
        throw ConfigError("config line " + std::to_string(e.line) + ": unknown key grid." +
                          e.key);
    } else if (e.section == "scenario") {
      if (e.key == "spec") cfg.scenario = e.value;
      else if (e.key == "rep") cfg.rep = parse_rep(e.value);
      else if (e.key == "beta") {
        const long long b = detail::config_integer(e);
        if (b != 1 && b != -1)
          throw ConfigError("config key scenario.beta: must be +1 or -1");
        cfg.beta = static_cast<int>(b);
      } else if (e.key == "higgs_seed")
        cfg.higgs_seed = static_cast<std::uint64_t>(detail::config_integer(e));
      else if (e.key == "higgs_amplitude") cfg.higgs_amplitude = detail::config_number(e);
      else if (e.key == "higgs_bandwidth")
        cfg.higgs_bandwidth = static_cast<int>(detail::config_integer(e));
      else
        throw ConfigError("config line " + std::to_string(e.line) +
                          ": unknown key scenario." + e.key);
    } else if (e.section == "run") {
      if (e.key == "out") cfg.out_dir = e.value;
      else if (e.key == "convention") cfg.convention_path = e.value;
      else if (e.key == "tolerance_profile") cfg.tolerance_profile = e.value;
      else if (e.key == "lambda")
        cfg.lambdas = parse_number_list(e.value, "config key run.lambda");
      else if (e.key == "substeps") cfg.substeps = static_cast<int>(detail::config_integer(e));
      else if (e.key == "reproject") cfg.reproject = detail::config_bool(e);
      else if (e.key == "derivatives") {
        if (e.value == "exact") cfg.exact_derivatives = true;
        else if (e.value == "fd") cfg.exact_derivatives = false;
        else
          throw ConfigError("config key run.derivatives: expected exact or fd, got '" +
                            e.value + "'");
      } else if (e.key == "corner") {
        const auto v = parse_number_list(e.value, "config key run.corner");
        if (v.size() != static_cast<std::size_t>(cfg.dim))
          throw ConfigError("config key run.corner: expected " + std::to_string(cfg.dim) +
                            " indices");
        for (std::size_t i = 0; i < v.size(); ++i) cfg.corner[i] = static_cast<int>(v[i]);
        if (cfg.dim == 2) cfg.corner[2] = 0;
      } else if (e.key == "plane") cfg.plane = e.value;
      else if (e.key == "sqrt_e") cfg.sqrt_e = detail::config_number(e);
      else if (e.key == "expected_radius") cfg.expected_radius = detail::config_number(e);
      else if (e.key == "expected_center") {
        const auto v = parse_number_list(e.value, "config key run.expected_center");
        if (v.size() != 3)
          throw ConfigError("config key run.expected_center: expected 3 coordinates");
        cfg.expected_center = {v[0], v[1], v[2]};
      } else if (e.key == "oracles") cfg.oracles = e.value;
      else
        throw ConfigError("config line " + std::to_string(e.line) + ": unknown key run." +
                          e.key);
    } else {
      throw ConfigError("config line " + std::to_string(e.line) + ": unknown section [" +
                        e.section + "]");
    }
  }
  return cfg;
}

inline RunConfig parse_run_config(const std::string& text) {
  std::istringstream is(text);
  return parse_run_config(is);
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file '" + path + "'");
  return parse_run_config(is);
}

}  // namespace gcme
