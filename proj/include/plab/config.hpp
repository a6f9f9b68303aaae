#pragma once

// Run configuration: defaults, an optional key=value file, then flags.

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "plab/core_dynamics.hpp"
#include "plab/errors.hpp"
#include "plab/fatou.hpp"

namespace plab {

inline constexpr const char* kConfigEnvVar = "PLAB_CONFIG";

struct RunConfig {
  double epsilon = 0.005;
  double tol = kDefaultTol;
  double escape_radius = kDefaultEscapeRadius;
  long max_iter = kDefaultMaxIter;
  std::string output_dir = ".";
  int jobs = 1;

  void validate() const {
    if (!(epsilon > 0.0 && epsilon < 0.01)) throw invalid_input("epsilon must lie in (0, 0.01)");
    if (!(tol >= 1e-12 && tol <= 1e-3)) throw invalid_input("tol must lie in [1e-12, 1e-3]");
    if (!(escape_radius >= 10.0) || !std::isfinite(escape_radius))
      throw invalid_input("escape_radius must be finite and at least 10");
    if (max_iter < 1) throw invalid_input("max_iter must be at least 1");
    if (jobs < 1) throw invalid_input("jobs must be at least 1");
    if (output_dir.empty()) throw invalid_input("output_dir must not be empty");
  }
};

namespace detail {

inline double parse_real(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw invalid_input("config: " + key + " is not a number: " + text);
  }
  if (used != text.size()) throw invalid_input("config: " + key + " is not a number: " + text);
  return v;
}

inline long parse_integer(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(text, &used);
  } catch (const std::exception&) {
    throw invalid_input("config: " + key + " is not an integer: " + text);
  }
  if (used != text.size()) throw invalid_input("config: " + key + " is not an integer: " + text);
  return v;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

/// Applies one key=value setting; unknown keys are invalid input.
inline void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "epsilon") cfg.epsilon = detail::parse_real(key, value);
  else if (key == "tol") cfg.tol = detail::parse_real(key, value);
  else if (key == "escape_radius") cfg.escape_radius = detail::parse_real(key, value);
  else if (key == "max_iter") cfg.max_iter = detail::parse_integer(key, value);
  else if (key == "output_dir") cfg.output_dir = value;
  else if (key == "jobs") cfg.jobs = static_cast<int>(detail::parse_integer(key, value));
  else throw invalid_input("config: unknown key '" + key + "'");
}

/// Lines of `key=value`; blank lines and lines starting with '#' are skipped.
inline void apply_config_text(RunConfig& cfg, std::istream& in) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw invalid_input("config line " + std::to_string(lineno) + ": expected key=value");
    apply_setting(cfg, detail::trim(t.substr(0, eq)), detail::trim(t.substr(eq + 1)));
  }
}

inline void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream f(path);
  if (!f) throw invalid_input("cannot read config file: " + path);
  apply_config_text(cfg, f);
}

/// Effective values as ordered key/value text, reals at 17 significant digits.
inline std::map<std::string, std::string> describe(const RunConfig& cfg) {
  auto real = [](double x) {
    std::ostringstream s;
    s.precision(17);
    s << x;
    return s.str();
  };
  return {{"epsilon", real(cfg.epsilon)},
          {"tol", real(cfg.tol)},
          {"escape_radius", real(cfg.escape_radius)},
          {"max_iter", std::to_string(cfg.max_iter)},
          {"output_dir", cfg.output_dir},
          {"jobs", std::to_string(cfg.jobs)}};
}

}  // namespace plab
