#pragma once
/// @file report.hpp
/// Verification reports: named residual checks with tolerances, serialized
/// as JSON (schema_version 1). Timing lives in its own object so the checks
/// stay byte-identical across runs with the same seed.

#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "sasaki/errors.hpp"

namespace sasaki {

inline constexpr int report_schema_version = 1;

struct Check {
  std::string name;
  double max_residual = 0.0;
  double mean_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;  ///< optional caveat, empty when none
};

struct VerificationReport {
  std::string name;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  /// measured quantities that are not pass/fail (emitted when non-empty)
  nlohmann::ordered_json measurements = nlohmann::ordered_json::object();
  std::vector<Check> checks;
  std::uint64_t seed = 0;
  std::vector<std::string> caveats;
  std::map<std::string, double> timing;

  /// pass iff max < tol; NaN residuals fail.
  Check& add(std::string name, double max_residual, double mean_residual, double tolerance, std::string note = {}) {
    Check c;
    c.name = std::move(name);
    c.max_residual = max_residual;
    c.mean_residual = mean_residual;
    c.tolerance = tolerance;
    c.pass = max_residual < tolerance;
    c.note = std::move(note);
    checks.push_back(std::move(c));
    return checks.back();
  }
  Check& add(std::string name, double residual, double tolerance, std::string note = {}) {
    return add(std::move(name), residual, residual, tolerance, std::move(note));
  }
  /// Boolean facts are recorded as residual 0 (true) or 1 (false) against tolerance 0.5.
  Check& add_flag(std::string name, bool ok, std::string note = {}) {
    return add(std::move(name), ok ? 0.0 : 1.0, 0.5, std::move(note));
  }

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  const Check* find(const std::string& n) const {
    for (const auto& c : checks)
      if (c.name == n) return &c;
    return nullptr;
  }
  const Check& at(const std::string& n) const {
    if (const Check* c = find(n)) return *c;
    throw Error("report has no check named " + n);
  }
  std::vector<std::string> failures() const {
    std::vector<std::string> out;
    for (const auto& c : checks)
      if (!c.pass) out.push_back(c.name);
    return out;
  }
};

namespace detail {
inline nlohmann::ordered_json number_or_null(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}
}  // namespace detail

inline nlohmann::ordered_json to_json(const VerificationReport& r, bool with_timing = true) {
  nlohmann::ordered_json j;
  j["schema_version"] = report_schema_version;
  j["name"] = r.name;
  j["config"] = r.config;
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) {
    nlohmann::ordered_json cj;
    cj["name"] = c.name;
    cj["max_residual"] = detail::number_or_null(c.max_residual);
    cj["mean_residual"] = detail::number_or_null(c.mean_residual);
    cj["tolerance"] = c.tolerance;
    cj["pass"] = c.pass;
    if (!c.note.empty()) cj["note"] = c.note;
    j["checks"].push_back(cj);
  }
  if (!r.measurements.empty()) j["measurements"] = r.measurements;
  j["seed"] = r.seed;
  j["pass"] = r.all_pass();
  if (!r.caveats.empty()) j["caveats"] = r.caveats;
  if (with_timing) {
    nlohmann::ordered_json t = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.timing) t[k] = v;
    j["timing_seconds"] = t;
  }
  return j;
}

inline void write_report(const VerificationReport& r, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path);
  os << to_json(r).dump(2) << '\n';
}

}  // namespace sasaki
