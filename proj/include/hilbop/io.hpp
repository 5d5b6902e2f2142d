#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "hilbop/error.hpp"
#include "hilbop/measure.hpp"

namespace hilbop {

// Measure spec files:
//   {"atoms": [{"t": 0.5, "w": 1.0}, ...], "density": {"c": 1.0, "kappa": 0.0, "delta": 0.0}}
// Both keys are optional but at least one must be present. Within "density", c defaults to 1 and
// kappa, delta to 0. Unknown keys are rejected.

inline Measure measure_from_json(const nlohmann::json& j) {
  auto bad = [](const std::string& what) { return parameter_error("io", "measure spec: " + what); };
  if (!j.is_object()) throw bad("top level must be an object");
  for (const auto& [k, v] : j.items())
    if (k != "atoms" && k != "density") throw bad("unknown key '" + k + "'");
  if (!j.contains("atoms") && !j.contains("density")) throw bad("needs 'atoms' or 'density'");

  auto number = [&](const nlohmann::json& o, const char* key, double fallback, bool required) {
    if (!o.contains(key)) {
      if (required) throw bad(std::string("missing '") + key + "'");
      return fallback;
    }
    if (!o.at(key).is_number()) throw bad(std::string("'") + key + "' must be a number");
    return o.at(key).get<double>();
  };

  std::vector<Atom> atoms;
  if (j.contains("atoms")) {
    if (!j.at("atoms").is_array()) throw bad("'atoms' must be an array");
    for (const auto& a : j.at("atoms")) {
      if (!a.is_object()) throw bad("each atom must be an object");
      for (const auto& [k, v] : a.items())
        if (k != "t" && k != "w") throw bad("unknown atom key '" + k + "'");
      const Atom at{number(a, "t", 0.0, true), number(a, "w", 0.0, true)};
      if (!(at.t >= 0.0 && at.t < 1.0)) throw bad("atom position must lie in [0, 1)");
      if (!(at.w > 0.0) || !std::isfinite(at.w)) throw bad("atom weight must be positive");
      atoms.push_back(at);
    }
  }
  std::optional<Density> density;
  if (j.contains("density")) {
    const auto& d = j.at("density");
    if (!d.is_object()) throw bad("'density' must be an object");
    for (const auto& [k, v] : d.items())
      if (k != "c" && k != "kappa" && k != "delta") throw bad("unknown density key '" + k + "'");
    Density den;
    den.c = number(d, "c", 1.0, false);
    den.kappa = number(d, "kappa", 0.0, false);
    den.delta = number(d, "delta", 0.0, false);
    if (!(den.c > 0.0) || !std::isfinite(den.c)) throw bad("density constant must be positive");
    density = den;
  }
  return Measure(std::move(atoms), density);
}

inline nlohmann::ordered_json measure_to_json(const Measure& mu) {
  if (mu.density() && mu.density()->profile)
    throw parameter_error("io", "densities with a profile function cannot be serialized");
  nlohmann::ordered_json j;
  if (!mu.atoms().empty()) {
    j["atoms"] = nlohmann::ordered_json::array();
    for (const auto& a : mu.atoms()) j["atoms"].push_back({{"t", a.t}, {"w", a.w}});
  }
  if (mu.density()) {
    const Density& d = *mu.density();
    j["density"] = {{"c", d.c}, {"kappa", d.kappa}, {"delta", d.delta}};
  }
  return j;
}

inline Measure load_measure(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parameter_error("io", "cannot open measure spec '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw parameter_error("io", "measure spec '" + path + "' is not valid JSON: " + e.what());
  }
  return measure_from_json(j);
}

namespace detail {

inline double parse_double(std::string_view s, const char* what) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw parameter_error("io", std::string("cannot parse ") + what + " '" + std::string(s) + "'");
  return v;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace detail

/// Atoms-only measure from "t:w,t:w,...".
inline Measure parse_atoms(std::string_view spec) {
  std::vector<Atom> atoms;
  for (const std::string& item : detail::split(spec, ',')) {
    const auto parts = detail::split(item, ':');
    if (parts.size() != 2) throw parameter_error("io", "atom '" + item + "' is not of the form t:w");
    const Atom a{detail::parse_double(parts[0], "atom position"), detail::parse_double(parts[1], "atom weight")};
    if (!(a.t >= 0.0 && a.t < 1.0)) throw parameter_error("io", "atom position must lie in [0, 1)");
    if (!(a.w > 0.0)) throw parameter_error("io", "atom weight must be positive");
    atoms.push_back(a);
  }
  return Measure(std::move(atoms), std::nullopt);
}

inline std::string describe_measure(const Measure& mu) {
  std::ostringstream os;
  os.precision(6);
  bool first = true;
  for (const auto& a : mu.atoms()) {
    os << (first ? "" : " + ") << a.w << " delta_" << a.t;
    first = false;
  }
  if (mu.density()) {
    const Density& d = *mu.density();
    os << (first ? "" : " + ") << d.c << " (1-t)^" << d.kappa;
    if (d.delta != 0.0) os << " log^" << d.delta << "(e/(1-t))";
    if (d.profile) os << " p(t)";
    os << " dt";
  }
  return os.str();
}

/// Shortest decimal form that reads back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw parameter_error("io", "csv has no column '" + std::string(name) + "'");
  }
  double number(std::size_t row, std::string_view name) const {
    return detail::parse_double(rows.at(row).at(column(name)), "csv field");
  }
};

/// Reads the comma-separated files the CLI writes (no quoting; fields never contain commas).
inline CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw parameter_error("io", "csv is empty");
  t.header = detail::split(line, ',');
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = detail::split(line, ',');
    if (fields.size() != t.header.size()) throw parameter_error("io", "csv row width does not match header");
    t.rows.push_back(std::move(fields));
  }
  return t;
}

}  // namespace hilbop
