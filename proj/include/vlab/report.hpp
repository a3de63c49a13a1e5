// Copyright 2026 vortexlab developers.
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Suite reports: named pass/fail checks, CSV tables and the JSON config
// resolution shared by the command line driver and the acceptance runner.

#include <concepts>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace vlab {

inline constexpr const char* kConfigSchema = "vlab.config/1";

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline bool same_kind(const nlohmann::json& a, const nlohmann::json& b) {
  if (a.is_null() || b.is_null()) return true;
  if (a.is_number() && b.is_number()) return true;
  return a.type() == b.type();
}

}  // namespace detail

/// Overlay `user` on `defaults`. Unknown keys and type changes are rejected;
/// nested objects merge key by key except Fourier descriptors ("phi"), which
/// are replaced whole.
inline nlohmann::json resolve_config(const nlohmann::json& defaults, const nlohmann::json& user,
                                     const std::string& where = "") {
  if (!user.is_object()) throw ConfigError("config" + where + ": expected an object");
  nlohmann::json out = defaults;
  for (const auto& [key, value] : user.items()) {
    const std::string path = where + "." + key;
    if (!defaults.contains(key)) throw ConfigError("config" + path + ": unknown key");
    const auto& d = defaults.at(key);
    if (!detail::same_kind(d, value)) throw ConfigError("config" + path + ": expected " + std::string(d.type_name()));
    if (d.is_object() && key != "phi")
      out[key] = resolve_config(d, value, path);
    else
      out[key] = value;
  }
  return out;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// One CSV cell. Doubles are printed with 17 significant digits so output
/// is byte-identical across runs.
class Cell {
 public:
  Cell(std::string s) : text_(std::move(s)), quoted_(true) {}
  Cell(const char* s) : text_(s), quoted_(true) {}
  Cell(double v) : text_(format_double(v)) {}
  Cell(bool b) : text_(b ? "true" : "false") {}
  template <std::integral I>
  Cell(I v) : text_(std::to_string(v)) {}

  const std::string& text() const { return text_; }

  void write(std::ostream& os) const {
    if (!quoted_ || text_.find_first_of(",\"\n") == std::string::npos) {
      os << text_;
      return;
    }
    os << '"';
    for (char c : text_) {
      if (c == '"') os << '"';
      os << c;
    }
    os << '"';
  }

 private:
  std::string text_;
  bool quoted_ = false;
};

struct Table {
  std::string name;  // file stem of the CSV
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw std::logic_error("Table " + name + ": row width mismatch");
    rows.push_back(std::move(row));
  }

  void write_csv(std::ostream& os) const {
    for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << columns[c];
    os << '\n';
    for (const auto& r : rows) {
      for (std::size_t c = 0; c < r.size(); ++c) {
        if (c) os << ',';
        r[c].write(os);
      }
      os << '\n';
    }
  }
};

struct Check {
  std::string name;
  bool pass = false;
  double value = 0.0;
  std::string relation;  // value <relation> threshold
  double threshold = 0.0;
  std::string detail;

  nlohmann::json to_json() const {
    return {{"name", name}, {"pass", pass}, {"value", value}, {"relation", relation}, {"threshold", threshold},
            {"detail", detail}};
  }
};

inline bool compare(double value, const std::string& rel, double threshold) {
  if (rel == "<=") return value <= threshold;
  if (rel == "<") return value < threshold;
  if (rel == ">=") return value >= threshold;
  if (rel == ">") return value > threshold;
  if (rel == "==") return value == threshold;
  throw std::logic_error("unknown relation " + rel);
}

struct SuiteReport {
  std::string suite;
  nlohmann::json config;
  std::vector<Check> checks;
  std::vector<std::string> warnings;
  std::vector<Table> tables;

  /// Records a check; NaN values fail every relation.
  const Check& check(std::string name, double value, const std::string& rel, double threshold,
                     std::string detail = "") {
    checks.push_back({std::move(name), compare(value, rel, threshold), value, rel, threshold, std::move(detail)});
    return checks.back();
  }

  void warn(std::string w) { warnings.push_back(std::move(w)); }

  bool passed(bool strict = false) const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return !(strict && !warnings.empty());
  }

  nlohmann::json failure_report(bool strict = false) const {
    nlohmann::json f = nlohmann::json::array();
    for (const auto& c : checks)
      if (!c.pass) f.push_back(c.to_json());
    nlohmann::json w = warnings;
    return {{"suite", suite}, {"passed", passed(strict)}, {"strict", strict}, {"failed_checks", f}, {"warnings", w}};
  }

  Table checks_table() const {
    Table t{"checks", {"check", "value", "relation", "threshold", "pass", "detail"}, {}};
    for (const auto& c : checks) t.add({c.name, c.value, c.relation, c.threshold, c.pass, c.detail});
    return t;
  }
};

}  // namespace vlab
