#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "dirac_lab/common.hpp"

namespace dirac_lab {

inline constexpr int kSchemaVersion = 1;

enum class CheckStatus { kPass, kFail, kSkipped };

inline const char* status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::kPass: return "PASS";
    case CheckStatus::kFail: return "FAIL";
    case CheckStatus::kSkipped: return "SKIPPED";
  }
  return "?";
}

struct Check {
  std::string name;
  CheckStatus status = CheckStatus::kPass;
  nlohmann::ordered_json value;
  std::optional<double> residual;
  std::optional<double> tolerance;
  std::string relation;  // the identity or invariant being exercised
  std::string reason;    // why a check was skipped or failed
};

/// Plain CSV table with a fixed header. Cells are preformatted strings.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void write_csv(std::ostream& os) const {
    write_row(os, header);
    for (const auto& r : rows) write_row(os, r);
  }

 private:
  static void write_row(std::ostream& os, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os << ',';
      os << cells[i];
    }
    os << '\n';
  }
};

/// Shortest decimal form that round-trips, for CSV cells.
inline std::string cell(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}
inline std::string cell(long long v) { return std::to_string(v); }
inline std::string cell(int v) { return std::to_string(v); }

class Report {
 public:
  using Json = nlohmann::ordered_json;

  explicit Report(std::string command) : command_(std::move(command)) {}

  const std::string& command() const { return command_; }
  Json& config() { return config_; }
  Json& results() { return results_; }
  const Json& results() const { return results_; }
  std::map<std::string, Table>& tables() { return tables_; }
  const std::map<std::string, Table>& tables() const { return tables_; }
  const std::vector<Check>& checks() const { return checks_; }

  Check& add(Check c) {
    checks_.push_back(std::move(c));
    return checks_.back();
  }

  /// PASS iff residual <= tolerance (NaN fails).
  Check& check_within(const std::string& name, double residual, double tolerance,
                      const std::string& relation, Json value = nullptr) {
    Check c;
    c.name = name;
    c.residual = residual;
    c.tolerance = tolerance;
    c.relation = relation;
    c.value = std::move(value);
    c.status = residual <= tolerance ? CheckStatus::kPass : CheckStatus::kFail;
    if (c.status == CheckStatus::kFail) c.reason = "residual exceeds tolerance";
    return add(std::move(c));
  }

  Check& check_true(const std::string& name, bool ok, const std::string& relation, Json value,
                    const std::string& failure_reason = "condition not met") {
    Check c;
    c.name = name;
    c.status = ok ? CheckStatus::kPass : CheckStatus::kFail;
    c.relation = relation;
    c.value = std::move(value);
    if (!ok) c.reason = failure_reason;
    return add(std::move(c));
  }

  Check& skip(const std::string& name, const std::string& reason, const std::string& relation) {
    Check c;
    c.name = name;
    c.status = CheckStatus::kSkipped;
    c.relation = relation;
    c.reason = reason;
    return add(std::move(c));
  }

  int count(CheckStatus s) const {
    int n = 0;
    for (const auto& c : checks_) n += c.status == s;
    return n;
  }

  /// 0 when nothing failed, 1 otherwise.
  int exit_code() const { return count(CheckStatus::kFail) == 0 ? 0 : 1; }

  void set_timing(double seconds, unsigned workers) {
    elapsed_ = seconds;
    workers_ = workers;
  }

  /// Deterministic for a fixed configuration except for the "timing" object.
  Json to_json(bool include_timing = true) const {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = command_;
    j["config"] = config_;
    Json checks = Json::array();
    for (const auto& c : checks_) {
      Json e;
      e["name"] = c.name;
      e["status"] = status_name(c.status);
      e["relation"] = c.relation;
      if (!c.value.is_null()) e["value"] = c.value;
      if (c.residual) e["residual"] = finite_or_string(*c.residual);
      if (c.tolerance) e["tolerance"] = *c.tolerance;
      if (!c.reason.empty()) e["reason"] = c.reason;
      checks.push_back(std::move(e));
    }
    j["checks"] = std::move(checks);
    j["results"] = results_;
    j["summary"] = {{"passed", count(CheckStatus::kPass)},
                    {"failed", count(CheckStatus::kFail)},
                    {"skipped", count(CheckStatus::kSkipped)},
                    {"exit_code", exit_code()}};
    if (include_timing) j["timing"] = {{"elapsed_seconds", elapsed_}, {"workers", workers_}};
    return j;
  }

  static Json finite_or_string(double v) {
    if (std::isfinite(v)) return v;
    return cell(v);
  }

 private:
  std::string command_;
  Json config_ = Json::object();
  Json results_ = Json::object();
  std::vector<Check> checks_;
  std::map<std::string, Table> tables_;
  double elapsed_ = 0.0;
  unsigned workers_ = 1;
};

enum class OutputFormat { kJson, kCsv, kBoth };

/// Writes <command>.json and <table>.csv files into out_dir, or prints to
/// stdout when out_dir is empty.
inline void emit(const Report& report, const std::string& out_dir, OutputFormat format) {
  const bool json = format != OutputFormat::kCsv;
  const bool csv = format != OutputFormat::kJson;
  if (out_dir.empty()) {
    if (json) std::cout << report.to_json().dump(2) << '\n';
    if (csv) {
      for (const auto& [name, table] : report.tables()) {
        if (json || report.tables().size() > 1) std::cout << "# " << name << ".csv\n";
        table.write_csv(std::cout);
      }
    }
    return;
  }
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + out_dir + "': " + ec.message());
  const auto write = [&](const fs::path& path, auto&& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    body(out);
  };
  if (json) {
    write(fs::path(out_dir) / (report.command() + ".json"),
          [&](std::ostream& os) { os << report.to_json().dump(2) << '\n'; });
  }
  if (csv) {
    for (const auto& [name, table] : report.tables()) {
      write(fs::path(out_dir) / (name + ".csv"), [&](std::ostream& os) { table.write_csv(os); });
    }
  }
}

}  // namespace dirac_lab
