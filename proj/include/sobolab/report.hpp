#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace sobolab::report {

using json = nlohmann::json;

inline constexpr const char* kReportSchema = "sobolab.report/1";
inline constexpr double kMinR2 = 0.95;

struct RateFit {
  double slope = 0.0, intercept = 0.0, r2 = 0.0;
  std::size_t points = 0;
  bool reportable() const { return r2 >= kMinR2; }
  json to_json() const;
};

/// Least squares fit of log y = slope * log x + intercept; needs two or more
/// points with x, y > 0.
RateFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

struct Check {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double bound = 0.0;
  std::string detail;
};

struct AuditReport {
  std::string experiment;
  json params = json::object();
  json resolution = json::object();
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;  // NaN marks an empty cell
  json constants = json::object();
  json rates = json::object();
  std::vector<Check> checks;
  std::vector<std::string> warnings;

  void add_row(std::vector<double> row);
  std::vector<double> column(const std::string& name) const;
  /// Stores the fit when R^2 >= kMinR2, otherwise records a warning.
  bool add_rate(const std::string& name, const RateFit& fit);
  void check(const std::string& name, bool pass, double value, double bound, std::string detail = "");
  bool pass() const;
  std::vector<const Check*> failures() const;

  json to_json() const;
  std::string to_csv() const;
};

/// Shortest round-trip decimal with "." separator; nan, inf and -inf spelled out.
std::string format_double(double v);

struct Written {
  std::filesystem::path json, csv, meta;
};

/// <dir>/<stem>.json, <stem>.csv and <stem>.meta.json (wall-clock timestamp,
/// kept apart so the first two are reproducible byte for byte).
Written write_report(const AuditReport& r, const std::filesystem::path& dir, const std::string& stem);

}  // namespace sobolab::report
