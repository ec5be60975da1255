#include "sobolab/report.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "sobolab/core.hpp"

namespace sobolab::report {

namespace {

json cell(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("write_report: cannot open " + p.string());
  out << text;
  if (!out) throw std::runtime_error("write_report: write failed for " + p.string());
}

}  // namespace

json RateFit::to_json() const { return {{"slope", slope}, {"intercept", intercept}, {"r2", r2}, {"points", points}}; }

RateFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_loglog: need two or more (x, y) pairs");
  std::size_t n = x.size();
  double sx = 0, sy = 0;
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0) || !(y[i] > 0) || !std::isfinite(x[i]) || !std::isfinite(y[i]))
      throw std::invalid_argument("fit_loglog: values must be positive and finite");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
    sx += lx[i];
    sy += ly[i];
  }
  double mx = sx / n, my = sy / n, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_loglog: x values coincide");
  RateFit f;
  f.points = n;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy == 0.0 ? 1.0 : sxy * sxy / (sxx * syy);
  return f;
}

void AuditReport::add_row(std::vector<double> row) {
  if (row.size() != columns.size()) throw std::invalid_argument("AuditReport: row width does not match columns");
  rows.push_back(std::move(row));
}

std::vector<double> AuditReport::column(const std::string& name) const {
  for (std::size_t c = 0; c < columns.size(); ++c)
    if (columns[c] == name) {
      std::vector<double> v;
      for (const auto& r : rows) v.push_back(r[c]);
      return v;
    }
  throw std::out_of_range("AuditReport: no column '" + name + "'");
}

bool AuditReport::add_rate(const std::string& name, const RateFit& fit) {
  if (!fit.reportable()) {
    warnings.push_back("rate '" + name + "' withheld: R^2 = " + format_double(fit.r2));
    return false;
  }
  rates[name] = fit.to_json();
  return true;
}

void AuditReport::check(const std::string& name, bool pass, double value, double bound, std::string detail) {
  checks.push_back({name, pass, value, bound, std::move(detail)});
}

bool AuditReport::pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

std::vector<const Check*> AuditReport::failures() const {
  std::vector<const Check*> f;
  for (const auto& c : checks)
    if (!c.pass) f.push_back(&c);
  return f;
}

json AuditReport::to_json() const {
  json j;
  j["schema"] = kReportSchema;
  j["version"] = kVersion;
  j["experiment"] = experiment;
  j["params"] = params;
  j["resolution"] = resolution;
  j["columns"] = columns;
  json rs = json::array();
  for (const auto& r : rows) {
    json row = json::array();
    for (double v : r) row.push_back(cell(v));
    rs.push_back(row);
  }
  j["rows"] = rs;
  j["constants"] = constants;
  j["rates"] = rates;
  json cs = json::array();
  for (const auto& c : checks)
    cs.push_back({{"name", c.name}, {"pass", c.pass}, {"value", cell(c.value)}, {"bound", cell(c.bound)}, {"detail", c.detail}});
  j["checks"] = cs;
  j["warnings"] = warnings;
  j["pass"] = pass();
  return j;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string AuditReport::to_csv() const {
  std::ostringstream out;
  for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
  out << '\n';
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (c) out << ',';
      if (!std::isnan(r[c])) out << format_double(r[c]);
    }
    out << '\n';
  }
  return out.str();
}

Written write_report(const AuditReport& r, const std::filesystem::path& dir, const std::string& stem) {
  std::filesystem::create_directories(dir);
  Written w{dir / (stem + ".json"), dir / (stem + ".csv"), dir / (stem + ".meta.json")};
  write_file(w.json, r.to_json().dump(2) + "\n");
  write_file(w.csv, r.to_csv());
  auto now = std::chrono::system_clock::now();
  auto secs = std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
  json meta = {{"report", w.json.filename().string()}, {"unix_time", secs}, {"version", kVersion}};
  write_file(w.meta, meta.dump(2) + "\n");
  return w;
}

}  // namespace sobolab::report
