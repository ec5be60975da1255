#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <numbers>

#include "sobolab/counterexamples.hpp"
#include "sobolab/domain_io.hpp"
#include "sobolab/experiments.hpp"
#include "sobolab/gallery.hpp"
#include "sobolab/kernel1d.hpp"

using namespace sobolab;
using report::AuditReport;
using json = nlohmann::json;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Common {
  std::string preset = "smoke";
  std::uint64_t seed = experiments::kDefaultSeed;
  int threads = 0;
  std::string out;
};

std::string default_out() {
  const char* env = std::getenv("SOBOLAB_OUT");
  return env && *env ? env : ".";
}

json config_json(const Common& c, const std::string& command, json extra) {
  extra["command"] = command;
  extra["preset"] = c.preset;
  extra["seed"] = c.seed;
  return extra;
}

int finish(const AuditReport& r, const Common& c, const std::string& stem) {
  auto w = report::write_report(r, c.out, stem);
  if (r.pass()) {
    std::cout << json{{"report", w.json.string()}, {"csv", w.csv.string()}, {"pass", true}}.dump() << "\n";
    return 0;
  }
  json f = json::array();
  for (const auto* k : r.failures())
    f.push_back({{"name", k->name}, {"value", k->value}, {"bound", k->bound}, {"detail", k->detail}});
  json rec = {{"schema", "sobolab.failure/1"}, {"experiment", r.experiment}, {"report", w.json.string()}, {"failures", f}};
  std::ofstream(std::filesystem::path(c.out) / (stem + ".failure.json")) << rec.dump(2) << "\n";
  std::cerr << rec.dump() << "\n";
  return kExitFail;
}

std::vector<double> parse_vec(const std::vector<double>& v, int n, const char* what) {
  if (static_cast<int>(v.size()) != n) throw ConfigError(std::string(what) + ": expected " + std::to_string(n) + " components");
  return v;
}

Vec3 to_vec3(const std::vector<double>& v) {
  Vec3 p{};
  for (std::size_t i = 0; i < v.size() && i < 3; ++i) p[i] = v[i];
  return p;
}

// ------------------------------------------------------------ kernels

AuditReport run_kernels(int ell) {
  if (ell < 1 || ell > 12) throw ConfigError("kernels: need 1 <= ell <= 12");
  AuditReport r;
  r.experiment = "kernels";
  auto Q = kernel1d::build_Q(ell);
  double pi1 = 0.0;
  for (int i = 0; i <= 2000; ++i) {
    double t = -1.0 + i / 1000.0;
    pi1 = std::max(pi1, std::abs(Q(t) + Q(-t) - 1.0));
  }
  std::vector<std::function<double(double)>> phis = {[](double) { return 1.0; }, [](double s) { return s; },
                                                     [](double s) { return s * s; }};
  r.columns = {"j", "q_derivative_at_minus1", "green_boundary_max"};
  double pi2 = 0.0, bc = 0.0;
  for (int j = 0; j < ell; ++j) {
    double qj = std::abs(Q.derivative(j)(-1.0)), g = 0.0;
    for (const auto& phi : phis)
      for (double s : {-1.0, 1.0}) g = std::max(g, std::abs(kernel1d::green_solution(ell, phi, s, j)));
    pi2 = std::max(pi2, qj);
    bc = std::max(bc, g);
    r.add_row({static_cast<double>(j), qj, g});
  }
  json coeffs = json::array();
  for (const auto& c : kernel1d::build_Q_exact(ell)) coeffs.push_back(c.str());
  double gc = kernel1d::green_constant(ell), gcc = kernel1d::green_constant_closed_form(ell);
  r.constants["q_coefficients"] = coeffs;
  r.constants["pi1_residual"] = pi1;
  r.constants["pi2_residual"] = pi2;
  r.constants["green_boundary_residual"] = bc;
  r.constants["green_constant"] = gc;
  r.constants["green_constant_closed_form"] = gcc;
  r.check("pi1", pi1 <= 1e-12, pi1, 1e-12, "max_t |Q(t) + Q(-t) - 1|");
  r.check("pi2", pi2 <= 1e-10, pi2, 1e-10, "max_{j < l} |Q^(j)(-1)|");
  r.check("green_boundary", bc <= 1e-8, bc, 1e-8, "max_{j < l} |w^(j)(+-1)| over phi in {1, r, r^2}");
  r.check("green_constant", std::abs(gc - gcc) <= 1e-10 * std::abs(gcc), std::abs(gc - gcc), 1e-10 * std::abs(gcc));
  return r;
}

// ------------------------------------------------------------- repr1d

AuditReport run_repr1d(int ell, const std::string& family, int nodes, std::uint64_t seed) {
  if (ell < 1 || ell > 6) throw ConfigError("repr1d: need 1 <= ell <= 6");
  if (nodes < 2) throw ConfigError("repr1d: need two or more nodes");
  std::function<double(double, int)> psi;  // psi^{(k)}(t)
  double tol;
  if (family == "poly") {
    Rng rng(seed);
    std::vector<double> c(2 * ell + 1);
    for (double& x : c) x = rng.uniform(-1, 1);
    kernel1d::Poly1D p(c);
    psi = [p](double t, int k) { return p.derivative(k)(t); };
    tol = 1e-12;
  } else if (family == "sin") {
    psi = [](double t, int k) { return std::sin(t + k * std::numbers::pi / 2); };
    tol = 1e-6;
  } else if (family == "exp") {
    psi = [](double t, int) { return std::exp(t); };
    tol = 1e-6;
  } else {
    throw ConfigError("repr1d: family must be poly, sin or exp");
  }
  kernel1d::BoundaryData1D d{0.0, 1.0, {}, {}};
  for (int k = 0; k < ell; ++k) {
    d.derivs_a.push_back(psi(0.0, k));
    d.derivs_b.push_back(psi(1.0, k));
  }
  AuditReport r;
  r.experiment = "repr1d";
  r.columns = {"t", "repr", "exact", "relative_error"};
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    double t = 0.05 + 0.1 * i;
    double got = kernel1d::repr_1d(ell, d, t, [&](double x) { return psi(x, 2 * ell); }, nodes);
    double exact = psi(t, 2 * ell - 1);
    double err = std::abs(got - exact) / std::max(1.0, std::abs(exact));
    worst = std::max(worst, err);
    r.add_row({t, got, exact, err});
  }
  r.constants["max_relative_error"] = worst;
  r.check("reproduction", worst <= tol, worst, tol);
  return r;
}

// -------------------------------------------------------------- probe

AuditReport run_probe(const geometry::Domain& d, const std::vector<double>& x, const std::vector<double>& theta,
                      nlohmann::ordered_json& out) {
  int n = d.dim();
  Vec3 p = to_vec3(parse_vec(x, n, "probe --x")), t = to_vec3(parse_vec(theta, n, "probe --theta"));
  double len = norm(t);
  if (!(len > 0)) throw ConfigError("probe: theta must be nonzero");
  t = (1.0 / len) * t;
  if (!d.contains(p)) throw ConfigError("probe: x lies outside the domain");
  auto hit = d.ray_cast(p, t);
  AuditReport r;
  r.experiment = "probe";
  for (int i = 0; i < n; ++i) r.columns.push_back("zeta" + std::to_string(i + 1));
  r.columns.push_back("b");
  std::vector<double> row;
  json zeta = json::array();
  for (int i = 0; i < n; ++i) {
    row.push_back(hit.bounded ? hit.zeta[i] : NAN);
    zeta.push_back(hit.bounded ? json(hit.zeta[i]) : json(nullptr));
  }
  row.push_back(hit.bounded ? hit.b : NAN);
  r.add_row(row);
  out = {{"zeta", zeta}, {"b", hit.bounded ? json(hit.b) : json(nullptr)}};
  r.constants["hit"] = json::parse(out.dump());
  return r;
}

// -------------------------------------------------------------- audit

struct AuditArgs {
  std::string domain_file, gallery = "ball", gallery_params = "{\"n\": 2}";
  std::string field = "bowl", theorem = "mainmeasure";
  int m = 1, h = 0, degree = 3;
  double alpha = 0.0, p = 1.5;
  std::vector<double> pk;
};

geometry::Domain make_domain(const AuditArgs& a) {
  if (!a.domain_file.empty()) return geometry::load_domain(a.domain_file);
  json params;
  try {
    params = json::parse(a.gallery_params);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("--gallery-params: ") + e.what());
  }
  return geometry::gallery(a.gallery, params);
}

fields::FieldPtr make_field(const AuditArgs& a, const geometry::Domain& d, std::uint64_t seed) {
  const int n = d.dim();
  if (a.field == "bowl") {
    std::vector<fields::PolynomialField::Term> t{{combinat::MultiIndex{std::vector<int>(n, 0)}, 1.0}};
    for (int i = 0; i < n; ++i) {
      std::vector<int> e(n, 0);
      e[i] = 2;
      t.push_back({combinat::MultiIndex{e}, -1.0});
    }
    return std::make_shared<fields::PolynomialField>(n, t);
  }
  if (a.field == "bubble") {
    const auto& b = d.bounds();
    if (!b.bounded) throw ConfigError("--field bubble needs a bounded domain");
    return std::make_shared<fields::BoxBubbleField>(n, b.lo, b.hi, std::max(a.m, 1));
  }
  if (a.field == "random") {
    if (a.degree < 0) throw ConfigError("--degree must be nonnegative");
    Rng rng(seed, 7);
    return fields::random_polynomial(n, a.degree, rng);
  }
  throw ConfigError("--field must be bowl, bubble or random");
}

json audit_config(const AuditArgs& a, const std::string& kind) {
  json j = {{"audit", kind}, {"field", a.field}, {"m", a.m}, {"h", a.h}};
  if (!a.domain_file.empty()) j["domain_file"] = a.domain_file;
  else j["gallery"] = {{"name", a.gallery}, {"params", json::parse(a.gallery_params)}};
  if (a.field == "random") j["degree"] = a.degree;
  if (kind != "pointwise") j["alpha"] = a.alpha;
  if (kind == "sobolev") {
    j["theorem"] = a.theorem;
    j["p"] = a.p;
    j["pk"] = a.pk;
  }
  return j;
}

AuditReport run_audit(const std::string& kind, const AuditArgs& a, const experiments::Resolution& res, std::uint64_t seed) {
  auto d = make_domain(a);
  auto u = make_field(a, d, seed);
  if (kind == "pointwise") return experiments::pointwise_audit(d, *u, a.m, a.h, res, seed);
  double alpha = a.alpha > 0 ? a.alpha : d.dim();
  auto mu = geometry::sample_volume(d, res.cloud, Rng(seed).split(11).next_u64());
  if (kind == "rearrangement") return experiments::rearrangement_audit(d, mu, *u, a.m, a.h, alpha, res, seed);
  experiments::SobolevParams sp{a.m, a.h, a.p, alpha, a.pk};
  return experiments::sobolev_audit(experiments::theorem_from_string(a.theorem), d, mu, *u, sp, res, seed);
}

// ----------------------------------------------------- counterexample

json parse_extras(const std::vector<std::string>& extras) {
  json out = json::object();
  for (std::size_t i = 0; i < extras.size(); ++i) {
    std::string tok = extras[i], key, val;
    if (tok.rfind("--", 0) != 0) throw ConfigError("unexpected argument '" + tok + "'");
    tok = tok.substr(2);
    if (auto eq = tok.find('='); eq != std::string::npos) {
      key = tok.substr(0, eq);
      val = tok.substr(eq + 1);
    } else {
      if (i + 1 >= extras.size()) throw ConfigError("missing value for --" + tok);
      key = tok;
      val = extras[++i];
    }
    std::replace(key.begin(), key.end(), '-', '_');
    try {
      out[key] = json::parse(val);
    } catch (const json::exception&) {
      throw ConfigError("--" + key + ": value '" + val + "' is not a number, list or null");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sobolab: boundary-data Sobolev inequality laboratory"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  Common c;
  c.out = default_out();
  app.add_option("--preset", c.preset, "Resolution preset")->check(CLI::IsMember({"smoke", "desk", "thorough"}));
  app.add_option("--seed", c.seed, "Master seed");
  app.add_option("--threads", c.threads, "Worker threads (0: hardware)")->check(CLI::NonNegativeNumber);
  app.add_option("--out", c.out, "Output directory (default $SOBOLAB_OUT or .)");

  int ell = 1, n = 2, nodes = 64;
  std::size_t trials = 100;
  std::string family = "poly", domain_file, name, params = "{}";
  std::vector<double> x, theta;
  AuditArgs aa;
  std::string audit_kind;

  auto* kernels = app.add_subcommand("kernels", "Kernel identities of Q and the Green kernel");
  kernels->add_option("--ell", ell)->required();
  auto* repr = app.add_subcommand("repr1d", "One-dimensional representation formula");
  repr->add_option("--ell", ell)->required();
  repr->add_option("--family", family)->check(CLI::IsMember({"poly", "sin", "exp"}));
  repr->add_option("--nodes", nodes);
  auto* probe = app.add_subcommand("probe", "Single ray cast");
  probe->add_option("--domain", domain_file)->required()->check(CLI::ExistingFile);
  probe->add_option("--x", x)->required()->delimiter(',');
  probe->add_option("--theta", theta)->required()->delimiter(',');
  auto* audit = app.add_subcommand("audit", "Empirical constants of the pointwise, rearrangement and Sobolev inequalities");
  audit->set_help_flag("--help", "Print this help message and exit");
  audit->add_option("kind", audit_kind)->required()->check(CLI::IsMember({"pointwise", "rearrangement", "sobolev"}));
  audit->add_option("--domain", aa.domain_file)->check(CLI::ExistingFile);
  audit->add_option("--gallery", aa.gallery);
  audit->add_option("--gallery-params", aa.gallery_params);
  audit->add_option("--field", aa.field)->check(CLI::IsMember({"bowl", "bubble", "random"}));
  audit->add_option("--degree", aa.degree);
  audit->add_option("--m", aa.m);
  audit->add_option("--h", aa.h);
  audit->add_option("--alpha", aa.alpha, "Measure exponent (0: dimension)");
  audit->add_option("--p", aa.p);
  audit->add_option("--theorem", aa.theorem)->check(CLI::IsMember({"mainmeasure", "trudmeasure", "superlimiting"}));
  audit->add_option("--pk", aa.pk)->delimiter(',');
  auto* cex = app.add_subcommand("counterexample", "Counterexample families; parameters as --key value");
  cex->add_option("name", name)->required()->check(CLI::IsMember(counterexamples::names()));
  cex->add_option("--params", params, "Parameters as a JSON object");
  cex->allow_extras();
  auto* app_cmd = app.add_subcommand("appendix", "Two-point identity check");
  app_cmd->add_option("--ell", ell)->required();
  app_cmd->add_option("--n", n)->required();
  app_cmd->add_option("--trials", trials);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    set_default_threads(c.threads);
    auto res = experiments::preset(c.preset);
    AuditReport r;
    std::string stem;
    json cfg;
    if (*kernels) {
      r = run_kernels(ell);
      cfg = config_json(c, "kernels", {{"ell", ell}});
      stem = "kernels_ell" + std::to_string(ell);
    } else if (*repr) {
      r = run_repr1d(ell, family, nodes, c.seed);
      cfg = config_json(c, "repr1d", {{"ell", ell}, {"family", family}, {"nodes", nodes}});
      stem = "repr1d_ell" + std::to_string(ell) + "_" + family;
    } else if (*probe) {
      auto d = geometry::load_domain(domain_file);
      nlohmann::ordered_json hit;
      r = run_probe(d, x, theta, hit);
      cfg = config_json(c, "probe", {{"domain", geometry::domain_to_json(d)}, {"x", x}, {"theta", theta}});
      r.params = {{"config", cfg}, {"resolved", json::object()}};
      r.resolution = res.to_json();
      report::write_report(r, c.out, "probe");
      std::cout << hit.dump() << "\n";
      return 0;
    } else if (*audit) {
      r = run_audit(audit_kind, aa, res, c.seed);
      cfg = config_json(c, "audit", audit_config(aa, audit_kind));
      stem = "audit_" + audit_kind;
    } else if (*cex) {
      json user;
      try {
        user = json::parse(params);
      } catch (const json::exception& e) {
        throw ConfigError(std::string("--params: ") + e.what());
      }
      json extras = parse_extras(cex->remaining());
      for (auto& [k, v] : extras.items()) user[k] = v;
      auto resolved = counterexamples::resolve_params(name, user);
      r = counterexamples::counterexample_run(name, resolved, res);
      cfg = config_json(c, "counterexample", {{"name", name}, {"params", resolved}});
      stem = "counterexample_" + name;
    } else {
      r = experiments::appendix_identity_check(ell, n, trials, c.seed);
      cfg = config_json(c, "appendix", {{"ell", ell}, {"n", n}, {"trials", trials}});
      stem = "appendix_ell" + std::to_string(ell) + "_n" + std::to_string(n);
    }
    r.params = {{"config", cfg}, {"resolved", r.params.is_null() ? json::object() : r.params}};
    if (r.resolution.is_null()) r.resolution = res.to_json();
    return finish(r, c, stem);
  } catch (const std::invalid_argument& e) {
    std::cerr << json{{"error", "config"}, {"message", e.what()}}.dump() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    json rec = {{"schema", "sobolab.failure/1"}, {"error", "runtime"}, {"message", e.what()}};
    std::cerr << rec.dump() << "\n";
    return kExitFail;
  }
}
