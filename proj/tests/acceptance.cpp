#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>

#include "sobolab/combinat.hpp"
#include "sobolab/counterexamples.hpp"
#include "sobolab/experiments.hpp"
#include "sobolab/gallery.hpp"
#include "sobolab/kernel1d.hpp"
#include "sobolab/operators.hpp"
#include "sobolab/rearrange.hpp"

using namespace sobolab;
using report::AuditReport;
using json = nlohmann::json;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(double v) { return report::format_double(v); }
std::string fmt(const json& v) { return v.is_number() ? fmt(v.get<double>()) : v.dump(); }

void note(Outcome& o, bool ok, const std::string& what) {
  o.pass = o.pass && ok;
  if (!o.detail.empty()) o.detail += "; ";
  o.detail += (ok ? "" : "[fail] ") + what;
}

template <class F>
double sphere_quadrature(int n, F f) {
  const int na = 96;
  double s = 0.0;
  if (n == 2) {
    for (int i = 0; i < na; ++i) {
      double t = 2.0 * std::numbers::pi * i / na;
      s += f(Vec3{std::cos(t), std::sin(t), 0.0});
    }
    return s * 2.0 * std::numbers::pi / na;
  }
  const auto& g = gauss_legendre(40);
  for (std::size_t k = 0; k < g.nodes.size(); ++k) {
    double z = g.nodes[k], rho = std::sqrt(1.0 - z * z);
    for (int i = 0; i < na; ++i) {
      double t = 2.0 * std::numbers::pi * i / na;
      s += g.weights[k] * f(Vec3{rho * std::cos(t), rho * std::sin(t), z});
    }
  }
  return s * 2.0 * std::numbers::pi / na;
}

// 1 ------------------------------------------------------------------
Outcome kernel_identities() {
  Outcome o;
  double pi1 = 0.0, pi2 = 0.0;
  for (int ell = 1; ell <= 6; ++ell) {
    auto Q = kernel1d::build_Q(ell);
    for (int i = 0; i <= 4000; ++i) {
      double t = -1.0 + i / 2000.0;
      pi1 = std::max(pi1, std::abs(Q(t) + Q(-t) - 1.0));
    }
    for (int j = 0; j < ell; ++j) pi2 = std::max(pi2, std::abs(Q.derivative(j)(-1.0)));
  }
  note(o, pi1 <= 1e-12, "max |Q(t)+Q(-t)-1| = " + fmt(pi1) + " <= 1e-12");
  note(o, pi2 <= 1e-10, "max |Q^(j)(-1)| = " + fmt(pi2) + " <= 1e-10");
  return o;
}

// 2 ------------------------------------------------------------------
Outcome representation() {
  Outcome o;
  Rng rng(2);
  double poly = 0.0, sine = 0.0;
  for (int ell = 1; ell <= 3; ++ell) {
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> c(2 * ell + 1);
      for (double& x : c) x = rng.uniform(-1, 1);
      kernel1d::Poly1D psi(c);
      double a = rng.uniform(-2, 0), b = a + rng.uniform(0.5, 3);
      kernel1d::BoundaryData1D d{a, b, {}, {}};
      for (int k = 0; k < ell; ++k) {
        d.derivs_a.push_back(psi.derivative(k)(a));
        d.derivs_b.push_back(psi.derivative(k)(b));
      }
      auto top = psi.derivative(2 * ell);
      double t = a + (b - a) * rng.uniform();
      double exact = psi.derivative(2 * ell - 1)(t);
      double got = kernel1d::repr_1d(ell, d, t, [&](double x) { return top(x); }, 64);
      poly = std::max(poly, std::abs(got - exact) / std::max(1.0, std::abs(exact)));
    }
    auto s = [](double t, int k) { return std::sin(t + k * std::numbers::pi / 2); };
    kernel1d::BoundaryData1D d{0.0, 1.0, {}, {}};
    for (int k = 0; k < ell; ++k) {
      d.derivs_a.push_back(s(0.0, k));
      d.derivs_b.push_back(s(1.0, k));
    }
    for (double t : {0.1, 0.37, 0.5, 0.81}) {
      double got = kernel1d::repr_1d(ell, d, t, [&](double x) { return s(x, 2 * ell); }, 64);
      sine = std::max(sine, std::abs(got - s(t, 2 * ell - 1)));
    }
  }
  note(o, poly <= 1e-12, "polynomial relative error " + fmt(poly) + " <= 1e-12");
  note(o, sine <= 1e-6, "sin error " + fmt(sine) + " <= 1e-6");
  return o;
}

// 3 ------------------------------------------------------------------
Outcome green_boundary() {
  Outcome o;
  std::vector<std::function<double(double)>> phis = {[](double) { return 1.0; }, [](double r) { return r; },
                                                     [](double r) { return r * r; }};
  double worst = 0.0;
  for (int ell = 1; ell <= 2; ++ell)
    for (const auto& phi : phis)
      for (int j = 0; j < ell; ++j)
        for (double s : {-1.0, 1.0}) worst = std::max(worst, std::abs(kernel1d::green_solution(ell, phi, s, j)));
  note(o, worst <= 1e-8, "max |w^(j)(+-1)| = " + fmt(worst) + " <= 1e-8");
  return o;
}

// 4 ------------------------------------------------------------------
Outcome dual_basis() {
  Outcome o;
  double worst = 0.0;
  for (int n = 2; n <= 3; ++n)
    for (int ell = 1; ell <= 3; ++ell) {
      auto b = combinat::build_dual_basis(n, ell);
      const auto& mono = b.monomials();
      for (std::size_t be = 0; be < mono.size(); ++be)
        for (std::size_t al = 0; al < mono.size(); ++al) {
          double v = sphere_quadrature(n, [&](const Vec3& t) { return b.eval(be, t) * mono[al].monomial(t); });
          worst = std::max(worst, std::abs(v - (be == al ? 1.0 : 0.0)));
        }
    }
  note(o, worst <= 1e-8, "Gram residual " + fmt(worst) + " <= 1e-8 (n = 2, 3; l <= 3)");
  return o;
}

// 5 ------------------------------------------------------------------
Outcome appendix_identity() {
  Outcome o;
  double worst = 0.0;
  for (int ell = 1; ell <= 3; ++ell)
    for (int n = 1; n <= 3; ++n) {
      auto r = experiments::appendix_identity_check(ell, n, 100, experiments::kDefaultSeed);
      worst = std::max(worst, r.constants["max_residual"].get<double>());
    }
  note(o, worst <= 1e-9, "max relative residual " + fmt(worst) + " <= 1e-9");
  return o;
}

// 6 ------------------------------------------------------------------
std::vector<geometry::Domain> projection_gallery() {
  std::vector<geometry::Domain> out;
  geometry::RoomsParams r;
  r.n = 2;
  r.a = {1, 1};
  r.b = {0.5, 0.25};
  r.c = {0.5, 0.25};
  out.push_back(geometry::rooms_corridors(r));
  geometry::BallChainParams b;
  b.n = 3;
  b.delta = {0.5, 0.25};
  b.eps = {0.05, 0.0125};
  out.push_back(geometry::ball_chain(b));
  geometry::CuspChainParams c;
  c.n = 3;
  c.h = {0.5, 0.25};
  c.eps = {0.1, 0.05};
  c.resolution = 16;
  out.push_back(geometry::cusp_chain(c));
  return out;
}

Outcome projection_bound() {
  Outcome o;
  auto res = experiments::preset("desk");
  Rng rng(6);
  double worst = 0.0;
  int runs = 0;
  for (const auto& d : projection_gallery()) {
    auto b = geometry::sample_boundary(d, res.boundary_cloud(), 2);
    auto probes = operators::interior_probes(d, 5, 4, 4 * b.mean_spacing());
    for (int t = 0; t < 20; ++t) {
      auto p = fields::random_polynomial(d.dim(), 2, rng);
      operators::PointFn g = [p](const Vec3& y) { return p->value(y) * p->value(y); };
      auto r = operators::projection_bound_check(d, b, g, probes, res.directions, t);
      worst = std::max(worst, r.max_ratio);
      ++runs;
    }
  }
  note(o, worst <= 1.05, "max T g / (2^n N_1 |g|) = " + fmt(worst) + " <= 1.05 over " + std::to_string(runs) + " runs x 5 probes");
  return o;
}

// 7 ------------------------------------------------------------------
Outcome riesz_composition() {
  Outcome o;
  auto disc = std::make_shared<geometry::Domain>(2, geometry::leaf(std::make_shared<geometry::Ball>(2, Vec3{}, 1.0)));
  fields::IndicatorField chi(disc);
  auto r = operators::riesz_composition_check(0.5, 0.5, chi, *disc, 10, 1);
  note(o, r.ratio.size() == 10, std::to_string(r.ratio.size()) + " probes");
  note(o, r.cv <= 0.02, "coefficient of variation " + fmt(r.cv) + " <= 0.02 (mean " + fmt(r.mean) + ", closed form " +
                            fmt(r.closed_form) + ")");
  return o;
}

// 8 ------------------------------------------------------------------
Outcome hardy_admissibility() {
  using namespace rearrange;
  Outcome o;
  auto small = hardy_test_set(40, 8), large = hardy_test_set(80, 8);
  double worst = 0.0;
  int pairs = 0;
  for (int n = 2; n <= 5; ++n)
    for (int m = 1; m <= 2; ++m)
      for (int h = 0; h <= 1; ++h)
        for (double p : {1.5, 2.0}) {
          if (!(m - h > 0 && m - h < n && p * (m - h) < n)) continue;
          double q = n * p / (n - (m - h) * p);
          HardyParams hp{n, m, h, 1, double(n)};
          for (auto kind : {Reduced::R1, Reduced::R2}) {
            auto a = hardy_constant_fit(kind, NormSpec::lebesgue(p), NormSpec::lebesgue(q), small, hp);
            auto b = hardy_constant_fit(kind, NormSpec::lebesgue(p), NormSpec::lebesgue(q), large, hp);
            worst = std::max(worst, std::abs(b.constant / a.constant - 1));
            ++pairs;
          }
        }
  note(o, worst <= 0.10, "max relative change under test-set doubling " + fmt(worst) + " <= 0.1 over " +
                             std::to_string(pairs) + " (operator, exponent) pairs");
  int n = 3;
  double p = 1.5, q = n * p / (n - p);
  HardyParams hp{n, 1, 0, 1, double(n)};
  auto at = [&](double eps) {
    return hardy_constant_fit(Reduced::R1, NormSpec::lebesgue(p), NormSpec::lebesgue(3 * q), {spike(eps)}, hp).constant;
  };
  double growth = at(1e-12) / at(1.0);
  note(o, growth >= 100, "supercritical spike growth " + fmt(growth) + " >= 100");
  return o;
}

// 9 ------------------------------------------------------------------
Outcome ex3_rates() {
  Outcome o;
  auto r = counterexamples::counterexample_run("ex3", {{"n", 3}, {"p", 1.25}, {"beta", 2.0}, {"k", 6}},
                                               experiments::preset("desk"));
  for (const char* c : {"slope_lhs", "slope_boundary"})
    for (const auto& k : r.checks)
      if (k.name == c) note(o, k.pass, k.name + " " + fmt(k.value) + " vs " + fmt(k.bound) + " (5%)");
  return o;
}

// 10 -----------------------------------------------------------------
Outcome violations() {
  Outcome o;
  auto res = experiments::preset("desk");
  auto e3 = counterexamples::counterexample_run("ex3", {{"eps_power", 4.0}, {"window", 4}}, res);
  auto ratio = e3.column("ratio");
  std::vector<double> w(ratio.begin(), ratio.begin() + 4);
  bool monotone = w[1] > w[0] && w[2] > w[1] && w[3] > w[2];
  double growth = w[3] / w[0];
  note(o, monotone && growth >= 10,
       "ex3 ratio k=1..4: " + fmt(w[0]) + ", " + fmt(w[1]) + ", " + fmt(w[2]) + ", " + fmt(w[3]) + " (growth " + fmt(growth) +
           ", needs increasing and >= 10)");
  auto e1 = counterexamples::counterexample_run("ex1", json::object(), res);
  note(o, e1.pass(), "ex1 grad L1 partial sums x" + fmt(e1.constants["grad_l1_growth"]) + ", hessian last increment " +
                         fmt(e1.constants["hessian_last_increment"]) + ", boundary sup " + fmt(e1.constants["boundary_sup"]));
  auto e2 = counterexamples::counterexample_run("ex2", json::object(), res);
  std::string trend;
  for (const auto& q : e2.constants["per_q"])
    trend += " q/q*=" + fmt(q["q_over_q_star"]) + ": slope " + fmt(q["ratio_trend"]["slope"]) + (q["diverges"].get<bool>() ? " diverges" : " bounded");
  note(o, e2.pass(), "ex2" + trend);
  return o;
}

// 11 -----------------------------------------------------------------
Outcome zero_trace() {
  Outcome o;
  auto box = geometry::gallery("box", {{"n", 3}});
  fields::BoxBubbleField u(3, {0, 0, 0}, {1, 1, 1}, 2);
  auto r = experiments::pointwise_audit(box, u, 2, 0, experiments::preset("desk"), experiments::kDefaultSeed);
  bool zero = r.constants["boundary_terms_zero"].get<bool>();
  for (double t : r.column("t")) zero = zero && t == 0.0;
  note(o, zero, "boundary-term contributions exactly 0");
  bool finite = r.constants["C"].is_number() && std::isfinite(r.constants["C"].get<double>());
  note(o, finite, "Riesz-only constant " + (finite ? fmt(r.constants["C"]) : std::string("missing")));
  return o;
}

// 12 -----------------------------------------------------------------
std::vector<std::string> suite_outputs() {
  auto res = experiments::preset("smoke");
  std::vector<AuditReport> reps;
  auto disc = geometry::gallery("ball", {{"n", 2}});
  fields::PolynomialField bowl(2, {{{{0, 0}}, 1.0}, {{{2, 0}}, -1.0}, {{{0, 2}}, -1.0}});
  auto mu = geometry::sample_volume(disc, res.cloud, 99);
  reps.push_back(experiments::pointwise_audit(disc, bowl, 1, 0, res, 1));
  reps.push_back(experiments::rearrangement_audit(disc, mu, bowl, 1, 0, 2.0, res, 3));
  reps.push_back(experiments::sobolev_audit(experiments::Theorem::MainMeasure, disc, mu, bowl, {1, 0, 1.5, 0, {}}, res, 3));
  reps.push_back(experiments::sobolev_audit(experiments::Theorem::TrudMeasure, disc, mu, bowl, {1, 0, 1.5, 0, {}}, res, 3));
  reps.push_back(experiments::sobolev_audit(experiments::Theorem::SuperLimiting, disc, mu, bowl, {1, 0, 3, 0, {}}, res, 3));
  reps.push_back(experiments::appendix_identity_check(2, 3, 100, 5));
  for (const auto& name : counterexamples::names())
    reps.push_back(counterexamples::counterexample_run(name, name == "ex2" ? json{{"k", 6}} : json::object(), res));
  std::vector<std::string> out;
  for (const auto& r : reps) {
    out.push_back(r.to_json().dump(2));
    out.push_back(r.to_csv());
  }
  return out;
}

Outcome determinism() {
  Outcome o;
  set_default_threads(1);
  auto a = suite_outputs();
  set_default_threads(4);
  auto b = suite_outputs();
  set_default_threads(0);
  std::size_t same = 0;
  for (std::size_t i = 0; i < a.size(); ++i) same += a[i] == b[i];
  note(o, same == a.size(), std::to_string(same) + "/" + std::to_string(a.size()) + " JSON/CSV outputs byte-identical (1 vs 4 threads)");
  return o;
}

}  // namespace

int main() {
  std::cout << std::unitbuf;
  struct Criterion {
    int id;
    const char* title;
    double budget;  // seconds
    Outcome (*run)();
  };
  const Criterion all[] = {
      {1, "kernel identities", 1, kernel_identities},
      {2, "representation formula", 1, representation},
      {3, "Green kernel boundary conditions", 5, green_boundary},
      {4, "dual basis", 10, dual_basis},
      {5, "appendix identity", 30, appendix_identity},
      {6, "projection bound", 120, projection_bound},
      {7, "Riesz composition", 120, riesz_composition},
      {8, "Hardy admissibility", 60, hardy_admissibility},
      {9, "counterexample rates", 300, ex3_rates},
      {10, "counterexample violations", 600, violations},
      {11, "zero-trace reduction", 60, zero_trace},
      {12, "determinism", 3600, determinism},
  };
  int failed = 0;
  for (const auto& c : all) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool in_time = secs < c.budget;
    bool pass = o.pass && in_time;
    failed += !pass;
    char head[128];
    std::snprintf(head, sizeof head, "%s criterion %2d  %-34s %8.2fs (budget %gs)%s", pass ? "PASS" : "FAIL", c.id, c.title, secs,
                  c.budget, in_time ? "" : " [over budget]");
    std::cout << head << "\n    " << o.detail << "\n";
  }
  std::cout << (failed ? std::to_string(failed) + " criterion(s) failed" : std::string("all criteria passed")) << "\n";
  return failed ? 1 : 0;
}
