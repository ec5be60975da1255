#include "sobolab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sobolab/operators.hpp"
#include "sobolab/rearrange.hpp"
#include "sobolab/seminorms.hpp"

namespace sobolab::experiments {

namespace {

using rearrange::NormSpec;
using rearrange::Reduced;
using rearrange::StepFunction;

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t key) { return Rng(seed).split(key).next_u64(); }

std::vector<double> grad_on(const FieldFn& u, const std::vector<Vec3>& pts, int j) {
  std::vector<double> out(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) { out[i] = fields::grad_norm(u, pts[i], j); });
  return out;
}

bool all_zero(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// Feasible upper gradient of the boundary seminorm attached to derivative order d.
struct BoundaryGradient {
  int order, k, j;
  std::vector<double> g;
  bool zero;
  std::size_t skipped;
};

BoundaryGradient boundary_gradient(const FieldFn& u, const Cloud& B, int order) {
  auto [k, j] = seminorms::seminorm_indices(order);
  seminorms::PairDifference D(u, B, k, j);
  BoundaryGradient bg{order, k, j, seminorms::feasible_upper_gradient(D), false, D.skipped()};
  bg.zero = all_zero(bg.g);
  return bg;
}

void check_field(const Domain& d, const FieldFn& u, int m, int h) {
  const int n = d.dim();
  if (u.dim() != n) throw std::invalid_argument("audit: field and domain dimensions differ");
  if (h < 0 || !(m - h > 0 && m - h < n)) throw std::invalid_argument("audit: need 0 < m - h < n");
  if (u.max_order() < m) throw std::invalid_argument("audit: field lacks derivatives of order " + std::to_string(m));
  if (!d.bounded()) throw std::invalid_argument("audit: domain is unbounded");
}

}  // namespace

Resolution Resolution::doubled() const {
  Resolution r = *this;
  r.name += "x2";
  r.cloud *= 2;
  r.directions *= 2;
  r.nodes *= 2;
  return r;
}

json Resolution::to_json() const {
  return {{"preset", name}, {"cloud", cloud}, {"boundary_cloud", boundary_cloud()}, {"directions", directions}, {"nodes", nodes}};
}

Resolution preset(const std::string& name) {
  if (name == "smoke") return {"smoke", 1000, 256, 32};
  if (name == "desk") return {"desk", 10000, 2048, 64};
  if (name == "thorough") return {"thorough", 100000, 16384, 128};
  throw std::invalid_argument("unknown resolution preset '" + name + "'");
}

AuditReport pointwise_audit(const Domain& d, const FieldFn& u, int m, int h, const Resolution& res, std::uint64_t seed,
                            const PointwiseOptions& opt) {
  check_field(d, u, m, h);
  const int n = d.dim();
  std::size_t Mc = opt.cloud_directions ? opt.cloud_directions : std::max<std::size_t>(res.directions / 16, 8);

  AuditReport r;
  r.experiment = "pointwise";
  r.params = {{"n", n}, {"m", m}, {"h", h}, {"seed", seed}, {"probes", opt.probes}, {"clearance", opt.clearance},
              {"field", u.describe()}, {"domain", d.meta}};
  r.resolution = res.to_json();
  r.resolution["cloud_directions"] = Mc;

  Cloud V = geometry::sample_volume(d, res.cloud, sub_seed(seed, 1));
  Cloud B = geometry::sample_boundary(d, res.boundary_cloud(), sub_seed(seed, 2));
  auto probes = operators::interior_probes(d, opt.probes, sub_seed(seed, 3), opt.clearance * d.diameter());
  std::vector<double> fv = grad_on(u, V.points, m);

  // terms[0]: T g for derivative order h; terms[k]: Q_k g for order k + h
  std::vector<BoundaryGradient> terms;
  for (int k = 0; k < m - h; ++k) terms.push_back(boundary_gradient(u, B, k + h));
  operators::CloudLookup lookup(B);
  std::vector<operators::PointFn> gfn;
  std::vector<std::vector<double>> tg(terms.size());
  for (std::size_t k = 0; k < terms.size(); ++k) {
    gfn.push_back(lookup.values(terms[k].g));
    if (k > 0 && !terms[k].zero) tg[k] = operators::t_on_cloud(d, gfn[k], V, Mc, sub_seed(seed, 100 + k));
  }

  const std::size_t P = probes.size(), T = terms.size();
  std::vector<double> lhs(P), riesz(P), rhs(P);
  std::vector<std::vector<double>> contrib(P, std::vector<double>(T, 0.0));
  parallel_for(P, [&](std::size_t i) {
    const Vec3& x = probes[i];
    lhs[i] = fields::grad_norm(u, x, h);
    riesz[i] = operators::op_I(m - h, V, fv, fields::grad_norm(u, x, m), x);
    double s = riesz[i];
    for (std::size_t k = 0; k < T; ++k) {
      if (terms[k].zero) continue;
      double tx = operators::op_T(d, gfn[k], x, res.directions, sub_seed(seed, 1000 + 16 * i + k));
      contrib[i][k] = k == 0 ? tx : operators::op_Q(static_cast<double>(k), V, tg[k], tx, x);
      s += contrib[i][k];
    }
    rhs[i] = s;
  });

  r.columns = {"probe"};
  const char* axes[] = {"x1", "x2", "x3"};
  for (int a = 0; a < n; ++a) r.columns.push_back(axes[a]);
  r.columns.insert(r.columns.end(), {"lhs", "riesz"});
  for (std::size_t k = 1; k < T; ++k) r.columns.push_back("q" + std::to_string(k));
  r.columns.insert(r.columns.end(), {"t", "rhs", "ratio"});

  double C = 0.0;
  bool any_ratio = false, finite = true;
  for (std::size_t i = 0; i < P; ++i) {
    std::vector<double> row{static_cast<double>(i)};
    for (int a = 0; a < n; ++a) row.push_back(probes[i][a]);
    row.push_back(lhs[i]);
    row.push_back(riesz[i]);
    for (std::size_t k = 1; k < T; ++k) row.push_back(contrib[i][k]);
    row.push_back(contrib[i][0]);
    row.push_back(rhs[i]);
    double ratio = nan();
    if (rhs[i] > 0) {
      ratio = lhs[i] / rhs[i];
      C = std::max(C, ratio);
      any_ratio = true;
    } else if (lhs[i] > 0) {
      finite = false;
      r.warnings.push_back("probe " + std::to_string(i) + ": positive LHS with zero RHS");
    }
    row.push_back(ratio);
    r.add_row(std::move(row));
  }

  bool boundary_zero = true;
  json bterms = json::array();
  for (std::size_t k = 0; k < T; ++k) {
    double total = 0.0;
    for (std::size_t i = 0; i < P; ++i) total += contrib[i][k];
    boundary_zero = boundary_zero && total == 0.0;
    bterms.push_back({{"derivative_order", terms[k].order}, {"k", terms[k].k}, {"j", terms[k].j}, {"g_zero", terms[k].zero},
                      {"skipped_pairs", terms[k].skipped}, {"sum_over_probes", total}});
  }
  r.constants["C"] = any_ratio && finite ? json(C) : json(nullptr);
  r.constants["boundary_terms"] = bterms;
  r.constants["boundary_terms_zero"] = boundary_zero;
  r.check("finite_constant", finite, any_ratio ? C : nan(), INFINITY);
  return r;
}

AuditReport rearrangement_audit(const Domain& d, const Cloud& mu, const FieldFn& u, int m, int h, double alpha,
                                const Resolution& res, std::uint64_t seed, const RearrangementOptions& opt) {
  check_field(d, u, m, h);
  const int n = d.dim();
  rearrange::HardyParams hp{n, m, h, 1, alpha};
  hp.validate(Reduced::R1);
  if (opt.dilations.empty() || opt.grid < 2) throw std::invalid_argument("rearrangement_audit: need dilations and a grid of two or more points");
  if (mu.points.empty()) throw std::invalid_argument("rearrangement_audit: empty measure cloud");

  AuditReport r;
  r.experiment = "rearrangement";
  r.params = {{"n", n}, {"m", m}, {"h", h}, {"alpha", alpha}, {"seed", seed}, {"dilations", opt.dilations}, {"grid", opt.grid},
              {"measure_cloud", {{"kind", geometry::to_string(mu.kind)}, {"size", mu.size()}, {"seed", mu.seed}}},
              {"field", u.describe()}, {"domain", d.meta}};
  r.resolution = res.to_json();

  auto fit = geometry::measure_check(mu, alpha, opt.measure_probes, sub_seed(seed, 4));
  r.constants["measure"] = {{"c_mu", fit.c_mu}, {"small_radius_slope", fit.small_radius_slope}, {"diverges", fit.diverges}};
  if (fit.diverges) throw std::runtime_error("rearrangement_audit: the measure condition diverges for alpha = " + report::format_double(alpha));

  Cloud V = geometry::sample_volume(d, res.cloud, sub_seed(seed, 1));
  Cloud B = geometry::sample_boundary(d, res.boundary_cloud(), sub_seed(seed, 2));
  StepFunction phi = rearrange::rearrange(grad_on(u, mu.points, h), mu.weights);
  StepFunction F = rearrange::rearrange(grad_on(u, V.points, m), V.weights);
  std::vector<StepFunction> G;
  for (int k = 0; k < m - h; ++k) G.push_back(rearrange::rearrange(boundary_gradient(u, B, k + h).g, B.weights));

  auto rhs_at = [&](double s) {
    double v = rearrange::reduced_op(Reduced::R1, F, s, hp) + rearrange::reduced_op(Reduced::R2, F, s, hp);
    for (int k = 1; k < m - h; ++k) {
      rearrange::HardyParams hk = hp;
      hk.k = k;
      v += rearrange::reduced_op(Reduced::R3, G[k], s, hk) + rearrange::reduced_op(Reduced::R4, G[k], s, hk);
    }
    return v + rearrange::reduced_op(Reduced::R5, G[0], s, hp);
  };

  const double smax = mu.total();
  const std::size_t D = opt.dilations.size();
  r.columns = {"s", "phi", "rhs"};
  for (double c : opt.dilations) r.columns.push_back("ratio_c" + report::format_double(c));
  std::vector<double> C(D, 0.0);
  bool finite = true;
  for (int i = 0; i < opt.grid; ++i) {
    double s = smax * std::pow(10.0, -3.0 + 3.0 * i / (opt.grid - 1));
    double rhs = rhs_at(s);
    std::vector<double> row{s, phi(s), rhs};
    for (std::size_t c = 0; c < D; ++c) {
      double lhs = phi(opt.dilations[c] * s);
      double ratio = nan();
      if (rhs > 0) {
        ratio = lhs / rhs;
        C[c] = std::max(C[c], ratio);
      } else if (lhs > 0) {
        C[c] = INFINITY;
        finite = false;
      }
      row.push_back(ratio);
    }
    r.add_row(std::move(row));
  }
  if (phi.empty()) {
    r.constants["C"] = nullptr;
    r.constants["best"] = nullptr;
    r.warnings.push_back("|grad^h u| vanishes on the measure cloud; no constant");
    return r;
  }
  std::size_t best = std::min_element(C.begin(), C.end()) - C.begin();
  json cs = json::array();
  for (double v : C) cs.push_back(number_or_null(v));
  r.constants["C"] = cs;
  r.constants["best"] = {{"c", opt.dilations[best]}, {"C", number_or_null(C[best])}};
  r.check("finite_constant", std::isfinite(C[best]), C[best], INFINITY);
  if (!finite) r.warnings.push_back("some dilations meet a zero RHS with positive LHS");
  return r;
}

Theorem theorem_from_string(const std::string& name) {
  if (name == "mainmeasure") return Theorem::MainMeasure;
  if (name == "trudmeasure") return Theorem::TrudMeasure;
  if (name == "superlimiting") return Theorem::SuperLimiting;
  throw std::invalid_argument("unknown theorem '" + name + "'");
}

std::string to_string(Theorem t) {
  switch (t) {
    case Theorem::MainMeasure: return "mainmeasure";
    case Theorem::TrudMeasure: return "trudmeasure";
    case Theorem::SuperLimiting: return "superlimiting";
  }
  return "";
}

AuditReport sobolev_audit(Theorem t, const Domain& d, const Cloud& mu, const FieldFn& u, const SobolevParams& prm,
                          const Resolution& res, std::uint64_t seed) {
  const int n = d.dim(), m = prm.m, h = prm.h, mh = m - h;
  check_field(d, u, m, h);
  const double alpha = prm.alpha == 0.0 ? n : prm.alpha;
  if (t != Theorem::SuperLimiting && !(alpha > n - 1 && alpha <= n))
    throw std::invalid_argument("sobolev_audit: need n - 1 < alpha <= n");
  if (mu.points.empty()) throw std::invalid_argument("sobolev_audit: empty measure cloud");
  double p = prm.p;
  std::vector<double> pk = prm.pk;
  switch (t) {
    case Theorem::MainMeasure:
      if (!(p > 1 && p < static_cast<double>(n) / mh)) throw std::invalid_argument("sobolev_audit: mainmeasure needs 1 < p < n/(m-h)");
      break;
    case Theorem::TrudMeasure:
      p = static_cast<double>(n) / mh;
      break;
    case Theorem::SuperLimiting:
      if (!(p > static_cast<double>(n) / mh)) throw std::invalid_argument("sobolev_audit: superlimiting needs p > n/(m-h)");
      if (pk.empty())
        for (int k = 1; k < mh; ++k) pk.push_back(2.0 * (n - 1) / k);
      if (pk.size() != static_cast<std::size_t>(mh - 1)) throw std::invalid_argument("sobolev_audit: need m-h-1 boundary exponents p_k");
      for (int k = 1; k < mh; ++k)
        if (!(pk[k - 1] > static_cast<double>(n - 1) / k)) throw std::invalid_argument("sobolev_audit: need p_k > (n-1)/k");
      break;
  }

  AuditReport r;
  r.experiment = "sobolev";
  r.params = {{"theorem", to_string(t)}, {"n", n}, {"m", m}, {"h", h}, {"p", p}, {"alpha", alpha}, {"seed", seed},
              {"measure_cloud", {{"kind", geometry::to_string(mu.kind)}, {"size", mu.size()}, {"seed", mu.seed}}},
              {"field", u.describe()}, {"domain", d.meta}};
  if (t == Theorem::SuperLimiting) r.params["pk"] = pk;
  r.resolution = res.to_json();

  Cloud V = geometry::sample_volume(d, res.cloud, sub_seed(seed, 1));
  Cloud B = geometry::sample_boundary(d, res.boundary_cloud(), sub_seed(seed, 2));
  const double muV = mu.total(), bV = B.total();

  NormSpec lhs_spec;
  switch (t) {
    case Theorem::MainMeasure: lhs_spec = NormSpec::lebesgue(alpha * p / (n - mh * p)); break;
    case Theorem::TrudMeasure: lhs_spec = NormSpec::exp_orlicz(static_cast<double>(n) / (n - mh), muV); break;
    case Theorem::SuperLimiting: lhs_spec = NormSpec::lebesgue(INFINITY); break;
  }
  // boundary seminorm menu, indexed by k (derivative order k + h)
  std::vector<std::pair<int, NormSpec>> menu;
  for (int k = 0; k < mh; ++k) {
    switch (t) {
      case Theorem::MainMeasure:
        menu.push_back({k, NormSpec::lebesgue(p * (n - 1) / (n - (mh - k) * p))});
        break;
      case Theorem::TrudMeasure:
        if (k == 0)
          menu.push_back({k, NormSpec::exp_orlicz(static_cast<double>(n) / (n - mh), bV)});
        else
          menu.push_back({k, NormSpec::zygmund_log(static_cast<double>(n - 1) / k, static_cast<double>(mh * (n - k - 1)) / (n * k), bV)});
        break;
      case Theorem::SuperLimiting:
        menu.push_back({k, NormSpec::lebesgue(k == 0 ? INFINITY : pk[k - 1])});
        break;
    }
  }

  double lhs = rearrange::norm(rearrange::rearrange(grad_on(u, mu.points, h), mu.weights), lhs_spec);
  double top = rearrange::norm(rearrange::rearrange(grad_on(u, V.points, m), V.weights), NormSpec::lebesgue(p));
  r.columns = {"term", "derivative_order", "value"};
  r.add_row({0, static_cast<double>(h), lhs});
  r.add_row({1, static_cast<double>(m), top});
  double rhs = top;
  json menu_json = json::array();
  for (const auto& [k, spec] : menu) {
    auto [kk, j] = seminorms::seminorm_indices(k + h);
    double v = seminorms::v_seminorm(u, B, kk, j, spec);
    rhs += v;
    r.add_row({2.0 + k, static_cast<double>(k + h), v});
    menu_json.push_back({{"derivative_order", k + h}, {"k", kk}, {"j", j}, {"norm", spec.describe()}, {"value", v}});
  }
  r.constants["lhs"] = lhs;
  r.constants["lhs_norm"] = lhs_spec.describe();
  r.constants["grad_m_norm"] = top;
  r.constants["boundary_menu"] = menu_json;
  r.constants["rhs"] = rhs;
  if (rhs > 0) {
    r.constants["C"] = lhs / rhs;
    r.check("finite_constant", std::isfinite(lhs / rhs), lhs / rhs, INFINITY);
  } else {
    r.constants["C"] = nullptr;
    if (lhs > 0) r.check("finite_constant", false, INFINITY, INFINITY, "positive LHS with zero RHS");
  }
  return r;
}

AuditReport appendix_identity_check(int ell, int n, std::size_t trials, std::uint64_t seed) {
  if (ell < 1 || ell > 3 || n < 1 || n > 3) throw std::invalid_argument("appendix_identity_check: need 1 <= l <= 3 and 1 <= n <= 3");
  if (trials == 0) throw std::invalid_argument("appendix_identity_check: trials must be positive");
  AuditReport r;
  r.experiment = "appendix";
  r.params = {{"ell", ell}, {"n", n}, {"trials", trials}, {"seed", seed}};
  r.columns = {"trial", "degree", "distance", "functional", "max_term", "relative"};

  auto draw_pair = [&](Rng& rng, Vec3& x, Vec3& y) {
    do {
      x = y = Vec3{};
      for (int i = 0; i < n; ++i) {
        x[i] = rng.uniform(-1, 1);
        y[i] = rng.uniform(-1, 1);
      }
    } while (norm(y - x) < 0.25);
  };

  const int low = 2 * ell - 2, top = 2 * ell - 1;
  double worst = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng = Rng(seed).split(t);
    auto u = fields::random_polynomial(n, low, rng);
    Vec3 x, y;
    draw_pair(rng, x, y);
    auto tp = seminorms::two_point_terms(*u, x, y, ell);
    double rel = tp.max_term > 0 ? std::abs(tp.sum) / tp.max_term : 0.0;
    worst = std::max(worst, rel);
    r.add_row({static_cast<double>(t), static_cast<double>(low), norm(y - x), tp.sum, tp.max_term, rel});
  }
  r.constants["max_residual"] = worst;
  r.check("identity_residual", worst <= 1e-9, worst, 1e-9);

  // degree 2l-1: x_1^{2l-1} followed by random polynomials, two independent pair draws
  std::vector<double> cfit(2, 0.0);
  double mono_fit = 0.0;
  for (int draw = 0; draw < 2; ++draw)
    for (std::size_t t = 0; t <= trials; ++t) {
      Rng rng = Rng(seed, 1 + draw).split(t);
      std::shared_ptr<const fields::PolynomialField> u;
      if (t == 0) {
        combinat::MultiIndex a{std::vector<int>(n, 0)};
        a.entries[0] = top;
        u = std::make_shared<fields::PolynomialField>(n, std::vector<fields::PolynomialField::Term>{{a, 1.0}});
      } else {
        u = fields::random_polynomial(n, top, rng);
      }
      Vec3 x, y;
      draw_pair(rng, x, y);
      auto tp = seminorms::two_point_terms(*u, x, y, ell);
      double bound = fields::grad_norm(*u, x, top) + fields::grad_norm(*u, y, top);
      if (!(bound > 0)) continue;
      double c = std::abs(tp.sum) / bound;
      cfit[draw] = std::max(cfit[draw], c);
      if (t == 0) mono_fit = std::max(mono_fit, c);
      if (draw == 0) r.add_row({static_cast<double>(trials + t), static_cast<double>(top), norm(y - x), tp.sum, tp.max_term, c});
    }
  double c_fit = std::max(cfit[0], cfit[1]);
  double spread = std::min(cfit[0], cfit[1]) > 0 ? std::max(cfit[0], cfit[1]) / std::min(cfit[0], cfit[1]) : INFINITY;
  r.constants["c_fit"] = c_fit;
  r.constants["c_fit_draws"] = cfit;
  r.constants["c_fit_monomial"] = mono_fit;
  r.check("c_fit_stable", spread <= 2.0, spread, 2.0);
  return r;
}

}  // namespace sobolab::experiments
