#include "sobolab/counterexamples.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sobolab/gallery.hpp"
#include "sobolab/seminorms.hpp"

namespace sobolab::counterexamples {

namespace {

using fields::AxialProfileField;
using fields::FieldFn;
using fields::Poly1D;
using fields::Spline1D;
using geometry::Cloud;
using geometry::Domain;

const json& defaults(const std::string& name) {
  static const json d = {
      {"ex3", {{"n", 3}, {"p", 1.25}, {"beta", 2.0}, {"k", 6}, {"h", nullptr}, {"eps_power", 8.0}, {"corridor_factor", 0.25},
               {"order", 4}, {"factor", 10.0}, {"window", 4}}},
      {"ex1", {{"p", 1.5}, {"k", 12}, {"b", nullptr}, {"a", 1.0}, {"d_power", 3.0}, {"order", 16}, {"factor", 10.0},
               {"convergence_tol", 0.01}}},
      {"ex2", {{"n", 3}, {"p", 2.5}, {"r", 3.0}, {"k", 10}, {"b", nullptr}, {"d_power", 4.0}, {"q_factors", {0.9, 1.1}},
               {"order", 16}, {"boundary_order", 2}, {"tail_fraction", 0.01}}},
      {"ex4a", {{"n", 3}, {"m", 3}, {"h", 1}, {"i", 1}, {"p", 1.25}, {"alpha", 2.0}, {"k", 14}, {"delta", nullptr},
                {"corridor_scale", 0.25}, {"smoothness", 3}, {"factor", 10.0}}},
      {"ex4b", {{"n", 3}, {"m", 3}, {"h", 0}, {"i", 1}, {"p", 1.25}, {"sigma", 0.3}, {"alpha", 4.0}, {"k", 8},
                {"delta", nullptr}, {"corridor_scale", 0.25}, {"smoothness", 3}, {"factor", 10.0}}}};
  if (!d.contains(name)) throw std::invalid_argument("unknown counterexample '" + name + "'");
  return d.at(name);
}

// Decay sequence: explicit list (strictly decreasing, positive) or 2^{-first}, ..., K terms.
std::vector<double> sequence(const json& v, int K, const char* what, int first = 1) {
  std::vector<double> s;
  if (v.is_null()) {
    if (K < 2) throw std::invalid_argument(std::string(what) + ": need k >= 2");
    for (int k = first; k < first + K; ++k) s.push_back(std::ldexp(1.0, -k));
    return s;
  }
  s = v.get<std::vector<double>>();
  if (s.size() < 2) throw std::invalid_argument(std::string(what) + ": need two or more terms");
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(s[i] > 0)) throw std::invalid_argument(std::string(what) + ": terms must be positive");
    if (i > 0 && !(s[i] < s[i - 1])) throw std::invalid_argument(std::string(what) + ": sequence is not strictly decreasing");
  }
  return s;
}

Vec3 axis_vec(int n) {
  Vec3 e{};
  e[n - 1] = 1.0;
  return e;
}

// sum_i w_i F(x_i), evaluated in parallel and summed in index order
template <class F>
double quad_sum(const std::vector<Vec3>& pts, const std::vector<double>& w, F f) {
  std::vector<double> v(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) { v[i] = w[i] * f(pts[i]); });
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

double lp(double sum_pow, double p) { return std::pow(sum_pow, 1.0 / p); }

report::RateFit fit(const std::vector<double>& x, const std::vector<double>& y) { return report::fit_loglog(x, y); }

void check_slope(AuditReport& r, const std::string& name, const report::RateFit& f, double expected, double tol) {
  bool ok = f.reportable() && std::abs(f.slope - expected) <= tol * std::abs(expected);
  r.check(name, ok, f.slope, expected, "relative tolerance " + report::format_double(tol));
}

// ---------------------------------------------------------------- ex3

AxialProfileField ex3_field(const geometry::CuspChainLayout& L, std::size_t k, int n) {
  const auto& r = L.rooms[k];
  Spline1D s;
  s.add(r.corridor_lo, r.z, fields::quintic_hermite(r.z - r.corridor_lo, {0, 0, 0}, {1, -1 / r.h, 0}));
  s.add(r.z, r.z + r.h, Poly1D({1.0, -1.0 / r.h}));
  if (k + 1 < L.rooms.size()) {
    const auto& nx = L.rooms[k + 1];
    s.add(nx.corridor_lo, nx.z, fields::quintic_hermite(nx.z - nx.corridor_lo, {0, -1 / r.h, 0}, {0, 0, 0}));
  }
  return AxialProfileField(n, Vec3{}, axis_vec(n), std::move(s), 2);
}

struct Ex3Norms {
  std::vector<double> lhs, bnd, hess;
};

Ex3Norms ex3_norms(const geometry::CuspChainParams& cp, int order, double q, double qb, double p) {
  Domain d = geometry::cusp_chain(cp);
  auto L = geometry::cusp_chain_layout(cp);
  Cloud V = geometry::quadrature_volume(d, order);
  Cloud B = geometry::quadrature_boundary(d, order);
  const int n = cp.n;
  Ex3Norms out;
  for (std::size_t k = 0; k < L.rooms.size(); ++k) {
    auto u = ex3_field(L, k, n);
    double lo = L.rooms[k].corridor_lo, hi = k + 1 < L.rooms.size() ? L.rooms[k + 1].z : L.rooms[k].z + L.rooms[k].h;
    auto in = [&](const Vec3& x) { return x[n - 1] >= lo && x[n - 1] <= hi; };
    out.lhs.push_back(lp(quad_sum(V.points, V.weights, [&](const Vec3& x) { return in(x) ? std::pow(std::abs(u.value(x)), q) : 0.0; }), q));
    out.bnd.push_back(lp(quad_sum(B.points, B.weights, [&](const Vec3& x) { return in(x) ? std::pow(std::abs(u.value(x)), qb) : 0.0; }), qb));
    out.hess.push_back(lp(quad_sum(V.points, V.weights, [&](const Vec3& x) { return in(x) ? std::pow(fields::grad_norm(u, x, 2), p) : 0.0; }), p));
  }
  return out;
}

AuditReport run_ex3(const json& P, const Resolution& res) {
  const int n = P["n"], K = P["k"], order = P["order"], window = P["window"];
  const double p = P["p"], beta = P["beta"], ep = P["eps_power"], factor = P["factor"];
  if (n != 2 && n != 3) throw std::invalid_argument("ex3: n must be 2 or 3");
  if (!(p > 1 && p < n / 2.0)) throw std::invalid_argument("ex3: need 1 < p < n/2");
  if (!(ep > 1)) throw std::invalid_argument("ex3: eps_power must exceed 1");
  if (!(beta > 0) || order < 1) throw std::invalid_argument("ex3: invalid beta or order");
  auto h = sequence(P["h"], K, "ex3 h");
  if (window < 2 || window > static_cast<int>(h.size())) throw std::invalid_argument("ex3: window must lie in [2, k]");
  std::vector<double> eps;
  for (double x : h) eps.push_back(std::pow(x, ep));
  const double q = p * n / (n - 2 * p), qb = p * (n - 1) / (n - 2 * p);
  const double s_lhs = ((n - 1) * beta + 1) * (n - 2 * p) / (n * p), s_bnd = ((n - 2) * beta + 1) * (n - 2 * p) / ((n - 1) * p);

  geometry::CuspChainParams cp;
  cp.n = n;
  cp.beta = beta;
  cp.h = h;
  cp.eps = eps;
  cp.corridor_factor = P["corridor_factor"];
  cp.resolution = res.nodes;
  Ex3Norms a = ex3_norms(cp, order, q, qb, p);
  cp.resolution = 2 * res.nodes;
  Ex3Norms b = ex3_norms(cp, order, q, qb, p);

  AuditReport r;
  r.experiment = "counterexample/ex3";
  r.params = P;
  r.resolution = res.to_json();
  r.resolution["frusta_per_room"] = {res.nodes, 2 * res.nodes};
  r.resolution["order"] = order;
  r.columns = {"k", "h", "eps", "lhs", "boundary", "hessian", "ratio", "lhs_fine", "boundary_fine", "ratio_fine"};
  std::vector<double> ratio, ratio_fine;
  for (std::size_t k = 0; k < h.size(); ++k) {
    ratio.push_back(a.lhs[k] / (a.hess[k] + a.bnd[k]));
    ratio_fine.push_back(b.lhs[k] / (b.hess[k] + b.bnd[k]));
    r.add_row({static_cast<double>(k + 1), h[k], eps[k], a.lhs[k], a.bnd[k], a.hess[k], ratio[k], b.lhs[k], b.bnd[k], ratio_fine[k]});
  }
  auto fl = fit(h, a.lhs), fb = fit(h, a.bnd), flf = fit(h, b.lhs), fbf = fit(h, b.bnd);
  r.add_rate("lhs_vs_h", fl);
  r.add_rate("boundary_vs_h", fb);
  r.add_rate("lhs_vs_h_fine", flf);
  r.add_rate("boundary_vs_h_fine", fbf);
  r.constants["q"] = q;
  r.constants["boundary_exponent"] = qb;
  r.constants["expected_slope_lhs"] = s_lhs;
  r.constants["expected_slope_boundary"] = s_bnd;
  std::vector<double> win(ratio.begin(), ratio.begin() + window);
  r.constants["ratio_growth"] = win.back() / win.front();
  r.constants["inequality_violated"] = violation(win, factor);
  check_slope(r, "slope_lhs", fl, s_lhs, 0.05);
  check_slope(r, "slope_boundary", fb, s_bnd, 0.05);
  r.check("resolution_slope_lhs", std::abs(flf.slope / fl.slope - 1) <= 0.05, flf.slope / fl.slope - 1, 0.05);
  r.check("resolution_slope_boundary", std::abs(fbf.slope / fb.slope - 1) <= 0.05, fbf.slope / fb.slope - 1, 0.05);
  return r;
}

// ------------------------------------------------------- ex1 and ex2

// 0 below the neck, quintic blend on the neck (0, 0, 0) -> (1, 1/b, 0), then
// 1 + (t - c)/b in the room.
Spline1D neck_room_profile(double c, double b) {
  Spline1D s;
  s.add(0.0, c, fields::quintic_hermite(c, {0, 0, 0}, {1, 1 / b, 0}));
  s.add(c, c + b, Poly1D({1.0, 1.0 / b}));
  return s;
}

struct ColumnNorms {
  double grad_q = 0.0;  // int |grad u|^q over neck and room
  double room_grad_q = 0.0;
  double hess_p = 0.0;  // int |grad^2 u|^p over the neck
};

// u depends on the last coordinate only inside a column, so the neck and room
// integrals are taken over congruent boxes placed at the origin.
ColumnNorms column_norms(int n, double a, double b, double c, double d, double q, double p, int order) {
  AxialProfileField u(n, Vec3{}, axis_vec(n), neck_room_profile(c, b), 2);
  auto box = [&](double half, double z0, double z1) {
    Vec3 lo{}, hi{};
    for (int i = 0; i + 1 < n; ++i) {
      lo[i] = -half;
      hi[i] = half;
    }
    lo[n - 1] = z0;
    hi[n - 1] = z1;
    return geometry::Box(n, lo, hi);
  };
  std::vector<Vec3> pn, pr;
  std::vector<double> wn, wr;
  box(d / 2, 0.0, c).volume_quadrature(order, pn, wn);
  box(a / 2, c, c + b).volume_quadrature(order, pr, wr);
  ColumnNorms out;
  auto g1 = [&](const Vec3& x) { return std::pow(fields::grad_norm(u, x, 1), q); };
  out.room_grad_q = quad_sum(pr, wr, g1);
  out.grad_q = quad_sum(pn, wn, g1) + out.room_grad_q;
  out.hess_p = quad_sum(pn, wn, [&](const Vec3& x) { return std::pow(fields::grad_norm(u, x, 2), p); });
  return out;
}

// Columns of the rooms layout carry the neck/room profile; zero elsewhere.
std::shared_ptr<fields::RegionField> rooms_field(const geometry::RoomsLayout& L, int n) {
  const auto& q = L.params;
  std::vector<std::pair<geometry::PrimitivePtr, fields::FieldPtr>> parts;
  for (std::size_t k = 0; k < q.a.size(); ++k) {
    double a = q.a[k], m = 0.2 * a;
    Vec3 lo{}, hi{};
    lo[0] = L.x_left[k] - m;
    hi[0] = L.x_left[k] + a + m;
    if (n == 3) {
      lo[1] = -a / 2 - m;
      hi[1] = a / 2 + m;
    }
    lo[n - 1] = -2.0;
    hi[n - 1] = q.c[k] + q.b[k] + 1.0;
    auto f = std::make_shared<AxialProfileField>(n, Vec3{}, axis_vec(n), neck_room_profile(q.c[k], q.b[k]), 2);
    parts.push_back({std::make_shared<geometry::Box>(n, lo, hi), f});
  }
  return std::make_shared<fields::RegionField>(n, std::move(parts));
}

AuditReport run_ex1(const json& P, const Resolution& res) {
  const int K = P["k"], order = P["order"];
  const double p = P["p"], a = P["a"], dp = P["d_power"], factor = P["factor"], tol = P["convergence_tol"];
  if (!(p > 1 && p < 2)) throw std::invalid_argument("ex1: need 1 < p < 2");
  if (!(a > 0) || !(dp > 1) || order < 2) throw std::invalid_argument("ex1: invalid a, d_power or order");
  auto b = sequence(P["b"], K, "ex1 b");
  std::vector<double> c = b, d, av(b.size(), a);
  for (double x : c) d.push_back(std::pow(x, dp));
  geometry::RoomsParams rp{2, av, b, c, d};
  Domain dom = geometry::rooms_corridors(rp);
  auto L = geometry::rooms_layout(rp);
  auto u = rooms_field(L, 2);

  AuditReport r;
  r.experiment = "counterexample/ex1";
  r.params = P;
  r.resolution = res.to_json();
  r.resolution["order"] = order;
  r.columns = {"k", "a", "b", "c", "d", "grad_l1", "grad_l1_room", "grad_l1_partial", "hessian_lp_partial", "ratio"};
  double s1 = 0.0, s2p = 0.0;
  std::vector<double> S1, S2, ratio;
  for (std::size_t k = 0; k < b.size(); ++k) {
    auto cn = column_norms(2, a, b[k], c[k], d[k], 1.0, p, order);
    s1 += cn.grad_q;
    s2p += cn.hess_p;
    S1.push_back(s1);
    S2.push_back(lp(s2p, p));
    ratio.push_back(s1 / (S2.back() + 2.0));
    r.add_row({static_cast<double>(k + 1), a, b[k], c[k], d[k], cn.grad_q, cn.room_grad_q, s1, S2.back(), ratio.back()});
  }
  Cloud B = geometry::quadrature_boundary(dom, order);
  double sup = 0.0;
  for (const auto& x : B.points) sup = std::max(sup, std::abs(u->value(x)));
  double growth = S1.back() / S1.front();
  double incr = (S2.back() - S2[S2.size() - 2]) / S2.back();
  r.constants["boundary_sup"] = sup;
  r.constants["grad_l1_growth"] = growth;
  r.constants["hessian_last_increment"] = incr;
  r.constants["ratio_growth"] = ratio.back() / ratio.front();
  r.constants["inequality_violated"] = violation(ratio, factor);
  r.check("boundary_sup_is_2", sup == 2.0, sup, 2.0);
  r.check("grad_l1_partial_sums_grow", growth >= factor, growth, factor);
  r.check("hessian_partial_sums_converge", incr <= tol, incr, tol, "relative last increment");
  return r;
}

AuditReport run_ex2(const json& P, const Resolution& res) {
  const int n = P["n"], K = P["k"], order = P["order"], border = P["boundary_order"];
  const double p = P["p"], rr = P["r"], dp = P["d_power"], tail = P["tail_fraction"];
  auto qf = P["q_factors"].get<std::vector<double>>();
  if (n != 3) throw std::invalid_argument("ex2: n must be 3");
  if (!(p > 1 && p < n) || !(rr >= 1) || !(dp > 1) || order < 2 || border < 1 || qf.empty())
    throw std::invalid_argument("ex2: invalid p, r, d_power, order or q_factors");
  auto b = sequence(P["b"], K, "ex2 b");
  const double qstar = rr * n / (n - 1);

  AuditReport r;
  r.experiment = "counterexample/ex2";
  r.params = P;
  r.resolution = res.to_json();
  r.resolution["order"] = order;
  r.resolution["boundary_order"] = border;
  r.columns = {"k", "b", "d", "hessian", "boundary_seminorm"};
  std::vector<double> qs;
  for (double f : qf) {
    qs.push_back(f * qstar);
    r.columns.push_back("lhs_q" + report::format_double(f));
    r.columns.push_back("ratio_q" + report::format_double(f));
  }
  std::vector<double> hess, vr;
  std::vector<std::vector<double>> lhs(qs.size()), ratio(qs.size());
  for (std::size_t k = 0; k < b.size(); ++k) {
    double d = std::pow(b[k], dp);
    geometry::RoomsParams rp{n, {b[k]}, {b[k]}, {b[k]}, {d}};
    Domain dom = geometry::rooms_corridors(rp);
    auto u = rooms_field(geometry::rooms_layout(rp), n);
    Cloud B = geometry::quadrature_boundary(dom, border);
    seminorms::PairDifference D(*u, B, 1, 0);
    auto g = seminorms::feasible_upper_gradient(D);
    double gr = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) gr += B.weights[i] * std::pow(g[i], rr);
    vr.push_back(lp(gr, rr));
    auto base = column_norms(n, b[k], b[k], b[k], d, 1.0, p, order);
    hess.push_back(lp(base.hess_p, p));
    std::vector<double> row{static_cast<double>(k + 1), b[k], d, hess.back(), vr.back()};
    for (std::size_t j = 0; j < qs.size(); ++j) {
      auto cn = column_norms(n, b[k], b[k], b[k], d, qs[j], p, order);
      lhs[j].push_back(lp(cn.grad_q, qs[j]));
      ratio[j].push_back(lhs[j].back() / (hess.back() + vr.back()));
      row.push_back(lhs[j].back());
      row.push_back(ratio[j].back());
    }
    r.add_row(std::move(row));
  }
  // trends are fitted where the hessian term is negligible against the boundary term
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < b.size(); ++k)
    if (hess[k] <= tail * vr[k]) idx.push_back(k);
  if (idx.size() < 3) throw std::invalid_argument("ex2: fewer than three terms in the tail; raise k or tail_fraction");
  auto pick = [&](const std::vector<double>& v) {
    std::vector<double> o;
    for (auto k : idx) o.push_back(v[k]);
    return o;
  };
  const auto bt = pick(b);
  r.constants["tail_first_k"] = idx.front() + 1;
  r.add_rate("boundary_seminorm_vs_b", fit(bt, pick(vr)));
  r.constants["q_star"] = qstar;
  r.constants["expected_slope_boundary_seminorm"] = (n - 1 - rr) / rr;
  json per_q = json::array();
  bool consistent = true;
  for (std::size_t j = 0; j < qs.size(); ++j) {
    auto fl = fit(b, lhs[j]), fr = fit(bt, pick(ratio[j]));
    r.add_rate("lhs_vs_b_q" + report::format_double(qf[j]), fl);
    bool diverges = fr.slope < 0;
    consistent = consistent && (diverges == (qs[j] > qstar));
    per_q.push_back({{"q", qs[j]}, {"q_over_q_star", qf[j]}, {"expected_slope_lhs", (n - qs[j]) / qs[j]},
                     {"ratio_trend", fr.to_json()}, {"expected_ratio_slope", (n - qs[j]) / qs[j] - (n - 1 - rr) / rr},
                     {"diverges", diverges}});
  }
  r.constants["per_q"] = per_q;
  r.check("exponent_bound_consistent", consistent, consistent ? 1.0 : 0.0, 1.0,
          "ratio diverges (negative log-log trend in b) exactly when q > q*");
  return r;
}

// ---------------------------------------------------------------- ex4

struct BumpGeometry {
  int n;
  Vec3 c, axis;
  double delta, eps;
};

// int over the ball of F(x), using axial symmetry: (radius, cos) Gauss grid times 2 pi.
template <class F>
double ball_integral(const BumpGeometry& g, int nodes, F f) {
  const auto& gl = gauss_legendre(nodes);
  std::vector<Vec3> pts;
  std::vector<double> w;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    double r = 0.5 * g.delta * (gl.nodes[i] + 1), wr = 0.5 * g.delta * gl.weights[i];
    for (std::size_t j = 0; j < gl.nodes.size(); ++j) {
      double ct = gl.nodes[j], st = std::sqrt(1 - ct * ct);
      pts.push_back(g.c + r * Vec3{st, 0, ct});
      w.push_back(2 * std::numbers::pi * r * r * wr * gl.weights[j]);
    }
  }
  return quad_sum(pts, w, f);
}

// int over {t0 < |x - pole| < t1} inside the ball of F(x), in polar
// coordinates about the pole; the ball is {cos > t / (2 delta)} there.
template <class F>
double pole_integral(const BumpGeometry& g, bool north, double t0, double t1, int nodes, F f) {
  const auto& gl = gauss_legendre(nodes);
  Vec3 pole = north ? g.c + g.delta * g.axis : g.c - g.delta * g.axis;
  double sgn = north ? -1.0 : 1.0;  // inward direction along the axis
  std::vector<Vec3> pts;
  std::vector<double> w;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    double t = t0 + 0.5 * (t1 - t0) * (gl.nodes[i] + 1), wt = 0.5 * (t1 - t0) * gl.weights[i];
    double clo = t / (2 * g.delta);
    for (std::size_t j = 0; j < gl.nodes.size(); ++j) {
      double ct = clo + 0.5 * (1 - clo) * (gl.nodes[j] + 1), wc = 0.5 * (1 - clo) * gl.weights[j];
      double st = std::sqrt(std::max(0.0, 1 - ct * ct));
      pts.push_back(pole + t * Vec3{st, 0, sgn * ct});
      w.push_back(2 * std::numbers::pi * t * t * wt * wc);
    }
  }
  return quad_sum(pts, w, f);
}

// int_ball |grad^j w|^s: the bump v over the ball, with the two pole
// neighbourhoods B_eps replaced by w (which vanishes on B_{eps/2}).
double bump_power(const BumpGeometry& g, const FieldFn& v, const FieldFn& w, int j, double s, int nodes) {
  auto fv = [&](const Vec3& x) { return std::pow(fields::grad_norm(v, x, j), s); };
  auto fw = [&](const Vec3& x) { return std::pow(fields::grad_norm(w, x, j), s); };
  double total = ball_integral(g, nodes, fv);
  for (bool north : {true, false}) {
    total -= pole_integral(g, north, 0.0, g.eps, nodes, fv);
    total += pole_integral(g, north, g.eps / 2, g.eps, nodes, fw);
  }
  return std::max(total, 0.0);
}

struct Ex4Setup {
  int n, m, h, i, smooth;
  double p, alpha, factor;
  std::vector<double> delta, eps;
  geometry::BallChainLayout layout;
  json domain_meta;
};

Ex4Setup ex4_setup(const json& P) {
  Ex4Setup s;
  s.n = P["n"];
  s.m = P["m"];
  s.h = P["h"];
  s.i = P["i"];
  s.smooth = P["smoothness"];
  s.p = P["p"];
  s.alpha = P["alpha"];
  s.factor = P["factor"];
  if (s.n != 3) throw std::invalid_argument("ex4: n must be 3");
  if (!(s.p > 1) || s.smooth < s.m) throw std::invalid_argument("ex4: need p > 1 and smoothness >= m");
  s.delta = sequence(P["delta"], P["k"], "ex4 delta", 2);
  if (!(s.delta.front() <= 0.5)) throw std::invalid_argument("ex4: need delta_1 <= 1/2");
  for (double d : s.delta) s.eps.push_back(std::pow(d, s.alpha));
  geometry::BallChainParams bp{s.n, s.delta, s.eps, P["corridor_scale"]};
  s.layout = geometry::ball_chain_layout(bp);
  s.domain_meta = geometry::ball_chain(bp).meta;
  return s;
}

struct BumpNorms {
  double grad_h_pow = 0.0, grad_m_pow = 0.0, sup_h = 0.0, trace_ratio = 0.0;
};

BumpNorms bump_norms(const Ex4Setup& s, std::size_t k, double q, int nodes) {
  BumpGeometry g{s.n, s.layout.centers[k], axis_vec(s.n), s.delta[k], s.eps[k]};
  fields::RadialPowerField v(s.n, g.c, g.delta, s.i);
  fields::PoleCutoffBump w(s.n, g.c, g.axis, g.delta, s.i, g.eps, s.smooth);
  BumpNorms out;
  if (std::isfinite(q)) out.grad_h_pow = bump_power(g, v, w, s.h, q, nodes);
  out.grad_m_pow = bump_power(g, v, w, s.m, s.p, nodes);
  // sup |grad^h w| over the axial grid (w = v away from the poles), and the
  // traces of grad^l w, l < i, on the sphere against their interior maxima
  const auto& gl = gauss_legendre(nodes);
  std::vector<Vec3> inner{g.c}, sphere;
  for (std::size_t a = 0; a < gl.nodes.size(); ++a) {
    double ct = gl.nodes[a], st = std::sqrt(1 - ct * ct);
    sphere.push_back(g.c + g.delta * Vec3{st, 0, ct});
    for (std::size_t b = 0; b < gl.nodes.size(); ++b) inner.push_back(g.c + 0.5 * g.delta * (gl.nodes[b] + 1) * Vec3{st, 0, ct});
  }
  for (const auto& x : inner) out.sup_h = std::max(out.sup_h, fields::grad_norm(w, x, s.h));
  for (int l = 0; l < s.i; ++l) {
    double in = 0.0, on = 0.0;
    for (const auto& x : inner) in = std::max(in, fields::grad_norm(w, x, l));
    for (const auto& x : sphere) on = std::max(on, fields::grad_norm(w, x, l));
    out.trace_ratio = std::max(out.trace_ratio, in > 0 ? on / in : 0.0);
  }
  return out;
}

AuditReport run_ex4(const std::string& name, const json& P, const Resolution& res) {
  Ex4Setup s = ex4_setup(P);
  const int n = s.n, m = s.m, h = s.h, i = s.i;
  const double p = s.p, alpha = s.alpha;
  const bool a_case = name == "ex4a";
  AuditReport r;
  r.experiment = "counterexample/" + name;
  r.params = P;
  r.resolution = res.to_json();
  r.params["domain"] = s.domain_meta;
  double q, sigma = 0.0;
  if (a_case) {
    if (!(p * (m - h) < n)) throw std::invalid_argument("ex4a: need p(m-h) < n");
    if (!(0 <= h && h <= i && 2 * i < m)) throw std::invalid_argument("ex4a: need 0 <= h <= i < m/2");
    double top = p * (i - m) + n;
    if (!(alpha > 1) || (top > 0 && !(alpha < (n - p * i) / top)))
      throw std::invalid_argument("ex4a: alpha outside (1, (n-pi)/(p(i-m)+n))");
    q = p * n / (n - p * (m - h));
  } else {
    sigma = P["sigma"];
    if (!(p * (m - h) > n && n > p * std::max(m - i, 2 * i - h))) throw std::invalid_argument("ex4b: need p(m-h) > n > p max{m-i, 2i-h}");
    if (!(0 <= h && h < i && 2 * i < m)) throw std::invalid_argument("ex4b: need 0 <= h < i < m/2");
    if (!(sigma > 0)) throw std::invalid_argument("ex4b: sigma must be positive");
    if (h > 0 && !(sigma < h)) throw std::invalid_argument("ex4b: need sigma < h");
    if (h == 0) r.warnings.push_back("the window 0 < sigma < h is empty for h = 0; sigma > 0 used");
    double e1 = h * p - sigma * p - p * i + alpha * (p * (i - m) + n), e2 = h * p - sigma * p + n - 2 * p * i;
    if (!(e1 > 0 && e2 > 0)) throw std::invalid_argument("ex4b: alpha or sigma leaves a nonpositive series exponent");
    q = INFINITY;
  }

  r.columns = {"k", "delta", "eps", "lambda", "lhs", "rhs", "ratio", "lhs_partial", "rhs_partial", "ratio_partial", "trace_ratio"};
  std::vector<double> lam, lhs, rhs, ratio, cum;
  double lhs_acc = 0.0, rhs_acc = 0.0, trace = 0.0;
  for (std::size_t k = 0; k < s.delta.size(); ++k) {
    BumpNorms b = bump_norms(s, k, q, res.nodes);
    double l = a_case ? std::pow(s.delta[k], h - n / q) : std::pow(s.delta[k], h - sigma);
    double L = a_case ? l * lp(b.grad_h_pow, q) : l * b.sup_h;
    double R = l * lp(b.grad_m_pow, p);
    lhs_acc = a_case ? lhs_acc + std::pow(L, q) : std::max(lhs_acc, L);
    rhs_acc += std::pow(R, p);
    double lc = a_case ? lp(lhs_acc, q) : lhs_acc, rc = lp(rhs_acc, p);
    lam.push_back(l);
    lhs.push_back(L);
    rhs.push_back(R);
    ratio.push_back(L / R);
    cum.push_back(lc / rc);
    trace = std::max(trace, b.trace_ratio);
    r.add_row({static_cast<double>(k + 1), s.delta[k], s.eps[k], l, L, R, L / R, lc, rc, lc / rc, b.trace_ratio});
  }
  double rhs_rate = (-p * i + alpha * (p * (i - m) + n)) / p;
  double lam_rate = a_case ? h - n / q : h - sigma;
  r.add_rate("rhs_vs_delta", fit(s.delta, rhs));
  r.add_rate("ratio_vs_delta", fit(s.delta, ratio));
  r.constants["q"] = std::isfinite(q) ? json(q) : json("inf");
  r.constants["expected_slope_rhs"] = lam_rate + rhs_rate;
  r.constants["expected_slope_ratio"] = (a_case ? 0.0 : lam_rate - h) - (lam_rate + rhs_rate);
  r.constants["ratio_growth"] = ratio.back() / ratio.front();
  r.constants["partial_ratio_growth"] = cum.back() / cum.front();
  r.constants["inequality_violated"] = violation(ratio, s.factor);
  r.constants["max_trace_ratio"] = trace;
  if (i > 0) r.check("traces_vanish", trace <= 1e-10, trace, 1e-10, "max over l < i of sup_sphere |grad^l w| / sup_ball |grad^l w|");
  return r;
}

}  // namespace

const std::vector<std::string>& names() {
  static const std::vector<std::string> v{"ex3", "ex1", "ex2", "ex4a", "ex4b"};
  return v;
}

json resolve_params(const std::string& name, const json& user) {
  json out = defaults(name);
  if (!user.is_object()) throw std::invalid_argument(name + ": parameters must be an object");
  for (const auto& [key, val] : user.items()) {
    if (!out.contains(key)) throw std::invalid_argument(name + ": unknown parameter '" + key + "'");
    const json& def = out[key];
    bool ok = val.is_null() ? def.is_null() || def.is_array()
                            : (def.is_number_integer() ? val.is_number_integer()
                                                       : def.is_number() ? val.is_number()
                                                                         : (val.is_array() || val.is_null()));
    if (ok && val.is_array())
      ok = std::all_of(val.begin(), val.end(), [](const json& x) { return x.is_number(); });
    if (!ok) throw std::invalid_argument(name + ": parameter '" + key + "' has the wrong type");
    out[key] = val.is_number() && def.is_number_float() ? json(val.get<double>()) : val;
  }
  return out;
}

bool violation(const std::vector<double>& ratios, double factor) {
  if (ratios.size() < 2) return false;
  for (std::size_t k = 1; k < ratios.size(); ++k)
    if (!(ratios[k] > ratios[k - 1])) return false;
  return ratios.back() >= factor * ratios.front();
}

AuditReport counterexample_run(const std::string& name, const json& params, const Resolution& res) {
  json P = resolve_params(name, params);
  if (name == "ex3") return run_ex3(P, res);
  if (name == "ex1") return run_ex1(P, res);
  if (name == "ex2") return run_ex2(P, res);
  return run_ex4(name, P, res);
}

}  // namespace sobolab::counterexamples
