#include "sobolab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/geometry.hpp>
#include <boost/geometry/index/rtree.hpp>

namespace sobolab::operators {

namespace bg = boost::geometry;
namespace bgi = boost::geometry::index;

namespace {

using BPoint = bg::model::point<double, 3, bg::cs::cartesian>;
using BValue = std::pair<BPoint, std::size_t>;

BPoint bp(const Vec3& p) { return BPoint(p.x, p.y, p.z); }

void check_gamma(double gamma, int n, const char* op) {
  if (!(gamma > 0 && gamma < n)) throw std::invalid_argument(std::string(op) + ": gamma must lie in (0, n)");
}

struct Dir {
  Vec3 theta;
  double w;
};

// Product rule on S^{n-1}: m equispaced angles (n = 2), or m azimuths times
// m/2 Gauss-Legendre nodes in cos(phi) (n = 3).
std::vector<Dir> sphere_rule(int n, int m) {
  std::vector<Dir> out;
  const double pi = std::numbers::pi;
  if (n == 2) {
    for (int i = 0; i < m; ++i) {
      double a = 2 * pi * (i + 0.5) / m;
      out.push_back({{std::cos(a), std::sin(a), 0}, 2 * pi / m});
    }
    return out;
  }
  int mz = std::max(2, m / 2);
  const auto& g = gauss_legendre(mz);
  for (int j = 0; j < mz; ++j) {
    double z = g.nodes[j], s = std::sqrt(1 - z * z);
    for (int i = 0; i < m; ++i) {
      double a = 2 * pi * (i + 0.5) / m;
      out.push_back({{s * std::cos(a), s * std::sin(a), z}, g.weights[j] * 2 * pi / m});
    }
  }
  return out;
}

// Subintervals of [a,b] refined geometrically (ratio 1/4) toward the graded ends.
std::vector<std::pair<double, double>> graded_panels(double a, double b, int levels, bool left, bool right) {
  std::vector<double> cuts{a, b};
  double L = b - a;
  double span = left && right ? L / 2 : L;
  for (int k = 1; k <= levels; ++k) {
    double d = span * std::pow(0.25, k);
    if (left) cuts.push_back(a + d);
    if (right) cuts.push_back(b - d);
  }
  if (left && right) cuts.push_back(a + L / 2);
  std::sort(cuts.begin(), cuts.end());
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    if (cuts[i + 1] > cuts[i]) out.push_back({cuts[i], cuts[i + 1]});
  return out;
}

double panel_integrate(const std::function<double(double)>& f, double a, double b, int levels, bool left, bool right, int nodes) {
  double s = 0.0;
  for (auto [lo, hi] : graded_panels(a, b, levels, left, right)) s += gauss_integrate(f, lo, hi, nodes);
  return s;
}

}  // namespace

PointFn as_point_fn(fields::FieldPtr f) {
  return [f = std::move(f)](const Vec3& p) { return f->value(p); };
}

struct CloudLookup::Impl {
  bgi::rtree<BValue, bgi::quadratic<16>> tree;
  std::vector<Vec3> points;
};

CloudLookup::CloudLookup(const Cloud& cloud) : impl_(std::make_shared<Impl>()) {
  if (cloud.points.empty()) throw std::invalid_argument("CloudLookup: empty cloud");
  std::vector<BValue> vals;
  vals.reserve(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) vals.emplace_back(bp(cloud.points[i]), i);
  impl_->tree = bgi::rtree<BValue, bgi::quadratic<16>>(vals.begin(), vals.end());
  impl_->points = cloud.points;
}

std::size_t CloudLookup::nearest(const Vec3& p) const {
  std::vector<BValue> res;
  impl_->tree.query(bgi::nearest(bp(p), 1), std::back_inserter(res));
  return res.front().second;
}

double CloudLookup::distance(const Vec3& p) const { return norm(impl_->points[nearest(p)] - p); }

PointFn CloudLookup::values(std::vector<double> v) const {
  if (v.size() != impl_->points.size()) throw std::invalid_argument("CloudLookup::values: size mismatch");
  return [self = *this, v = std::move(v)](const Vec3& p) { return v[self.nearest(p)]; };
}

double op_T(const Domain& d, const PointFn& g, const Vec3& x, std::size_t M, std::uint64_t seed) {
  if (M == 0) throw std::invalid_argument("op_T: direction count must be positive");
  Rng rng(seed);
  double s = 0.0;
  for (std::size_t i = 0; i < M; ++i) {
    auto h = d.ray_cast(x, rng.direction(d.dim()));
    if (h.bounded) s += std::abs(g(h.zeta));
  }
  return s / static_cast<double>(M) * sphere_area(d.dim());
}

double op_N(double gamma, const Cloud& b, const std::vector<double>& gv, const Vec3& x) {
  check_gamma(gamma, b.n, "op_N");
  if (gv.size() != b.size()) throw std::invalid_argument("op_N: value count does not match the cloud");
  double s = 0.0;
  for (std::size_t j = 0; j < b.size(); ++j) {
    double r = norm(x - b.points[j]);
    if (r < kGeomTol) throw std::invalid_argument("op_N: x lies on the boundary cloud");
    if (gv[j] != 0.0) s += b.weights[j] * gv[j] * std::pow(r, gamma - b.n);
  }
  return s;
}

double op_N(double gamma, const Cloud& b, const PointFn& g, const Vec3& x) {
  std::vector<double> gv(b.size());
  for (std::size_t j = 0; j < b.size(); ++j) gv[j] = g(b.points[j]);
  return op_N(gamma, b, gv, x);
}

double riesz_cutoff(const Cloud& v) {
  if (v.points.empty()) return 0.0;
  return std::pow(v.total() / static_cast<double>(v.size()), 1.0 / v.n);
}

double op_I(double gamma, const Cloud& v, const std::vector<double>& fv, double fx, const Vec3& x) {
  check_gamma(gamma, v.n, "op_I");
  if (fv.size() != v.size()) throw std::invalid_argument("op_I: value count does not match the cloud");
  double h = riesz_cutoff(v), s = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (fv[j] == 0.0) continue;
    double r = norm(x - v.points[j]);
    if (r < h) continue;
    s += v.weights[j] * fv[j] * std::pow(r, gamma - v.n);
  }
  return s + fx * sphere_area(v.n) * std::pow(h, gamma) / gamma;
}

double op_I(double gamma, const Cloud& v, const PointFn& f, const Vec3& x) {
  std::vector<double> fv(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) fv[j] = f(v.points[j]);
  return op_I(gamma, v, fv, f(x), x);
}

std::vector<double> t_on_cloud(const Domain& d, const PointFn& g, const Cloud& v, std::size_t M, std::uint64_t seed) {
  std::vector<double> out(v.size());
  Rng base(seed);
  parallel_for(v.size(), [&](std::size_t i) { out[i] = op_T(d, g, v.points[i], M, base.split(i).next_u64()); });
  return out;
}

double op_Q(double gamma, const Cloud& v, const std::vector<double>& tg, double tg_x, const Vec3& x) {
  if (!(gamma > 0 && gamma < v.n - 1)) throw std::invalid_argument("op_Q: gamma must lie in (0, n-1)");
  return op_I(gamma, v, tg, tg_x, x);
}

double op_Q(double gamma, const Domain& d, const Cloud& v, const PointFn& g, const Vec3& x, std::size_t M, std::uint64_t seed) {
  auto tg = t_on_cloud(d, g, v, M, seed);
  double tx = op_T(d, g, x, M, Rng(seed).split(v.size()).next_u64());
  return op_Q(gamma, v, tg, tx, x);
}

double riesz_constant(int n, double sigma, double gamma) {
  if (!(sigma > 0 && gamma > 0 && sigma + gamma < n)) throw std::invalid_argument("riesz_constant: need sigma, gamma > 0, sigma + gamma < n");
  double h = n / 2.0;
  return std::pow(std::numbers::pi, h) * std::tgamma(sigma / 2) * std::tgamma(gamma / 2) * std::tgamma(h - (sigma + gamma) / 2) /
         (std::tgamma(h - sigma / 2) * std::tgamma(h - gamma / 2) * std::tgamma((sigma + gamma) / 2));
}

namespace {

class RieszQuadrature {
 public:
  RieszQuadrature(const fields::FieldFn& f, const Domain& s, const RieszOptions& o)
      : f_(f), s_(s), o_(o), indicator_(dynamic_cast<const fields::IndicatorField*>(&f) != nullptr),
        inner_(sphere_rule(s.dim(), o.inner_directions)), outer_(sphere_rule(s.dim(), o.outer_directions)) {}

  // int f(y + t theta) t^{e-1} dt dtheta over the support
  double potential(const Vec3& y, double e) const {
    double total = 0.0;
    for (const auto& dir : inner_) {
      double acc = 0.0;
      for (auto iv : s_.line_intervals(y, dir.theta)) {
        double lo = std::max(iv.lo, 0.0), hi = iv.hi;
        if (!(hi > lo)) continue;
        if (indicator_) {
          acc += (std::pow(hi, e) - std::pow(lo, e)) / e;
        } else {
          auto fn = [&](double u) { return f_.value(y + std::pow(u, 1.0 / e) * dir.theta); };
          acc += gauss_integrate(fn, std::pow(lo, e), std::pow(hi, e), 4 * o_.panel_nodes) / e;
        }
      }
      total += dir.w * acc;
    }
    return total;
  }

  // int |x-y|^{sigma-n} I_gamma f(y) dy over |y - x| < R
  double iterated(const Vec3& x, double sigma, double gamma, double R) const {
    double total = 0.0;
    for (const auto& dir : outer_) {
      std::vector<double> cuts{0.0, R};
      for (auto iv : s_.line_intervals(x, dir.theta))
        for (double t : {iv.lo, iv.hi})
          if (t > 1e-12 && t < R) cuts.push_back(t);
      std::sort(cuts.begin(), cuts.end());
      double acc = 0.0;
      for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        double a = cuts[k], b = cuts[k + 1];
        bool right_crossing = k + 2 < cuts.size();
        if (a == 0.0) {
          auto fn = [&](double s) { return potential(x + std::pow(s, 1.0 / sigma) * dir.theta, gamma); };
          acc += panel_integrate(fn, 0.0, std::pow(b, sigma), o_.grading_levels, false, right_crossing, o_.panel_nodes) / sigma;
        } else {
          auto fn = [&](double t) { return std::pow(t, sigma - 1) * potential(x + t * dir.theta, gamma); };
          acc += panel_integrate(fn, a, b, o_.grading_levels, true, right_crossing, o_.panel_nodes);
        }
      }
      total += dir.w * acc;
    }
    return total;
  }

 private:
  const fields::FieldFn& f_;
  const Domain& s_;
  RieszOptions o_;
  bool indicator_;
  std::vector<Dir> inner_, outer_;
};

}  // namespace

RieszCheck riesz_composition_check(double sigma, double gamma, const fields::FieldFn& f, const Domain& support,
                                   const std::vector<Vec3>& probes, const RieszOptions& opt) {
  const int n = support.dim();
  if (!(sigma > 0 && gamma > 0 && sigma + gamma < n)) throw std::invalid_argument("riesz_composition_check: need sigma, gamma > 0, sigma + gamma < n");
  if (!support.bounded()) throw std::invalid_argument("riesz_composition_check: support must be bounded");
  RieszCheck out;
  out.closed_form = riesz_constant(n, sigma, gamma);
  auto qc = geometry::quadrature_volume(support, 24);
  double mass = 0.0;
  for (std::size_t i = 0; i < qc.size(); ++i) mass += qc.weights[i] * f.value(qc.points[i]);
  double R = opt.box_radius > 0 ? opt.box_radius : 16.0 * support.diameter();
  RieszQuadrature q(f, support, opt);
  std::vector<double> lhs(probes.size()), rhs(probes.size()), tail(probes.size());
  parallel_for(probes.size(), [&](std::size_t i) {
    rhs[i] = q.potential(probes[i], sigma + gamma);
    double t = mass * sphere_area(n) * std::pow(R, sigma + gamma - n) / (n - sigma - gamma);
    lhs[i] = q.iterated(probes[i], sigma, gamma, R) + t;
    tail[i] = lhs[i] != 0.0 ? std::abs(t / lhs[i]) : 0.0;
  });
  for (std::size_t i = 0; i < probes.size(); ++i) {
    out.max_tail_fraction = std::max(out.max_tail_fraction, tail[i]);
    if (rhs[i] == 0.0) continue;
    out.probes.push_back(probes[i]);
    out.lhs.push_back(lhs[i]);
    out.rhs.push_back(rhs[i]);
    out.ratio.push_back(lhs[i] / rhs[i]);
  }
  if (out.max_tail_fraction > 0.1)
    throw std::runtime_error("riesz_composition_check: truncated tail exceeds 10% of the integral; enlarge box_radius");
  if (!out.ratio.empty()) {
    double m = std::accumulate(out.ratio.begin(), out.ratio.end(), 0.0) / out.ratio.size(), v = 0.0;
    for (double r : out.ratio) v += (r - m) * (r - m);
    out.mean = m;
    out.cv = out.ratio.size() > 1 ? std::sqrt(v / (out.ratio.size() - 1)) / std::abs(m) : 0.0;
  }
  return out;
}

RieszCheck riesz_composition_check(double sigma, double gamma, const fields::FieldFn& f, const Domain& support,
                                   std::size_t probes, std::uint64_t seed, const RieszOptions& opt) {
  const auto& b = support.bounds();
  Vec3 c = 0.5 * (b.lo + b.hi);
  Rng rng(seed);
  std::vector<Vec3> pts;
  for (std::size_t tries = 0; pts.size() < probes; ++tries) {
    if (tries > 1000 * probes + 1000) throw std::runtime_error("riesz_composition_check: cannot place probes in the support");
    Vec3 p = c;
    for (int i = 0; i < support.dim(); ++i) p[i] += 0.25 * rng.uniform(-1, 1) * (b.hi[i] - b.lo[i]);
    if (support.contains(p)) pts.push_back(p);
  }
  return riesz_composition_check(sigma, gamma, f, support, pts, opt);
}

ProjectionReport projection_bound_check(const Domain& d, const Cloud& b, const PointFn& g, const std::vector<Vec3>& probes,
                                        std::size_t M, std::uint64_t seed, double slack) {
  ProjectionReport r;
  r.slack = slack;
  std::vector<double> ag(b.size());
  for (std::size_t j = 0; j < b.size(); ++j) ag[j] = std::abs(g(b.points[j]));
  const double scale = std::pow(2.0, d.dim());
  r.t.resize(probes.size());
  r.n.resize(probes.size());
  r.ratio.resize(probes.size());
  Rng base(seed);
  parallel_for(probes.size(), [&](std::size_t i) {
    r.t[i] = op_T(d, g, probes[i], M, base.split(i).next_u64());
    r.n[i] = op_N(1.0, b, ag, probes[i]);
    double den = scale * r.n[i];
    r.ratio[i] = den > 0 ? r.t[i] / den : (r.t[i] > 0 ? INFINITY : 0.0);
  });
  for (double q : r.ratio) r.max_ratio = std::max(r.max_ratio, q);
  return r;
}

WeakTypeFit weak_type_constant(double gamma, double alpha, const Cloud& b, const std::vector<double>& g, const Cloud& mu) {
  check_gamma(gamma, b.n, "weak_type_constant");
  WeakTypeFit fit;
  for (std::size_t j = 0; j < b.size(); ++j) fit.g_l1 += b.weights[j] * std::abs(g[j]);
  if (fit.g_l1 == 0.0) return fit;
  CloudLookup look(b);
  double h = b.mean_spacing();
  std::vector<std::pair<double, double>> vw;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (look.distance(mu.points[i]) < h) {
      ++fit.dropped;
      continue;
    }
    vw.push_back({op_N(gamma, b, g, mu.points[i]), mu.weights[i]});
  }
  fit.used = vw.size();
  std::sort(vw.begin(), vw.end(), [](const auto& a, const auto& c) { return a.first > c.first; });
  double s = 0.0, e = (b.n - gamma) / alpha, best = 0.0;
  for (std::size_t i = 0; i < vw.size(); ++i) {
    s += vw[i].second;
    if (i + 1 < vw.size() && vw[i + 1].first == vw[i].first) continue;
    best = std::max(best, std::abs(vw[i].first) * std::pow(s, e));
  }
  fit.constant = best / fit.g_l1;
  return fit;
}

std::vector<Vec3> interior_probes(const Domain& d, std::size_t count, std::uint64_t seed, double clearance) {
  if (!d.bounded()) throw std::invalid_argument("interior_probes: domain is unbounded");
  const auto& b = d.bounds();
  Rng rng(seed, 7);
  std::vector<Vec3> out;
  for (std::size_t tries = 0; out.size() < count; ++tries) {
    if (tries > 200000 + 2000 * count) throw std::runtime_error("interior_probes: too few interior points with the requested clearance");
    Vec3 p{};
    for (int i = 0; i < d.dim(); ++i) p[i] = rng.uniform(b.lo[i], b.hi[i]);
    if (d.contains(p) && d.boundary_distance_estimate(p) >= clearance) out.push_back(p);
  }
  return out;
}

}  // namespace sobolab::operators
