#include "sobolab/geometry.hpp"

#include <algorithm>
#include <limits>

namespace sobolab::geometry {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

json vec_json(const Vec3& v, int n) {
  json a = json::array();
  for (int i = 0; i < n; ++i) a.push_back(v[i]);
  return a;
}

Vec3 perp2(const Vec3& a) { return {-a.y, a.x, 0.0}; }

void frame(int n, const Vec3& a, Vec3& e1, Vec3& e2) {
  if (n == 2) {
    e1 = perp2(a);
    e2 = {};
  } else {
    orthonormal_complement(a, e1, e2);
  }
}

// Solution set of A t^2 + B t + C < 0.
IntervalSet quadratic_negative(double A, double B, double C, double scale) {
  const double eps = 1e-14 * std::max(scale, 1e-300);
  if (std::abs(A) <= eps) {
    if (std::abs(B) <= eps) return C < 0.0 ? IntervalSet{{-kInf, kInf}} : IntervalSet{};
    double t = -C / B;
    return B > 0 ? IntervalSet{{-kInf, t}} : IntervalSet{{t, kInf}};
  }
  double disc = B * B - 4 * A * C;
  if (disc <= 0.0) return A < 0 ? IntervalSet{{-kInf, kInf}} : IntervalSet{};
  double sq = std::sqrt(disc);
  double q = -0.5 * (B + std::copysign(sq, B));
  double t1 = q / A, t2 = (q != 0.0) ? C / q : -t1;
  if (t1 > t2) std::swap(t1, t2);
  if (A > 0) return {{t1, t2}};
  return {{-kInf, t1}, {t2, kInf}};
}

// Parameter range where lo < x_i + t d_i < hi.
bool slab(double x, double d, double lo, double hi, double& tmin, double& tmax) {
  if (d == 0.0) return x > lo && x < hi;
  double t0 = (lo - x) / d, t1 = (hi - x) / d;
  if (t0 > t1) std::swap(t0, t1);
  tmin = std::max(tmin, t0);
  tmax = std::min(tmax, t1);
  return tmax > tmin;
}

bool box_contains(const Aabb& b, const Vec3& p, int n, double pad) {
  if (!b.bounded) return true;
  for (int i = 0; i < n; ++i)
    if (p[i] < b.lo[i] - pad || p[i] > b.hi[i] + pad) return false;
  return true;
}

bool box_hits_line(const Aabb& b, const Vec3& x, const Vec3& d, int n) {
  if (!b.bounded) return true;
  double tmin = -kInf, tmax = kInf;
  for (int i = 0; i < n; ++i)
    if (!slab(x[i], d[i], b.lo[i] - kGeomTol, b.hi[i] + kGeomTol, tmin, tmax)) return false;
  return true;
}

Aabb merge(const Aabb& a, const Aabb& b) {
  if (!a.bounded || !b.bounded) return {{}, {}, false};
  Aabb r;
  for (int i = 0; i < 3; ++i) {
    r.lo[i] = std::min(a.lo[i], b.lo[i]);
    r.hi[i] = std::max(a.hi[i], b.hi[i]);
  }
  return r;
}

Aabb overlap(const Aabb& a, const Aabb& b) {
  if (!a.bounded) return b;
  if (!b.bounded) return a;
  Aabb r;
  for (int i = 0; i < 3; ++i) {
    r.lo[i] = std::max(a.lo[i], b.lo[i]);
    r.hi[i] = std::min(a.hi[i], b.hi[i]);
  }
  return r;
}

// Composite breakpoints on [0,1] refined geometrically toward f.
std::vector<double> graded_breaks(double f, double min_frac) {
  std::vector<double> br{0.0, 1.0};
  if (f > 0.0) {
    for (double w = f; w > min_frac; w *= 0.5) br.push_back(f - w);
    br.push_back(f);
  }
  if (f < 1.0) {
    for (double w = 1.0 - f; w > min_frac; w *= 0.5) br.push_back(f + w);
    br.push_back(f);
  }
  std::sort(br.begin(), br.end());
  br.erase(std::unique(br.begin(), br.end(), [](double a, double b) { return b - a < 1e-15; }), br.end());
  return br;
}

// Nodes and weights of a composite Gauss rule on [0,1].
void composite_rule(const std::vector<double>& br, int order, std::vector<double>& t, std::vector<double>& w) {
  const auto& g = gauss_legendre(order);
  for (std::size_t i = 0; i + 1 < br.size(); ++i) {
    double a = br[i], b = br[i + 1], h = 0.5 * (b - a);
    for (std::size_t k = 0; k < g.nodes.size(); ++k) {
      t.push_back(a + h * (1 + g.nodes[k]));
      w.push_back(h * g.weights[k]);
    }
  }
}

void gauss01(int order, double a, double b, std::vector<double>& t, std::vector<double>& w) {
  t.clear();
  w.clear();
  const auto& g = gauss_legendre(order);
  double h = 0.5 * (b - a);
  for (std::size_t k = 0; k < g.nodes.size(); ++k) {
    t.push_back(a + h * (1 + g.nodes[k]));
    w.push_back(h * g.weights[k]);
  }
}

}  // namespace

IntervalSet unite(const IntervalSet& a, const IntervalSet& b, double tol) {
  IntervalSet all = a;
  all.insert(all.end(), b.begin(), b.end());
  std::sort(all.begin(), all.end(), [](const Interval& p, const Interval& q) { return p.lo < q.lo; });
  IntervalSet out;
  for (const auto& iv : all) {
    if (!out.empty() && iv.lo <= out.back().hi + tol)
      out.back().hi = std::max(out.back().hi, iv.hi);
    else
      out.push_back(iv);
  }
  return out;
}

IntervalSet intersect(const IntervalSet& a, const IntervalSet& b, double tol) {
  IntervalSet out;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    double lo = std::max(a[i].lo, b[j].lo), hi = std::min(a[i].hi, b[j].hi);
    if (hi - lo > tol) out.push_back({lo, hi});
    if (a[i].hi < b[j].hi) ++i; else ++j;
  }
  return out;
}

IntervalSet subtract(const IntervalSet& a, const IntervalSet& b, double tol) {
  IntervalSet comp;
  double start = -kInf;
  for (const auto& iv : b) {
    if (iv.lo > start) comp.push_back({start, iv.lo});
    start = std::max(start, iv.hi);
  }
  if (start < kInf) comp.push_back({start, kInf});
  return intersect(a, comp, tol);
}

// ---------------------------------------------------------------- patches

SpherePatch::SpherePatch(int n, Vec3 center, double radius) : n_(n), c_(center), r_(radius) {
  if (!(radius > 0)) throw std::invalid_argument("SpherePatch: radius must be positive");
}

double SpherePatch::area() const { return sphere_area(n_) * std::pow(r_, n_ - 1); }

void SpherePatch::sample(Rng& rng, std::size_t count, std::vector<SurfaceSample>& out) const {
  double w = area() / static_cast<double>(count);
  for (std::size_t i = 0; i < count; ++i) {
    Vec3 d = rng.direction(n_);
    out.push_back({c_ + r_ * d, d, w});
  }
}

void SpherePatch::quadrature(int order, std::vector<SurfaceSample>& out) const {
  int m = std::max(8, 2 * order);
  double dphi = 2 * std::numbers::pi / m;
  if (n_ == 2) {
    for (int i = 0; i < m; ++i) {
      Vec3 d{std::cos(i * dphi), std::sin(i * dphi), 0.0};
      out.push_back({c_ + r_ * d, d, r_ * dphi});
    }
    return;
  }
  const auto& g = gauss_legendre(std::max(order, 2));
  for (std::size_t k = 0; k < g.nodes.size(); ++k) {
    double z = g.nodes[k], s = std::sqrt(std::max(0.0, 1 - z * z));
    for (int i = 0; i < m; ++i) {
      Vec3 d{s * std::cos(i * dphi), s * std::sin(i * dphi), z};
      out.push_back({c_ + r_ * d, d, r_ * r_ * g.weights[k] * dphi});
    }
  }
}

json SpherePatch::to_json() const { return {{"patch", "sphere"}, {"center", vec_json(c_, n_)}, {"radius", r_}}; }

RectPatch::RectPatch(int n, Vec3 origin, Vec3 e1, Vec3 e2, Vec3 normal)
    : n_(n), o_(origin), e1_(e1), e2_(n == 2 ? Vec3{} : e2), nrm_(normalized(normal)) {}

RectPatch& RectPatch::graded(double fu, double fv, double min_frac) {
  graded_ = true;
  fu_ = std::clamp(fu, 0.0, 1.0);
  fv_ = std::clamp(fv, 0.0, 1.0);
  min_frac_ = min_frac;
  return *this;
}

double RectPatch::area() const { return n_ == 2 ? norm(e1_) : norm(cross(e1_, e2_)); }

void RectPatch::sample(Rng& rng, std::size_t count, std::vector<SurfaceSample>& out) const {
  double w = area() / static_cast<double>(count);
  for (std::size_t i = 0; i < count; ++i) {
    double u = rng.uniform(), v = n_ == 2 ? 0.0 : rng.uniform();
    out.push_back({o_ + u * e1_ + v * e2_, nrm_, w});
  }
}

void RectPatch::quadrature(int order, std::vector<SurfaceSample>& out) const {
  std::vector<double> tu, wu, tv, wv;
  composite_rule(graded_ ? graded_breaks(fu_, min_frac_) : std::vector<double>{0.0, 1.0}, order, tu, wu);
  if (n_ == 2) {
    tv = {0.0};
    wv = {1.0};
  } else {
    composite_rule(graded_ ? graded_breaks(fv_, min_frac_) : std::vector<double>{0.0, 1.0}, order, tv, wv);
  }
  double a = area();
  for (std::size_t i = 0; i < tu.size(); ++i)
    for (std::size_t j = 0; j < tv.size(); ++j) out.push_back({o_ + tu[i] * e1_ + tv[j] * e2_, nrm_, a * wu[i] * wv[j]});
}

json RectPatch::to_json() const {
  return {{"patch", "rect"}, {"origin", vec_json(o_, n_)}, {"e1", vec_json(e1_, n_)}, {"e2", vec_json(e2_, n_)},
          {"normal", vec_json(nrm_, n_)}};
}

AnnulusPatch::AnnulusPatch(int n, Vec3 center, Vec3 normal, double r_in, double r_out)
    : n_(n), c_(center), nrm_(normalized(normal)), r_in_(r_in), r_out_(r_out) {
  if (!(r_out > r_in && r_in >= 0)) throw std::invalid_argument("AnnulusPatch: need 0 <= r_in < r_out");
  frame(n, nrm_, e1_, e2_);
}

double AnnulusPatch::area() const {
  return n_ == 2 ? 2 * (r_out_ - r_in_) : std::numbers::pi * (r_out_ * r_out_ - r_in_ * r_in_);
}

void AnnulusPatch::sample(Rng& rng, std::size_t count, std::vector<SurfaceSample>& out) const {
  double w = area() / static_cast<double>(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (n_ == 2) {
      double side = rng.uniform() < 0.5 ? -1.0 : 1.0;
      double rho = rng.uniform(r_in_, r_out_);
      out.push_back({c_ + side * rho * e1_, nrm_, w});
    } else {
      double rho = std::sqrt(r_in_ * r_in_ + rng.uniform() * (r_out_ * r_out_ - r_in_ * r_in_));
      double phi = 2 * std::numbers::pi * rng.uniform();
      out.push_back({c_ + rho * (std::cos(phi) * e1_ + std::sin(phi) * e2_), nrm_, w});
    }
  }
}

void AnnulusPatch::quadrature(int order, std::vector<SurfaceSample>& out) const {
  std::vector<double> t, w;
  gauss01(order, r_in_, r_out_, t, w);
  if (n_ == 2) {
    for (double side : {-1.0, 1.0})
      for (std::size_t i = 0; i < t.size(); ++i) out.push_back({c_ + side * t[i] * e1_, nrm_, w[i]});
    return;
  }
  int m = std::max(8, 2 * order);
  double dphi = 2 * std::numbers::pi / m;
  for (std::size_t i = 0; i < t.size(); ++i)
    for (int k = 0; k < m; ++k)
      out.push_back({c_ + t[i] * (std::cos(k * dphi) * e1_ + std::sin(k * dphi) * e2_), nrm_, w[i] * t[i] * dphi});
}

json AnnulusPatch::to_json() const {
  return {{"patch", "annulus"}, {"center", vec_json(c_, n_)}, {"normal", vec_json(nrm_, n_)},
          {"r_in", r_in_}, {"r_out", r_out_}};
}

LateralPatch::LateralPatch(const Frustum& f)
    : n_(f.dim()), o_(f.origin()), a_(f.axis()), e1_(f.e1()), e2_(f.e2()), len_(f.length()), r0_(f.r0()), r1_(f.r1()) {}

int LateralPatch::dim() const { return n_; }

double LateralPatch::area() const {
  double k = (r1_ - r0_) / len_, s = std::sqrt(1 + k * k);
  return n_ == 2 ? 2 * len_ * s : std::numbers::pi * (r0_ + r1_) * len_ * s;
}

SurfaceSample LateralPatch::at(double t, double phi_or_side) const {
  double k = (r1_ - r0_) / len_, R = r0_ + k * t;
  Vec3 radial = n_ == 2 ? phi_or_side * e1_ : std::cos(phi_or_side) * e1_ + std::sin(phi_or_side) * e2_;
  return {o_ + t * a_ + R * radial, normalized(radial - k * a_), 0.0};
}

void LateralPatch::sample(Rng& rng, std::size_t count, std::vector<SurfaceSample>& out) const {
  double w = area() / static_cast<double>(count), k = (r1_ - r0_) / len_;
  for (std::size_t i = 0; i < count; ++i) {
    double u = rng.uniform(), t;
    if (n_ == 2 || std::abs(k) < 1e-14) {
      t = u * len_;
    } else {
      // invert r0 t + k t^2/2 = u (r0 + r1) len / 2
      double c = u * (r0_ + r1_) * len_ / 2;
      t = 2 * c / (r0_ + std::sqrt(r0_ * r0_ + 2 * k * c));
    }
    double p = n_ == 2 ? (rng.uniform() < 0.5 ? -1.0 : 1.0) : 2 * std::numbers::pi * rng.uniform();
    SurfaceSample s = at(t, p);
    s.weight = w;
    out.push_back(s);
  }
}

void LateralPatch::quadrature(int order, std::vector<SurfaceSample>& out) const {
  std::vector<double> t, w;
  gauss01(order, 0.0, len_, t, w);
  double k = (r1_ - r0_) / len_, s = std::sqrt(1 + k * k);
  if (n_ == 2) {
    for (double side : {-1.0, 1.0})
      for (std::size_t i = 0; i < t.size(); ++i) {
        SurfaceSample q = at(t[i], side);
        q.weight = w[i] * s;
        out.push_back(q);
      }
    return;
  }
  int m = std::max(8, 2 * order);
  double dphi = 2 * std::numbers::pi / m;
  for (std::size_t i = 0; i < t.size(); ++i)
    for (int j = 0; j < m; ++j) {
      SurfaceSample q = at(t[i], j * dphi);
      q.weight = w[i] * s * (r0_ + k * t[i]) * dphi;
      out.push_back(q);
    }
}

json LateralPatch::to_json() const {
  return {{"patch", "lateral"}, {"origin", vec_json(o_, n_)}, {"axis", vec_json(a_, n_)}, {"length", len_},
          {"r0", r0_}, {"r1", r1_}};
}

// ---------------------------------------------------------------- primitives

Ball::Ball(int n, Vec3 center, double radius) : n_(n), c_(center), r_(radius) {
  if (!(radius > 0)) throw std::invalid_argument("Ball: radius must be positive");
}

bool Ball::contains(const Vec3& p) const {
  Vec3 d = p - c_;
  return dot(d, d) < r_ * r_;
}

IntervalSet Ball::line_intervals(const Vec3& x, const Vec3& dir) const {
  Vec3 d = x - c_;
  double A = dot(dir, dir);
  return quadratic_negative(A, 2 * dot(dir, d), dot(d, d) - r_ * r_, A);
}

Aabb Ball::bounds() const {
  Vec3 e{r_, r_, n_ == 3 ? r_ : 0.0};
  return {c_ - e, c_ + e, true};
}

double Ball::volume() const { return unit_ball_volume(n_) * std::pow(r_, n_); }

std::vector<PatchPtr> Ball::surface() const { return {std::make_shared<SpherePatch>(n_, c_, r_)}; }

void Ball::volume_quadrature(int order, std::vector<Vec3>& pts, std::vector<double>& w) const {
  std::vector<double> tr, wr;
  gauss01(order, 0.0, r_, tr, wr);
  std::vector<SurfaceSample> dirs;
  SpherePatch(n_, {}, 1.0).quadrature(order, dirs);
  for (std::size_t i = 0; i < tr.size(); ++i)
    for (const auto& d : dirs) {
      pts.push_back(c_ + tr[i] * d.normal);
      w.push_back(wr[i] * std::pow(tr[i], n_ - 1) * d.weight);
    }
}

json Ball::to_json() const { return {{"primitive", "ball"}, {"center", vec_json(c_, n_)}, {"radius", r_}}; }

Box::Box(int n, Vec3 lo, Vec3 hi) : n_(n), lo_(lo), hi_(hi) {
  for (int i = 0; i < n; ++i)
    if (!(hi[i] > lo[i])) throw std::invalid_argument("Box: need lo < hi in every coordinate");
  if (n == 2) lo_.z = hi_.z = 0.0;
}

bool Box::contains(const Vec3& p) const {
  for (int i = 0; i < n_; ++i)
    if (!(p[i] > lo_[i] && p[i] < hi_[i])) return false;
  return true;
}

IntervalSet Box::line_intervals(const Vec3& x, const Vec3& dir) const {
  double tmin = -kInf, tmax = kInf;
  for (int i = 0; i < n_; ++i)
    if (!slab(x[i], dir[i], lo_[i], hi_[i], tmin, tmax)) return {};
  return {{tmin, tmax}};
}

Aabb Box::bounds() const { return {lo_, hi_, true}; }

double Box::volume() const {
  double v = 1.0;
  for (int i = 0; i < n_; ++i) v *= hi_[i] - lo_[i];
  return v;
}

std::vector<PatchPtr> Box::surface() const {
  std::vector<PatchPtr> out;
  Vec3 ext = hi_ - lo_;
  for (int i = 0; i < n_; ++i) {
    int j = (i + 1) % n_, k = (i + 2) % n_;
    Vec3 ej{}, ek{}, nrm{};
    ej[j] = ext[j];
    if (n_ == 3) ek[k] = ext[k];
    for (int side = 0; side < 2; ++side) {
      Vec3 o = lo_;
      if (side) o[i] = hi_[i];
      nrm = {};
      nrm[i] = side ? 1.0 : -1.0;
      out.push_back(std::make_shared<RectPatch>(n_, o, ej, ek, nrm));
    }
  }
  return out;
}

void Box::volume_quadrature(int order, std::vector<Vec3>& pts, std::vector<double>& w) const {
  std::vector<double> t[3], wt[3];
  for (int i = 0; i < 3; ++i) {
    if (i < n_) {
      gauss01(order, lo_[i], hi_[i], t[i], wt[i]);
    } else {
      t[i] = {0.0};
      wt[i] = {1.0};
    }
  }
  for (std::size_t a = 0; a < t[0].size(); ++a)
    for (std::size_t b = 0; b < t[1].size(); ++b)
      for (std::size_t c = 0; c < t[2].size(); ++c) {
        pts.push_back({t[0][a], t[1][b], t[2][c]});
        w.push_back(wt[0][a] * wt[1][b] * wt[2][c]);
      }
}

double Box::min_feature() const {
  double m = kInf;
  for (int i = 0; i < n_; ++i) m = std::min(m, hi_[i] - lo_[i]);
  return m;
}

json Box::to_json() const { return {{"primitive", "box"}, {"lo", vec_json(lo_, n_)}, {"hi", vec_json(hi_, n_)}}; }

HalfSpace::HalfSpace(int n, Vec3 point, Vec3 normal) : n_(n), p_(point), nrm_(normalized(normal)) {}

bool HalfSpace::contains(const Vec3& p) const { return dot(p - p_, nrm_) > 0.0; }

IntervalSet HalfSpace::line_intervals(const Vec3& x, const Vec3& dir) const {
  double s = dot(x - p_, nrm_), ds = dot(dir, nrm_);
  if (ds == 0.0) return s > 0 ? IntervalSet{{-kInf, kInf}} : IntervalSet{};
  double t0 = -s / ds;
  return ds > 0 ? IntervalSet{{t0, kInf}} : IntervalSet{{-kInf, t0}};
}

Aabb HalfSpace::bounds() const { return {{}, {}, false}; }

void HalfSpace::volume_quadrature(int, std::vector<Vec3>&, std::vector<double>&) const {
  throw std::logic_error("HalfSpace: no volume quadrature for an unbounded primitive");
}

json HalfSpace::to_json() const {
  return {{"primitive", "halfspace"}, {"point", vec_json(p_, n_)}, {"normal", vec_json(nrm_, n_)}};
}

Frustum::Frustum(int n, Vec3 origin, Vec3 axis, double len, double r0, double r1)
    : n_(n), o_(origin), a_(normalized(axis)), len_(len), r0_(r0), r1_(r1) {
  if (!(len > 0) || r0 < 0 || r1 < 0 || !(r0 + r1 > 0)) throw std::invalid_argument("Frustum: invalid size");
  frame(n, a_, e1_, e2_);
}

bool Frustum::contains(const Vec3& p) const {
  Vec3 d = p - o_;
  double u = dot(d, a_);
  if (!(u > 0 && u < len_)) return false;
  Vec3 w = d - u * a_;
  double R = radius_at(u);
  return dot(w, w) < R * R;
}

IntervalSet Frustum::line_intervals(const Vec3& x, const Vec3& dir) const {
  Vec3 d = x - o_;
  double u0 = dot(d, a_), du = dot(dir, a_);
  Vec3 w0 = d - u0 * a_, dw = dir - du * a_;
  double k = (r1_ - r0_) / len_, R0 = r0_ + k * u0;
  double A = dot(dw, dw) - k * k * du * du;
  double B = 2 * (dot(w0, dw) - R0 * k * du);
  double C = dot(w0, w0) - R0 * R0;
  IntervalSet q = quadratic_negative(A, B, C, dot(dir, dir));
  double tmin = -kInf, tmax = kInf;
  if (!slab(u0, du, 0.0, len_, tmin, tmax)) return {};
  return intersect(q, {{tmin, tmax}}, 0.0);
}

Aabb Frustum::bounds() const {
  double r = std::max(r0_, r1_);
  Vec3 p = o_, q = o_ + len_ * a_;
  Aabb b;
  for (int i = 0; i < 3; ++i) {
    double pad = (i < n_) ? r : 0.0;
    b.lo[i] = std::min(p[i], q[i]) - pad;
    b.hi[i] = std::max(p[i], q[i]) + pad;
  }
  return b;
}

double Frustum::volume() const {
  if (n_ == 2) return len_ * (r0_ + r1_);
  return std::numbers::pi * len_ * (r0_ * r0_ + r0_ * r1_ + r1_ * r1_) / 3.0;
}

std::vector<PatchPtr> Frustum::surface() const {
  std::vector<PatchPtr> out{std::make_shared<LateralPatch>(*this)};
  if (r0_ > 0) out.push_back(std::make_shared<AnnulusPatch>(n_, o_, -a_, 0.0, r0_));
  if (r1_ > 0) out.push_back(std::make_shared<AnnulusPatch>(n_, o_ + len_ * a_, a_, 0.0, r1_));
  return out;
}

void Frustum::volume_quadrature(int order, std::vector<Vec3>& pts, std::vector<double>& w) const {
  std::vector<double> tu, wu, tr, wr;
  gauss01(order, 0.0, len_, tu, wu);
  int m = std::max(8, 2 * order);
  double dphi = 2 * std::numbers::pi / m;
  for (std::size_t i = 0; i < tu.size(); ++i) {
    double R = radius_at(tu[i]);
    Vec3 c = o_ + tu[i] * a_;
    if (n_ == 2) {
      gauss01(order, -R, R, tr, wr);
      for (std::size_t j = 0; j < tr.size(); ++j) {
        pts.push_back(c + tr[j] * e1_);
        w.push_back(wu[i] * wr[j]);
      }
    } else {
      gauss01(order, 0.0, R, tr, wr);
      for (std::size_t j = 0; j < tr.size(); ++j)
        for (int k = 0; k < m; ++k) {
          pts.push_back(c + tr[j] * (std::cos(k * dphi) * e1_ + std::sin(k * dphi) * e2_));
          w.push_back(wu[i] * wr[j] * tr[j] * dphi);
        }
    }
  }
}

double Frustum::min_feature() const { return std::min(len_, std::max(r0_, r1_)); }

json Frustum::to_json() const {
  return {{"primitive", "frustum"}, {"origin", vec_json(o_, n_)}, {"axis", vec_json(a_, n_)}, {"length", len_},
          {"r0", r0_}, {"r1", r1_}};
}

ConvexPolygon::ConvexPolygon(std::vector<Vec3> vertices) : v_(std::move(vertices)) {
  if (v_.size() < 3) throw std::invalid_argument("ConvexPolygon: need at least 3 vertices");
  for (auto& p : v_) p.z = 0.0;
  for (std::size_t i = 0; i < v_.size(); ++i) {
    const Vec3 &a = v_[i], &b = v_[(i + 1) % v_.size()], &c = v_[(i + 2) % v_.size()];
    if (cross(b - a, c - b).z <= 0) throw std::invalid_argument("ConvexPolygon: vertices must be convex and counter-clockwise");
  }
}

bool ConvexPolygon::contains(const Vec3& p) const {
  for (std::size_t i = 0; i < v_.size(); ++i) {
    const Vec3 &a = v_[i], &b = v_[(i + 1) % v_.size()];
    if (!(cross(b - a, p - a).z > 0)) return false;
  }
  return true;
}

IntervalSet ConvexPolygon::line_intervals(const Vec3& x, const Vec3& dir) const {
  double tmin = -kInf, tmax = kInf;
  for (std::size_t i = 0; i < v_.size(); ++i) {
    const Vec3 &a = v_[i], &b = v_[(i + 1) % v_.size()];
    Vec3 nin = perp2(b - a);
    double s = dot(nin, x - a), ds = dot(nin, dir);
    if (ds == 0.0) {
      if (s <= 0) return {};
      continue;
    }
    double t = -s / ds;
    if (ds > 0) tmin = std::max(tmin, t); else tmax = std::min(tmax, t);
  }
  if (!(tmax > tmin)) return {};
  return {{tmin, tmax}};
}

Aabb ConvexPolygon::bounds() const {
  Aabb b{v_[0], v_[0], true};
  for (const auto& p : v_)
    for (int i = 0; i < 2; ++i) {
      b.lo[i] = std::min(b.lo[i], p[i]);
      b.hi[i] = std::max(b.hi[i], p[i]);
    }
  return b;
}

double ConvexPolygon::volume() const {
  double a = 0.0;
  for (std::size_t i = 0; i < v_.size(); ++i) a += cross(v_[i], v_[(i + 1) % v_.size()]).z;
  return 0.5 * a;
}

std::vector<PatchPtr> ConvexPolygon::surface() const {
  std::vector<PatchPtr> out;
  for (std::size_t i = 0; i < v_.size(); ++i) {
    Vec3 e = v_[(i + 1) % v_.size()] - v_[i];
    out.push_back(std::make_shared<RectPatch>(2, v_[i], e, Vec3{}, Vec3{e.y, -e.x, 0.0}));
  }
  return out;
}

void ConvexPolygon::volume_quadrature(int order, std::vector<Vec3>& pts, std::vector<double>& w) const {
  std::vector<double> t, wt;
  gauss01(order, 0.0, 1.0, t, wt);
  for (std::size_t f = 1; f + 1 < v_.size(); ++f) {
    const Vec3 &A = v_[0], &B = v_[f], &C = v_[f + 1];
    double jac = cross(B - A, C - B).z;
    for (std::size_t i = 0; i < t.size(); ++i)
      for (std::size_t j = 0; j < t.size(); ++j) {
        pts.push_back(A + t[i] * (B - A) + t[i] * t[j] * (C - B));
        w.push_back(wt[i] * wt[j] * t[i] * jac);
      }
  }
}

double ConvexPolygon::min_feature() const {
  double m = kInf;
  for (std::size_t i = 0; i < v_.size(); ++i) m = std::min(m, norm(v_[(i + 1) % v_.size()] - v_[i]));
  return m;
}

json ConvexPolygon::to_json() const {
  json vs = json::array();
  for (const auto& p : v_) vs.push_back(vec_json(p, 2));
  return {{"primitive", "polygon"}, {"vertices", vs}};
}

// ---------------------------------------------------------------- CSG

CsgPtr leaf(PrimitivePtr p) {
  auto n = std::make_shared<CsgNode>();
  n->box = p->bounds();
  n->prim = std::move(p);
  return n;
}

CsgPtr csg_union(std::vector<CsgPtr> children) {
  if (children.empty()) throw std::invalid_argument("csg_union: no children");
  if (children.size() == 1) return children[0];
  if (children.size() > 4) {
    std::size_t h = children.size() / 2;
    return csg_union({csg_union({children.begin(), children.begin() + h}), csg_union({children.begin() + h, children.end()})});
  }
  auto n = std::make_shared<CsgNode>();
  n->op = CsgOp::Union;
  n->box = children[0]->box;
  for (std::size_t i = 1; i < children.size(); ++i) n->box = merge(n->box, children[i]->box);
  n->children = std::move(children);
  return n;
}

CsgPtr csg_intersection(std::vector<CsgPtr> children) {
  if (children.empty()) throw std::invalid_argument("csg_intersection: no children");
  if (children.size() == 1) return children[0];
  auto n = std::make_shared<CsgNode>();
  n->op = CsgOp::Intersection;
  n->box = children[0]->box;
  for (std::size_t i = 1; i < children.size(); ++i) n->box = overlap(n->box, children[i]->box);
  n->children = std::move(children);
  return n;
}

CsgPtr csg_difference(CsgPtr a, CsgPtr b) {
  auto n = std::make_shared<CsgNode>();
  n->op = CsgOp::Difference;
  n->box = a->box;
  n->children = {std::move(a), std::move(b)};
  return n;
}

namespace {

bool node_contains(const CsgNode& nd, const Vec3& p, int n) {
  if (!box_contains(nd.box, p, n, kGeomTol)) return false;
  switch (nd.op) {
    case CsgOp::Leaf:
      return nd.prim->contains(p);
    case CsgOp::Union:
      for (const auto& c : nd.children)
        if (node_contains(*c, p, n)) return true;
      return false;
    case CsgOp::Intersection:
      for (const auto& c : nd.children)
        if (!node_contains(*c, p, n)) return false;
      return true;
    case CsgOp::Difference:
      return node_contains(*nd.children[0], p, n) && !node_contains(*nd.children[1], p, n);
  }
  return false;
}

IntervalSet node_intervals(const CsgNode& nd, const Vec3& x, const Vec3& d, int n) {
  if (!box_hits_line(nd.box, x, d, n)) return {};
  switch (nd.op) {
    case CsgOp::Leaf:
      return nd.prim->line_intervals(x, d);
    case CsgOp::Union: {
      IntervalSet acc;
      for (const auto& c : nd.children) acc = unite(acc, node_intervals(*c, x, d, n));
      return acc;
    }
    case CsgOp::Intersection: {
      IntervalSet acc = node_intervals(*nd.children[0], x, d, n);
      for (std::size_t i = 1; i < nd.children.size() && !acc.empty(); ++i) acc = intersect(acc, node_intervals(*nd.children[i], x, d, n));
      return acc;
    }
    case CsgOp::Difference: {
      IntervalSet a = node_intervals(*nd.children[0], x, d, n);
      if (a.empty()) return a;
      return subtract(a, node_intervals(*nd.children[1], x, d, n));
    }
  }
  return {};
}

void collect_leaves(const CsgNode& nd, bool positive_only, std::vector<PrimitivePtr>& out) {
  switch (nd.op) {
    case CsgOp::Leaf:
      out.push_back(nd.prim);
      return;
    case CsgOp::Union:
      for (const auto& c : nd.children) collect_leaves(*c, positive_only, out);
      return;
    case CsgOp::Intersection:
    case CsgOp::Difference:
      if (positive_only) {
        collect_leaves(*nd.children[0], true, out);
      } else {
        for (const auto& c : nd.children) collect_leaves(*c, false, out);
      }
      return;
  }
}

}  // namespace

Domain::Domain(int n, CsgPtr root) : n_(n), root_(std::move(root)) {
  if (n != 2 && n != 3) throw std::invalid_argument("Domain: dimension must be 2 or 3");
  if (!root_) throw std::invalid_argument("Domain: empty tree");
  box_ = root_->box;
}

bool Domain::contains(const Vec3& p) const { return node_contains(*root_, p, n_); }

IntervalSet Domain::line_intervals(const Vec3& x, const Vec3& dir) const { return node_intervals(*root_, x, dir, n_); }

HitResult Domain::ray_cast(const Vec3& x, const Vec3& theta) const {
  double len = norm(theta);
  if (len == 0.0) throw std::invalid_argument("ray_cast: zero direction");
  Vec3 th = theta * (1.0 / len);
  if (!contains(x)) throw std::invalid_argument("ray_cast: start point is not interior");
  IntervalSet iv = line_intervals(x, th);
  for (const auto& i : iv) {
    if (i.hi > 0.0 && i.lo <= kGeomTol) {
      if (std::isinf(i.hi)) return {false, {}, kInf};
      return {true, x + i.hi * th, i.hi};
    }
  }
  throw std::logic_error("ray_cast: membership and ray intervals disagree");
}

double Domain::ray_a(const Vec3& x, const Vec3& theta) const {
  HitResult h = ray_cast(x, -theta);
  return h.bounded ? -h.b : -kInf;
}

std::vector<TaggedPatch> Domain::candidate_patches() const {
  if (!patches_.empty()) return patches_;
  std::vector<PrimitivePtr> leaves;
  collect_leaves(*root_, false, leaves);
  std::vector<TaggedPatch> out;
  for (std::size_t i = 0; i < leaves.size(); ++i)
    for (auto& p : leaves[i]->surface()) out.push_back({"leaf", static_cast<int>(i), p});
  return out;
}

std::vector<Piece> Domain::volume_pieces() const {
  if (!pieces_.empty()) return pieces_;
  std::vector<PrimitivePtr> leaves;
  collect_leaves(*root_, true, leaves);
  std::vector<Piece> out;
  for (std::size_t i = 0; i < leaves.size(); ++i) out.push_back({"leaf", static_cast<int>(i), leaves[i]});
  return out;
}

bool Domain::on_boundary(const Vec3& y, const Vec3& normal, double feature) const {
  double delta = std::min(1e-7 * std::max(1.0, diameter()), 1e-3 * feature);
  return contains(y - delta * normal) != contains(y + delta * normal);
}

double Domain::boundary_distance_estimate(const Vec3& x, int directions) const {
  Rng rng(0x5eed);
  double best = kInf;
  for (int i = 0; i < directions; ++i) {
    HitResult h = ray_cast(x, rng.direction(n_));
    if (h.bounded) best = std::min(best, h.b);
  }
  return best;
}

// ---------------------------------------------------------------- clouds

std::string to_string(CloudKind k) {
  switch (k) {
    case CloudKind::Volume: return "volume";
    case CloudKind::Boundary: return "boundary";
    case CloudKind::Measure: return "measure";
  }
  return "?";
}

double Cloud::total() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

double Cloud::mean_spacing() const {
  if (points.empty()) return 0.0;
  int d = kind == CloudKind::Boundary ? n - 1 : n;
  return std::pow(total() / static_cast<double>(points.size()), 1.0 / d);
}

Cloud sample_volume(const Domain& d, std::size_t count, std::uint64_t seed) {
  if (!d.bounded()) throw std::invalid_argument("sample_volume: domain is unbounded");
  if (count == 0) throw std::invalid_argument("sample_volume: count must be positive");
  const Aabb& b = d.bounds();
  int n = d.dim();
  double vbox = 1.0;
  for (int i = 0; i < n; ++i) vbox *= b.hi[i] - b.lo[i];
  Rng rng(seed, 1);
  Cloud c;
  c.kind = CloudKind::Volume;
  c.n = n;
  c.seed = seed;
  std::size_t draws = 0;
  while (c.points.size() < count) {
    Vec3 p{};
    for (int i = 0; i < n; ++i) p[i] = rng.uniform(b.lo[i], b.hi[i]);
    ++draws;
    if (d.contains(p)) c.points.push_back(p);
    if (draws >= 100000 && static_cast<double>(c.points.size()) < 1e-4 * static_cast<double>(draws))
      throw std::runtime_error("sample_volume: acceptance rate below 1e-4; use a tighter bounding box");
  }
  double w = vbox / static_cast<double>(draws);
  c.weights.assign(c.points.size(), w);
  double acc = static_cast<double>(count) / static_cast<double>(draws);
  c.tolerance = 3.0 * std::sqrt((1.0 - acc) / (acc * static_cast<double>(draws)));
  return c;
}

Cloud sample_boundary(const Domain& d, std::size_t count, std::uint64_t seed) {
  if (!d.bounded()) throw std::invalid_argument("sample_boundary: domain is unbounded");
  if (count == 0) throw std::invalid_argument("sample_boundary: count must be positive");
  auto patches = d.candidate_patches();
  bool filter = !d.has_explicit_boundary();
  double total = 0.0;
  for (const auto& p : patches) total += p.patch->area();
  Cloud c;
  c.kind = CloudKind::Boundary;
  c.n = d.dim();
  c.seed = seed;
  Rng base(seed, 2);
  double feature = d.diameter();
  for (std::size_t i = 0; i < patches.size(); ++i) {
    double a = patches[i].patch->area();
    auto m = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(static_cast<double>(count) * a / total)));
    Rng rng = base.split(i);
    std::vector<SurfaceSample> s;
    patches[i].patch->sample(rng, m, s);
    for (const auto& q : s) {
      if (filter && !d.on_boundary(q.point, q.normal, feature)) continue;
      c.points.push_back(q.point);
      c.weights.push_back(q.weight);
      c.normals.push_back(q.normal);
    }
  }
  c.tolerance = filter ? 3.0 / std::sqrt(static_cast<double>(count)) : 0.0;
  return c;
}

Cloud grid_volume(const Domain& d, double spacing) {
  if (!d.bounded()) throw std::invalid_argument("grid_volume: domain is unbounded");
  if (!(spacing > 0)) throw std::invalid_argument("grid_volume: spacing must be positive");
  const Aabb& b = d.bounds();
  int n = d.dim();
  int cnt[3] = {1, 1, 1};
  double h[3] = {1, 1, 1};
  double w = 1.0;
  for (int i = 0; i < n; ++i) {
    cnt[i] = std::max(1, static_cast<int>(std::ceil((b.hi[i] - b.lo[i]) / spacing)));
    h[i] = (b.hi[i] - b.lo[i]) / cnt[i];
    w *= h[i];
  }
  Cloud c;
  c.kind = CloudKind::Volume;
  c.n = n;
  for (int i = 0; i < cnt[0]; ++i)
    for (int j = 0; j < cnt[1]; ++j)
      for (int k = 0; k < cnt[2]; ++k) {
        Vec3 p{b.lo[0] + (i + 0.5) * h[0], b.lo[1] + (j + 0.5) * h[1], n == 3 ? b.lo[2] + (k + 0.5) * h[2] : 0.0};
        if (d.contains(p)) c.push(p, w);
      }
  c.tolerance = spacing / std::max(1e-300, d.diameter());
  return c;
}

Cloud quadrature_volume(const Domain& d, int order) {
  auto pieces = d.volume_pieces();
  bool explicit_pieces = d.has_explicit_pieces();
  std::vector<Aabb> boxes;
  for (const auto& p : pieces) boxes.push_back(p.prim->bounds());
  Cloud c;
  c.kind = CloudKind::Volume;
  c.n = d.dim();
  std::vector<Vec3> pts;
  std::vector<double> w;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    std::vector<std::size_t> earlier;
    for (std::size_t j = 0; j < i; ++j) {
      Aabb o = overlap(boxes[i], boxes[j]);
      bool empty = false;
      for (int a = 0; a < d.dim(); ++a) empty |= o.hi[a] < o.lo[a];
      if (!empty) earlier.push_back(j);
    }
    pts.clear();
    w.clear();
    pieces[i].prim->volume_quadrature(order, pts, w);
    for (std::size_t q = 0; q < pts.size(); ++q) {
      bool owned = false;
      for (std::size_t j : earlier) owned |= pieces[j].prim->contains(pts[q]);
      if (owned) continue;
      if (!explicit_pieces && !d.contains(pts[q])) continue;
      c.push(pts[q], w[q]);
    }
  }
  return c;
}

Cloud quadrature_boundary(const Domain& d, int order) {
  auto patches = d.candidate_patches();
  bool filter = !d.has_explicit_boundary();
  Cloud c;
  c.kind = CloudKind::Boundary;
  c.n = d.dim();
  double feature = d.diameter();
  for (const auto& p : patches) {
    std::vector<SurfaceSample> s;
    p.patch->quadrature(order, s);
    for (const auto& q : s) {
      if (filter && !d.on_boundary(q.point, q.normal, feature)) continue;
      c.points.push_back(q.point);
      c.weights.push_back(q.weight);
      c.normals.push_back(q.normal);
    }
  }
  return c;
}

MeasureFit measure_check(const Cloud& cloud, double alpha, std::size_t probes, std::uint64_t seed) {
  if (cloud.points.empty()) throw std::invalid_argument("measure_check: empty cloud");
  MeasureFit fit;
  Aabb b{cloud.points[0], cloud.points[0], true};
  for (const auto& p : cloud.points)
    for (int i = 0; i < 3; ++i) {
      b.lo[i] = std::min(b.lo[i], p[i]);
      b.hi[i] = std::max(b.hi[i], p[i]);
    }
  double diam = b.diagonal();
  double rmin, rmax;
  if (diam <= 0.0) {
    rmin = 1e-6;
    rmax = 1.0;
  } else {
    int dd = cloud.kind == CloudKind::Boundary ? cloud.n - 1 : cloud.n;
    double vol = 1.0;
    for (int i = 0; i < cloud.n; ++i) vol *= std::max(b.hi[i] - b.lo[i], 1e-12 * diam);
    double spacing = cloud.kind == CloudKind::Boundary ? cloud.mean_spacing()
                                                       : std::pow(vol / static_cast<double>(cloud.size()), 1.0 / dd);
    rmax = diam;
    rmin = 2.0 * spacing;
    if (rmin >= rmax / 4) rmin = rmax / 64;
  }
  const int nr = 24;
  for (int i = 0; i < nr; ++i) fit.radii.push_back(rmin * std::pow(rmax / rmin, i / (nr - 1.0)));
  fit.ratio.assign(nr, 0.0);
  std::vector<double> mean(nr, 0.0);

  Rng rng(seed, 3);
  std::size_t np = std::min(probes, cloud.size());
  std::vector<std::pair<double, double>> dist(cloud.size());
  for (std::size_t pi = 0; pi < np; ++pi) {
    std::size_t idx = np == cloud.size() ? pi : static_cast<std::size_t>(rng.uniform() * static_cast<double>(cloud.size())) % cloud.size();
    const Vec3& x = cloud.points[idx];
    for (std::size_t j = 0; j < cloud.size(); ++j) dist[j] = {norm(cloud.points[j] - x), cloud.weights[j]};
    std::sort(dist.begin(), dist.end());
    double acc = 0.0;
    std::size_t j = 0;
    for (int i = 0; i < nr; ++i) {
      while (j < dist.size() && dist[j].first < fit.radii[i]) acc += dist[j++].second;
      double r = acc / std::pow(fit.radii[i], alpha);
      fit.ratio[i] = std::max(fit.ratio[i], r);
      mean[i] += r / static_cast<double>(np);
    }
  }
  fit.c_mu = *std::max_element(fit.ratio.begin(), fit.ratio.end());
  // log-log slope of the probe-mean ratio over the smallest radii
  double lim = std::min(fit.radii[0] * 16.0, rmax / 8.0), sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (int i = 0; i < nr; ++i) {
    if (fit.radii[i] > lim && m >= 3) break;
    if (mean[i] <= 0) continue;
    double lx = std::log(fit.radii[i]), ly = std::log(mean[i]);
    sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    ++m;
  }
  fit.small_radius_slope = m >= 2 ? (m * sxy - sx * sy) / (m * sxx - sx * sx) : 0.0;
  fit.diverges = diam <= 0.0 || fit.small_radius_slope < -0.25;
  if (fit.diverges) fit.c_mu = kInf;
  return fit;
}

}  // namespace sobolab::geometry
