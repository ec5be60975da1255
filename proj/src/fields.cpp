#include "sobolab/fields.hpp"

#include <algorithm>

#include <Eigen/Dense>

namespace sobolab::fields {

using combinat::MultiIndex;

namespace {

json vec_json(const Vec3& v, int n) {
  json a = json::array();
  for (int i = 0; i < n; ++i) a.push_back(v[i]);
  return a;
}

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

void FieldFn::check_order(int order) const {
  if (order < 0 || order > max_order())
    throw std::out_of_range("FieldFn: derivative order " + std::to_string(order) + " not available");
}

std::vector<Jet> coordinate_jets(const JetSpace& sp, const Vec3& x) {
  std::vector<Jet> out;
  for (int i = 0; i < sp.dim(); ++i) out.push_back(Jet::variable(sp, i, x[i]));
  return out;
}

Jet ConstantField::jet(const Vec3&, int order) const {
  check_order(order);
  return Jet(JetSpace::get(n_, order), c_);
}

PolynomialField::PolynomialField(int n, std::vector<Term> terms) : n_(n), terms_(std::move(terms)) {
  for (const auto& t : terms_)
    if (t.alpha.dim() != n) throw std::invalid_argument("PolynomialField: multi-index dimension mismatch");
}

int PolynomialField::degree() const {
  int d = 0;
  for (const auto& t : terms_)
    if (t.coef != 0.0) d = std::max(d, t.alpha.order());
  return d;
}

Jet PolynomialField::jet(const Vec3& x, int order) const {
  check_order(order);
  const auto& sp = JetSpace::get(n_, order);
  auto xs = coordinate_jets(sp, x);
  int deg = degree();
  std::vector<std::vector<Jet>> pw(n_);
  for (int i = 0; i < n_; ++i) {
    pw[i].push_back(Jet(sp, 1.0));
    for (int e = 1; e <= deg; ++e) pw[i].push_back(pw[i].back() * xs[i]);
  }
  Jet r(sp, 0.0);
  for (const auto& t : terms_) {
    if (t.coef == 0.0) continue;
    Jet m(sp, t.coef);
    for (int i = 0; i < n_; ++i)
      if (t.alpha.entries[i]) m = m * pw[i][t.alpha.entries[i]];
    r += m;
  }
  return r;
}

double PolynomialField::value(const Vec3& x) const {
  double s = 0.0;
  for (const auto& t : terms_) s += t.coef * t.alpha.monomial(x);
  return s;
}

json PolynomialField::describe() const {
  json terms = json::array();
  for (const auto& t : terms_) terms.push_back({{"alpha", t.alpha.entries}, {"coef", t.coef}});
  return {{"family", "polynomial"}, {"terms", terms}};
}

std::shared_ptr<PolynomialField> random_polynomial(int n, int degree, Rng& rng) {
  std::vector<PolynomialField::Term> terms;
  for (auto& a : combinat::enumerate_multiindices(n, degree)) terms.push_back({a, rng.uniform(-1.0, 1.0)});
  return std::make_shared<PolynomialField>(n, std::move(terms));
}

std::shared_ptr<PolynomialField> random_homogeneous(int n, int degree, Rng& rng) {
  std::vector<PolynomialField::Term> terms;
  for (auto& a : combinat::exact_order_multiindices(n, degree)) terms.push_back({a, rng.uniform(-1.0, 1.0)});
  return std::make_shared<PolynomialField>(n, std::move(terms));
}

RadialPowerField::RadialPowerField(int n, Vec3 center, double radius, int power, std::shared_ptr<const PolynomialField> poly)
    : n_(n), c_(center), r_(radius), a_(power), p_(std::move(poly)) {
  if (!(radius > 0) || power < 0) throw std::invalid_argument("RadialPowerField: invalid parameters");
}

Jet RadialPowerField::jet(const Vec3& x, int order) const {
  check_order(order);
  const auto& sp = JetSpace::get(n_, order);
  auto xs = coordinate_jets(sp, x);
  Jet eta(sp, 1.0);
  for (int i = 0; i < n_; ++i) {
    Jet d = xs[i] - Jet(sp, c_[i]);
    eta -= (1.0 / (r_ * r_)) * (d * d);
  }
  Jet r = pow_int(eta, a_);
  if (p_) r = r * p_->jet(x, order);
  return r;
}

json RadialPowerField::describe() const {
  json j = {{"family", "radial_power"}, {"center", vec_json(c_, n_)}, {"radius", r_}, {"power", a_}};
  if (p_) j["poly"] = p_->describe();
  return j;
}

BoxBubbleField::BoxBubbleField(int n, Vec3 lo, Vec3 hi, int power, std::shared_ptr<const PolynomialField> poly)
    : n_(n), lo_(lo), hi_(hi), a_(power), p_(std::move(poly)) {
  if (power < 0) throw std::invalid_argument("BoxBubbleField: negative power");
  for (int i = 0; i < n; ++i)
    if (!(hi[i] > lo[i])) throw std::invalid_argument("BoxBubbleField: empty box");
}

Jet BoxBubbleField::jet(const Vec3& x, int order) const {
  check_order(order);
  const auto& sp = JetSpace::get(n_, order);
  auto xs = coordinate_jets(sp, x);
  Jet eta(sp, 1.0);
  for (int i = 0; i < n_; ++i) eta = eta * ((xs[i] - Jet(sp, lo_[i])) * (Jet(sp, hi_[i]) - xs[i]));
  Jet r = pow_int(eta, a_);
  if (p_) r = r * p_->jet(x, order);
  return r;
}

json BoxBubbleField::describe() const {
  json j = {{"family", "box_bubble"}, {"lo", vec_json(lo_, n_)}, {"hi", vec_json(hi_, n_)}, {"power", a_}};
  if (p_) j["poly"] = p_->describe();
  return j;
}

Jet IndicatorField::jet(const Vec3& x, int order) const {
  check_order(order);
  return Jet(JetSpace::get(dim(), 0), value(x));
}

void Spline1D::add(double lo, double hi, Poly1D p) {
  if (!(hi > lo)) throw std::invalid_argument("Spline1D: empty piece");
  if (!pieces_.empty() && lo < pieces_.back().hi - 1e-15 * std::max(1.0, std::abs(lo)))
    throw std::invalid_argument("Spline1D: pieces must be added left to right");
  pieces_.push_back({lo, hi, std::move(p)});
}

const Spline1D::Piece* Spline1D::find(double t) const {
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), t, [](double v, const Piece& p) { return v < p.lo; });
  if (it == pieces_.begin()) return nullptr;
  --it;
  if (t < it->hi || (t == it->hi && std::next(it) == pieces_.end())) return &*it;
  return nullptr;
}

double Spline1D::operator()(double t) const {
  const Piece* p = find(t);
  return p ? p->p(t - p->lo) : 0.0;
}

std::vector<double> Spline1D::taylor(double t, int order) const {
  const Piece* p = find(t);
  if (!p) return std::vector<double>(order + 1, 0.0);
  return poly_taylor(p->p.coeffs(), t - p->lo, order);
}

Poly1D quintic_hermite(double L, const std::array<double, 3>& left, const std::array<double, 3>& right) {
  if (!(L > 0)) throw std::invalid_argument("quintic_hermite: length must be positive");
  // work in s = t/L on [0,1]
  double l0 = left[0], l1 = left[1] * L, l2 = left[2] * L * L;
  double r0 = right[0], r1 = right[1] * L, r2 = right[2] * L * L;
  double d0 = l0, d1 = l1, d2 = 0.5 * l2;
  Eigen::Matrix3d A;
  A << 1, 1, 1, 3, 4, 5, 6, 12, 20;
  Eigen::Vector3d b(r0 - d0 - d1 - d2, r1 - d1 - 2 * d2, r2 - 2 * d2);
  Eigen::Vector3d c = A.fullPivLu().solve(b);
  std::vector<double> coef{d0, d1, d2, c[0], c[1], c[2]};
  double s = 1.0;
  for (double& v : coef) {
    v /= s;
    s *= L;
  }
  return Poly1D(coef);
}

AxialProfileField::AxialProfileField(int n, Vec3 origin, Vec3 axis, Spline1D profile, int smoothness)
    : n_(n), o_(origin), a_(normalized(axis)), f_(std::move(profile)), smooth_(smoothness) {}

Jet AxialProfileField::jet(const Vec3& x, int order) const {
  check_order(order);
  const auto& sp = JetSpace::get(n_, order);
  auto xs = coordinate_jets(sp, x);
  Jet s(sp, -dot(a_, o_));
  for (int i = 0; i < n_; ++i) s += a_[i] * xs[i];
  return s.compose(f_.taylor(s.value(), order));
}

double AxialProfileField::value(const Vec3& x) const { return f_(dot(a_, x - o_)); }

json AxialProfileField::describe() const {
  json pieces = json::array();
  for (const auto& p : f_.pieces()) pieces.push_back({{"lo", p.lo}, {"hi", p.hi}, {"coeffs", p.p.coeffs()}});
  return {{"family", "axial_profile"}, {"origin", vec_json(o_, n_)}, {"axis", vec_json(a_, n_)},
          {"smoothness", smooth_}, {"pieces", pieces}};
}

Poly1D smoothstep(int m) {
  Poly1D one_minus({1.0, -1.0}), acc({0.0}), pw({1.0});
  for (int k = 0; k <= m; ++k) {
    acc = acc + binom(m + k, k) * pw;
    pw = pw * one_minus;
  }
  return Poly1D({0.0, 1.0}).pow(m + 1) * acc;
}

PoleCutoffBump::PoleCutoffBump(int n, Vec3 center, Vec3 axis, double delta, int i, double eps, int m)
    : n_(n), c_(center), a_(normalized(axis)), delta_(delta), i_(i), eps_(eps), m_(m), step_(smoothstep(m)) {
  if (!(delta > 0) || !(eps > 0) || eps >= delta / 2 || i < 0) throw std::invalid_argument("PoleCutoffBump: invalid parameters");
}

Jet PoleCutoffBump::cutoff(const std::vector<Jet>& xs, const Vec3& x, const Vec3& pole) const {
  const JetSpace& sp = xs[0].space();
  double s0 = norm(x - pole) / eps_;
  if (s0 <= 0.5) return Jet(sp, 0.0);
  if (s0 >= 1.0) return Jet(sp, 1.0);
  Jet d2(sp, 0.0);
  for (int k = 0; k < n_; ++k) {
    Jet d = xs[k] - Jet(sp, pole[k]);
    d2 += d * d;
  }
  Jet t = (2.0 / eps_) * sqrt(d2) - Jet(sp, 1.0);
  return t.compose(poly_taylor(step_.coeffs(), t.value(), sp.order()));
}

Jet PoleCutoffBump::jet(const Vec3& x, int order) const {
  check_order(order);
  const auto& sp = JetSpace::get(n_, order);
  if (norm(x - c_) >= delta_) return Jet(sp, 0.0);
  auto xs = coordinate_jets(sp, x);
  Jet eta(sp, 1.0);
  for (int k = 0; k < n_; ++k) {
    Jet d = xs[k] - Jet(sp, c_[k]);
    eta -= (1.0 / (delta_ * delta_)) * (d * d);
  }
  return pow_int(eta, i_) * cutoff(xs, x, north()) * cutoff(xs, x, south());
}

json PoleCutoffBump::describe() const {
  return {{"family", "pole_cutoff_bump"}, {"center", vec_json(c_, n_)}, {"axis", vec_json(a_, n_)},
          {"delta", delta_}, {"i", i_}, {"eps", eps_}, {"m", m_}};
}

SumField::SumField(std::vector<std::pair<double, FieldPtr>> parts) : parts_(std::move(parts)) {
  if (parts_.empty()) throw std::invalid_argument("SumField: no parts");
}

int SumField::max_order() const {
  int m = 1 << 20;
  for (const auto& p : parts_) m = std::min(m, p.second->max_order());
  return m;
}

Jet SumField::jet(const Vec3& x, int order) const {
  check_order(order);
  Jet r(JetSpace::get(dim(), order), 0.0);
  for (const auto& [s, f] : parts_) r += s * f->jet(x, order);
  return r;
}

double SumField::value(const Vec3& x) const {
  double v = 0.0;
  for (const auto& [s, f] : parts_) v += s * f->value(x);
  return v;
}

json SumField::describe() const {
  json parts = json::array();
  for (const auto& [s, f] : parts_) parts.push_back({{"scale", s}, {"field", f->describe()}});
  return {{"family", "sum"}, {"parts", parts}};
}

RegionField::RegionField(int n, std::vector<std::pair<geometry::PrimitivePtr, FieldPtr>> parts)
    : n_(n), parts_(std::move(parts)) {}

int RegionField::max_order() const {
  int m = 1 << 20;
  for (const auto& p : parts_) m = std::min(m, p.second->max_order());
  return m;
}

Jet RegionField::jet(const Vec3& x, int order) const {
  check_order(order);
  for (const auto& [r, f] : parts_)
    if (r->contains(x)) return f->jet(x, order);
  return Jet(JetSpace::get(n_, order), 0.0);
}

double RegionField::value(const Vec3& x) const {
  for (const auto& [r, f] : parts_)
    if (r->contains(x)) return f->value(x);
  return 0.0;
}

json RegionField::describe() const {
  json parts = json::array();
  for (const auto& [r, f] : parts_) parts.push_back({{"region", r->to_json()}, {"field", f->describe()}});
  return {{"family", "regions"}, {"parts", parts}};
}

RigidField::RigidField(FieldPtr f, std::array<std::array<double, 3>, 3> rotation, Vec3 translation)
    : f_(std::move(f)), r_(rotation), t_(translation) {}

Vec3 RigidField::forward(const Vec3& p) const {
  Vec3 q{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) q[i] += r_[i][j] * p[j];
  return q + t_;
}

Vec3 RigidField::inverse(const Vec3& p) const {
  Vec3 d = p - t_, q{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) q[i] += r_[j][i] * d[j];
  return q;
}

Jet linear_substitute(const Jet& jy, const std::array<std::array<double, 3>, 3>& A, const JetSpace& sx) {
  const JetSpace& sy = jy.space();
  int n = sx.dim();
  std::vector<Jet> L;
  for (int i = 0; i < n; ++i) {
    Jet l(sx, 0.0);
    if (sx.order() >= 1)
      for (int j = 0; j < n; ++j) {
        MultiIndex e{std::vector<int>(n, 0)};
        e.entries[j] = 1;
        l.coeffs()[sx.index_of(e)] = A[i][j];
      }
    L.push_back(l);
  }
  std::vector<std::vector<Jet>> pw(n);
  for (int i = 0; i < n; ++i) {
    pw[i].push_back(Jet(sx, 1.0));
    for (int e = 1; e <= sx.order(); ++e) pw[i].push_back(pw[i].back() * L[i]);
  }
  Jet r(sx, 0.0);
  for (std::size_t k = 0; k < sy.size(); ++k) {
    double c = jy.coeffs()[k];
    if (c == 0.0) continue;
    Jet m(sx, c);
    const auto& b = sy.indices()[k];
    for (int i = 0; i < n; ++i)
      if (b.entries[i]) m = m * pw[i][b.entries[i]];
    r += m;
  }
  return r;
}

Jet RigidField::jet(const Vec3& x, int order) const {
  check_order(order);
  Jet jy = f_->jet(inverse(x), order);
  std::array<std::array<double, 3>, 3> A{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) A[i][j] = r_[j][i];
  return linear_substitute(jy, A, JetSpace::get(dim(), order));
}

json RigidField::describe() const {
  json rot = json::array();
  for (const auto& row : r_) rot.push_back(row);
  return {{"family", "rigid"}, {"rotation", rot}, {"translation", vec_json(t_, 3)}, {"field", f_->describe()}};
}

double grad_norm(const FieldFn& u, const Vec3& x, int j) { return u.jet(x, j).tensor_norm(j); }

}  // namespace sobolab::fields
