#pragma once

#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sobolab/geometry.hpp"
#include "sobolab/jet.hpp"
#include "sobolab/kernel1d.hpp"

namespace sobolab::fields {

using json = nlohmann::json;
using kernel1d::Poly1D;

/// Analytic function on R^n with exact derivatives up to max_order().
class FieldFn {
 public:
  virtual ~FieldFn() = default;
  virtual int dim() const = 0;
  virtual int max_order() const = 0;
  /// Taylor jet at x; throws std::out_of_range when order > max_order().
  virtual Jet jet(const Vec3& x, int order) const = 0;
  virtual double value(const Vec3& x) const { return jet(x, 0).value(); }
  virtual json describe() const = 0;

 protected:
  void check_order(int order) const;
};
using FieldPtr = std::shared_ptr<const FieldFn>;

/// Jets of the coordinate functions x_i at a point.
std::vector<Jet> coordinate_jets(const JetSpace& sp, const Vec3& x);

class ConstantField final : public FieldFn {
 public:
  ConstantField(int n, double c) : n_(n), c_(c) {}
  int dim() const override { return n_; }
  int max_order() const override { return 64; }
  Jet jet(const Vec3& x, int order) const override;
  double value(const Vec3&) const override { return c_; }
  json describe() const override { return {{"family", "constant"}, {"c", c_}}; }

 private:
  int n_;
  double c_;
};

/// sum_k coef_k x^{alpha_k}
class PolynomialField final : public FieldFn {
 public:
  struct Term {
    combinat::MultiIndex alpha;
    double coef;
  };
  PolynomialField(int n, std::vector<Term> terms);
  int dim() const override { return n_; }
  int max_order() const override { return 64; }
  Jet jet(const Vec3& x, int order) const override;
  double value(const Vec3& x) const override;
  json describe() const override;
  int degree() const;
  const std::vector<Term>& terms() const { return terms_; }

 private:
  int n_;
  std::vector<Term> terms_;
};

/// Coefficients uniform in [-1,1] on every monomial of degree <= d.
std::shared_ptr<PolynomialField> random_polynomial(int n, int degree, Rng& rng);
/// Coefficients uniform in [-1,1] on the monomials of exact degree d.
std::shared_ptr<PolynomialField> random_homogeneous(int n, int degree, Rng& rng);

/// (1 - |x-c|^2/R^2)^a * P(x); with integer a >= 1 all derivatives of order
/// < a vanish on the sphere |x-c| = R.
class RadialPowerField final : public FieldFn {
 public:
  RadialPowerField(int n, Vec3 center, double radius, int power, std::shared_ptr<const PolynomialField> poly = nullptr);
  int dim() const override { return n_; }
  int max_order() const override { return 64; }
  Jet jet(const Vec3& x, int order) const override;
  json describe() const override;

 private:
  int n_;
  Vec3 c_;
  double r_;
  int a_;
  std::shared_ptr<const PolynomialField> p_;
};

/// prod_i ((x_i - lo_i)(hi_i - x_i))^a * P(x); derivatives of order < a vanish
/// exactly on the faces of the box [lo, hi].
class BoxBubbleField final : public FieldFn {
 public:
  BoxBubbleField(int n, Vec3 lo, Vec3 hi, int power, std::shared_ptr<const PolynomialField> poly = nullptr);
  int dim() const override { return n_; }
  int max_order() const override { return 64; }
  Jet jet(const Vec3& x, int order) const override;
  json describe() const override;

 private:
  int n_;
  Vec3 lo_, hi_;
  int a_;
  std::shared_ptr<const PolynomialField> p_;
};

/// Indicator of a domain; derivatives are not available.
class IndicatorField final : public FieldFn {
 public:
  explicit IndicatorField(geometry::DomainPtr d) : d_(std::move(d)) {}
  int dim() const override { return d_->dim(); }
  int max_order() const override { return 0; }
  Jet jet(const Vec3& x, int order) const override;
  double value(const Vec3& x) const override { return d_->contains(x) ? 1.0 : 0.0; }
  json describe() const override { return {{"family", "indicator"}}; }

 private:
  geometry::DomainPtr d_;
};

/// Piecewise polynomial in one variable, each piece in the local variable
/// t - lo; zero outside the pieces.
class Spline1D {
 public:
  struct Piece {
    double lo, hi;
    Poly1D p;
  };
  void add(double lo, double hi, Poly1D p);
  const Piece* find(double t) const;
  double operator()(double t) const;
  /// Taylor coefficients at t up to `order`.
  std::vector<double> taylor(double t, int order) const;
  const std::vector<Piece>& pieces() const { return pieces_; }

 private:
  std::vector<Piece> pieces_;
};

/// Degree-5 polynomial on [0,L] (local variable) with prescribed value, first
/// and second derivative at both ends.
Poly1D quintic_hermite(double L, const std::array<double, 3>& left, const std::array<double, 3>& right);

/// F(a . (x - origin)) for a unit axis a.
class AxialProfileField final : public FieldFn {
 public:
  AxialProfileField(int n, Vec3 origin, Vec3 axis, Spline1D profile, int smoothness);
  int dim() const override { return n_; }
  int max_order() const override { return 64; }
  Jet jet(const Vec3& x, int order) const override;
  double value(const Vec3& x) const override;
  json describe() const override;
  const Spline1D& profile() const { return f_; }
  /// Global continuity order of the profile (derivatives above it may jump).
  int smoothness() const { return smooth_; }

 private:
  int n_;
  Vec3 o_, a_;
  Spline1D f_;
  int smooth_;
};

/// C^m step on [0,1]: 0 for t <= 0, 1 for t >= 1, polynomial in between.
Poly1D smoothstep(int m);

/// (1 - |x-c|^2/delta^2)^i * rho(|x-y|/eps) * rho(|x-z|/eps) inside the ball,
/// zero outside; y, z are the poles c +- delta*axis and rho(s) = S(2s - 1)
/// with S the C^m smoothstep.
class PoleCutoffBump final : public FieldFn {
 public:
  PoleCutoffBump(int n, Vec3 center, Vec3 axis, double delta, int i, double eps, int m);
  int dim() const override { return n_; }
  int max_order() const override { return 64; }
  Jet jet(const Vec3& x, int order) const override;
  json describe() const override;
  Vec3 north() const { return c_ + delta_ * a_; }
  Vec3 south() const { return c_ - delta_ * a_; }
  double delta() const { return delta_; }
  double eps() const { return eps_; }

 private:
  Jet cutoff(const std::vector<Jet>& xs, const Vec3& x, const Vec3& pole) const;
  int n_;
  Vec3 c_, a_;
  double delta_;
  int i_;
  double eps_;
  int m_;
  Poly1D step_;
};

class SumField final : public FieldFn {
 public:
  explicit SumField(std::vector<std::pair<double, FieldPtr>> parts);
  int dim() const override { return parts_.front().second->dim(); }
  int max_order() const override;
  Jet jet(const Vec3& x, int order) const override;
  double value(const Vec3& x) const override;
  json describe() const override;

 private:
  std::vector<std::pair<double, FieldPtr>> parts_;
};

inline FieldPtr scaled(double s, FieldPtr f) { return std::make_shared<SumField>(std::vector<std::pair<double, FieldPtr>>{{s, std::move(f)}}); }

/// First region containing x selects the field; zero outside all regions.
class RegionField final : public FieldFn {
 public:
  RegionField(int n, std::vector<std::pair<geometry::PrimitivePtr, FieldPtr>> parts);
  int dim() const override { return n_; }
  int max_order() const override;
  Jet jet(const Vec3& x, int order) const override;
  double value(const Vec3& x) const override;
  json describe() const override;

 private:
  int n_;
  std::vector<std::pair<geometry::PrimitivePtr, FieldPtr>> parts_;
};

/// x -> f(R^T (x - t)): the field f carried by the rigid motion x -> R x + t.
class RigidField final : public FieldFn {
 public:
  RigidField(FieldPtr f, std::array<std::array<double, 3>, 3> rotation, Vec3 translation);
  int dim() const override { return f_->dim(); }
  int max_order() const override { return f_->max_order(); }
  Jet jet(const Vec3& x, int order) const override;
  json describe() const override;
  Vec3 forward(const Vec3& p) const;
  Vec3 inverse(const Vec3& p) const;

 private:
  FieldPtr f_;
  std::array<std::array<double, 3>, 3> r_;
  Vec3 t_;
};

/// Substitution h_y = A h_x of a jet expressed in y-variables.
Jet linear_substitute(const Jet& jy, const std::array<std::array<double, 3>, 3>& A, const JetSpace& sx);

/// |nabla^j u(x)| (Frobenius norm of the j-th derivative tensor).
double grad_norm(const FieldFn& u, const Vec3& x, int j);

}  // namespace sobolab::fields
