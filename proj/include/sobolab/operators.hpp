#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "sobolab/fields.hpp"
#include "sobolab/geometry.hpp"

namespace sobolab::operators {

using geometry::Cloud;
using geometry::Domain;
using PointFn = std::function<double(const Vec3&)>;

PointFn as_point_fn(fields::FieldPtr f);

/// Nearest-neighbour queries on the points of a cloud.
class CloudLookup {
 public:
  explicit CloudLookup(const Cloud& cloud);
  std::size_t nearest(const Vec3& p) const;
  double distance(const Vec3& p) const;
  /// Piecewise-constant extension of per-point values.
  PointFn values(std::vector<double> v) const;

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

/// Tg(x) = int_{S^{n-1}} |g(zeta(x,theta))| dtheta by M uniform directions;
/// g(zeta) = 0 on unbounded rays.
double op_T(const Domain& d, const PointFn& g, const Vec3& x, std::size_t M, std::uint64_t seed);

/// N_gamma g(x) = sum_j w_j g(y_j) |x - y_j|^{gamma - n} over a boundary cloud.
double op_N(double gamma, const Cloud& b, const PointFn& g, const Vec3& x);
double op_N(double gamma, const Cloud& b, const std::vector<double>& gv, const Vec3& x);

/// Exclusion radius of the Riesz sum: (sum w / N)^{1/n}.
double riesz_cutoff(const Cloud& v);

/// I_gamma f(x) over a volume cloud: points closer than riesz_cutoff are
/// dropped and f(x) n omega_n h^gamma / gamma is added back.
double op_I(double gamma, const Cloud& v, const PointFn& f, const Vec3& x);
double op_I(double gamma, const Cloud& v, const std::vector<double>& fv, double fx, const Vec3& x);

/// Tg at every cloud point; point i uses the direction stream split(i).
std::vector<double> t_on_cloud(const Domain& d, const PointFn& g, const Cloud& v, std::size_t M, std::uint64_t seed);

/// Q_gamma g(x) = I_gamma(Tg)(x); Tg(x) itself uses the stream split(size of v).
double op_Q(double gamma, const Domain& d, const Cloud& v, const PointFn& g, const Vec3& x, std::size_t M, std::uint64_t seed);
double op_Q(double gamma, const Cloud& v, const std::vector<double>& tg, double tg_x, const Vec3& x);

/// pi^{n/2} G(s/2) G(g/2) G((n-s-g)/2) / (G((n-s)/2) G((n-g)/2) G((s+g)/2)).
double riesz_constant(int n, double sigma, double gamma);

struct RieszOptions {
  int inner_directions = 256;  // per angle for n = 2; azimuthal count for n = 3
  int outer_directions = 64;
  int panel_nodes = 6;
  int grading_levels = 5;
  double box_radius = 0.0;  // 0: 16 times the support diameter
};

struct RieszCheck {
  std::vector<Vec3> probes;
  std::vector<double> lhs, rhs, ratio;
  double mean = 0.0, cv = 0.0;
  double closed_form = 0.0;
  double max_tail_fraction = 0.0;
  bool empty() const { return ratio.empty(); }
};

/// I_sigma(I_gamma f) against I_{sigma+gamma} f over R^n for f supported in
/// `support`, by polar quadrature along ray intervals plus an analytic tail.
RieszCheck riesz_composition_check(double sigma, double gamma, const fields::FieldFn& f, const Domain& support,
                                   const std::vector<Vec3>& probes, const RieszOptions& opt = {});
RieszCheck riesz_composition_check(double sigma, double gamma, const fields::FieldFn& f, const Domain& support,
                                   std::size_t probes, std::uint64_t seed, const RieszOptions& opt = {});

struct ProjectionReport {
  std::vector<double> t, n, ratio;  // ratio = Tg / (2^n N_1 |g|)
  double max_ratio = 0.0;
  double slack = 0.05;
  bool pass() const { return max_ratio <= 1.0 + slack; }
};

ProjectionReport projection_bound_check(const Domain& d, const Cloud& b, const PointFn& g, const std::vector<Vec3>& probes,
                                        std::size_t M, std::uint64_t seed, double slack = 0.05);

struct WeakTypeFit {
  double constant = 0.0;
  double g_l1 = 0.0;
  std::size_t used = 0, dropped = 0;
};

/// sup_t t mu{N_gamma g > t}^{(n-gamma)/alpha} / ||g||_{L^1} over the mu
/// cloud; points within the boundary mean spacing of the boundary cloud are
/// dropped.
WeakTypeFit weak_type_constant(double gamma, double alpha, const Cloud& b, const std::vector<double>& g, const Cloud& mu);

/// Uniform interior points whose distance to the boundary is at least `clearance`.
std::vector<Vec3> interior_probes(const Domain& d, std::size_t count, std::uint64_t seed, double clearance);

}  // namespace sobolab::operators
