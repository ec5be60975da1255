#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sobolab/core.hpp"

namespace sobolab::geometry {

using json = nlohmann::json;

/// Open parameter interval (lo, hi) of a line x + t*dir, t in R; ends may be infinite.
struct Interval {
  double lo, hi;
};
using IntervalSet = std::vector<Interval>;

IntervalSet unite(const IntervalSet& a, const IntervalSet& b, double tol = kGeomTol);
IntervalSet intersect(const IntervalSet& a, const IntervalSet& b, double tol = kGeomTol);
IntervalSet subtract(const IntervalSet& a, const IntervalSet& b, double tol = kGeomTol);

struct Aabb {
  Vec3 lo, hi;
  bool bounded = true;
  double diagonal() const { return bounded ? norm(hi - lo) : INFINITY; }
};

struct SurfaceSample {
  Vec3 point;
  Vec3 normal;
  double weight;
};

/// Parametric piece of a boundary surface (curve when n = 2).
class Patch {
 public:
  virtual ~Patch() = default;
  virtual int dim() const = 0;
  virtual double area() const = 0;
  /// Importance-weighted random points; weights sum to area() in expectation.
  virtual void sample(Rng& rng, std::size_t count, std::vector<SurfaceSample>& out) const = 0;
  /// Deterministic product rule with about `order` points per parameter direction.
  virtual void quadrature(int order, std::vector<SurfaceSample>& out) const = 0;
  virtual json to_json() const = 0;
};
using PatchPtr = std::shared_ptr<const Patch>;

/// Full circle / sphere.
class SpherePatch final : public Patch {
 public:
  SpherePatch(int n, Vec3 center, double radius);
  int dim() const override { return n_; }
  double area() const override;
  void sample(Rng& rng, std::size_t count, std::vector<SurfaceSample>& out) const override;
  void quadrature(int order, std::vector<SurfaceSample>& out) const override;
  json to_json() const override;

 private:
  int n_;
  Vec3 c_;
  double r_;
};

/// Parallelogram origin + u*e1 + v*e2 (n = 3) or segment origin + u*e1 (n = 2),
/// (u,v) in [0,1]^2. Optional geometric grading of the quadrature toward a
/// focus point given in parameter coordinates.
class RectPatch final : public Patch {
 public:
  RectPatch(int n, Vec3 origin, Vec3 e1, Vec3 e2, Vec3 normal);
  RectPatch& graded(double fu, double fv, double min_frac);
  int dim() const override { return n_; }
  double area() const override;
  void sample(Rng& rng, std::size_t count, std::vector<SurfaceSample>& out) const override;
  void quadrature(int order, std::vector<SurfaceSample>& out) const override;
  json to_json() const override;

 private:
  int n_;
  Vec3 o_, e1_, e2_, nrm_;
  bool graded_ = false;
  double fu_ = 0.0, fv_ = 0.0, min_frac_ = 1.0;
};

/// Flat annulus {center + rho*w : w perp axis, r_in < rho < r_out} with the
/// given outward normal (+-axis); two segments when n = 2.
class AnnulusPatch final : public Patch {
 public:
  AnnulusPatch(int n, Vec3 center, Vec3 normal, double r_in, double r_out);
  int dim() const override { return n_; }
  double area() const override;
  void sample(Rng& rng, std::size_t count, std::vector<SurfaceSample>& out) const override;
  void quadrature(int order, std::vector<SurfaceSample>& out) const override;
  json to_json() const override;

 private:
  int n_;
  Vec3 c_, nrm_, e1_, e2_;
  double r_in_, r_out_;
};

class Frustum;

/// Lateral surface of a frustum.
class LateralPatch final : public Patch {
 public:
  explicit LateralPatch(const Frustum& f);
  int dim() const override;
  double area() const override;
  void sample(Rng& rng, std::size_t count, std::vector<SurfaceSample>& out) const override;
  void quadrature(int order, std::vector<SurfaceSample>& out) const override;
  json to_json() const override;

 private:
  int n_;
  Vec3 o_, a_, e1_, e2_;
  double len_, r0_, r1_;
  SurfaceSample at(double t, double phi_or_side) const;
};

class Primitive {
 public:
  virtual ~Primitive() = default;
  virtual int dim() const = 0;
  virtual bool contains(const Vec3& p) const = 0;
  virtual IntervalSet line_intervals(const Vec3& x, const Vec3& dir) const = 0;
  virtual Aabb bounds() const = 0;
  virtual double volume() const = 0;
  virtual std::vector<PatchPtr> surface() const = 0;
  /// Product rule with about `order` points per coordinate direction.
  virtual void volume_quadrature(int order, std::vector<Vec3>& pts, std::vector<double>& w) const = 0;
  virtual double min_feature() const = 0;
  virtual json to_json() const = 0;
};
using PrimitivePtr = std::shared_ptr<const Primitive>;

class Ball final : public Primitive {
 public:
  Ball(int n, Vec3 center, double radius);
  int dim() const override { return n_; }
  bool contains(const Vec3& p) const override;
  IntervalSet line_intervals(const Vec3& x, const Vec3& dir) const override;
  Aabb bounds() const override;
  double volume() const override;
  std::vector<PatchPtr> surface() const override;
  void volume_quadrature(int order, std::vector<Vec3>& pts, std::vector<double>& w) const override;
  double min_feature() const override { return r_; }
  json to_json() const override;
  const Vec3& center() const { return c_; }
  double radius() const { return r_; }

 private:
  int n_;
  Vec3 c_;
  double r_;
};

class Box final : public Primitive {
 public:
  Box(int n, Vec3 lo, Vec3 hi);
  int dim() const override { return n_; }
  bool contains(const Vec3& p) const override;
  IntervalSet line_intervals(const Vec3& x, const Vec3& dir) const override;
  Aabb bounds() const override;
  double volume() const override;
  std::vector<PatchPtr> surface() const override;
  void volume_quadrature(int order, std::vector<Vec3>& pts, std::vector<double>& w) const override;
  double min_feature() const override;
  json to_json() const override;
  const Vec3& lo() const { return lo_; }
  const Vec3& hi() const { return hi_; }

 private:
  int n_;
  Vec3 lo_, hi_;
};

/// {x : (x - point).normal > 0}; unbounded.
class HalfSpace final : public Primitive {
 public:
  HalfSpace(int n, Vec3 point, Vec3 normal);
  int dim() const override { return n_; }
  bool contains(const Vec3& p) const override;
  IntervalSet line_intervals(const Vec3& x, const Vec3& dir) const override;
  Aabb bounds() const override;
  double volume() const override { return INFINITY; }
  std::vector<PatchPtr> surface() const override { return {}; }
  void volume_quadrature(int, std::vector<Vec3>&, std::vector<double>&) const override;
  double min_feature() const override { return INFINITY; }
  json to_json() const override;

 private:
  int n_;
  Vec3 p_, nrm_;
};

/// Capped cone frustum along origin + t*axis, t in (0,len), radius linear from
/// r0 to r1 (cylinder when equal). For n = 2 this is a symmetric trapezoid.
class Frustum final : public Primitive {
 public:
  Frustum(int n, Vec3 origin, Vec3 axis, double len, double r0, double r1);
  int dim() const override { return n_; }
  bool contains(const Vec3& p) const override;
  IntervalSet line_intervals(const Vec3& x, const Vec3& dir) const override;
  Aabb bounds() const override;
  double volume() const override;
  std::vector<PatchPtr> surface() const override;
  void volume_quadrature(int order, std::vector<Vec3>& pts, std::vector<double>& w) const override;
  double min_feature() const override;
  json to_json() const override;

  const Vec3& origin() const { return o_; }
  const Vec3& axis() const { return a_; }
  const Vec3& e1() const { return e1_; }
  const Vec3& e2() const { return e2_; }
  double length() const { return len_; }
  double r0() const { return r0_; }
  double r1() const { return r1_; }
  double radius_at(double t) const { return r0_ + (r1_ - r0_) * t / len_; }

 private:
  int n_;
  Vec3 o_, a_, e1_, e2_;
  double len_, r0_, r1_;
};

/// Convex polygon in the plane, vertices counter-clockwise.
class ConvexPolygon final : public Primitive {
 public:
  explicit ConvexPolygon(std::vector<Vec3> vertices);
  int dim() const override { return 2; }
  bool contains(const Vec3& p) const override;
  IntervalSet line_intervals(const Vec3& x, const Vec3& dir) const override;
  Aabb bounds() const override;
  double volume() const override;
  std::vector<PatchPtr> surface() const override;
  void volume_quadrature(int order, std::vector<Vec3>& pts, std::vector<double>& w) const override;
  double min_feature() const override;
  json to_json() const override;

 private:
  std::vector<Vec3> v_;
};

enum class CsgOp { Leaf, Union, Intersection, Difference };

struct CsgNode {
  CsgOp op = CsgOp::Leaf;
  PrimitivePtr prim;
  std::vector<std::shared_ptr<const CsgNode>> children;
  /// Conservative bounds of the node's point set, used to prune queries.
  Aabb box;
};
using CsgPtr = std::shared_ptr<const CsgNode>;

CsgPtr leaf(PrimitivePtr p);
/// Large unions are rebalanced into a binary tree (order preserved).
CsgPtr csg_union(std::vector<CsgPtr> children);
CsgPtr csg_intersection(std::vector<CsgPtr> children);
CsgPtr csg_difference(CsgPtr a, CsgPtr b);

struct HitResult {
  bool bounded = true;
  Vec3 zeta;
  double b = 0.0;
};

/// Named part of a gallery domain, used for per-piece quadrature.
struct Piece {
  std::string role;
  int k = 0;
  PrimitivePtr prim;
};

struct TaggedPatch {
  std::string role;
  int k = 0;
  PatchPtr patch;
};

class Domain {
 public:
  Domain(int n, CsgPtr root);

  int dim() const { return n_; }
  const CsgPtr& root() const { return root_; }
  bool contains(const Vec3& p) const;
  IntervalSet line_intervals(const Vec3& x, const Vec3& dir) const;
  HitResult ray_cast(const Vec3& x, const Vec3& theta) const;
  /// Signed start of the visibility interval: a(x,theta) = -b(x,-theta).
  double ray_a(const Vec3& x, const Vec3& theta) const;
  const Aabb& bounds() const { return box_; }
  bool bounded() const { return box_.bounded; }
  double diameter() const { return box_.diagonal(); }

  /// Exact exposed boundary and disjoint pieces, when the builder knows them.
  void set_pieces(std::vector<Piece> pieces) { pieces_ = std::move(pieces); }
  void set_patches(std::vector<TaggedPatch> patches) { patches_ = std::move(patches); }
  const std::vector<Piece>& pieces() const { return pieces_; }
  const std::vector<TaggedPatch>& explicit_patches() const { return patches_; }

  /// Boundary patches: explicit ones, or primitive surfaces (which then need
  /// point-wise filtering, see on_boundary).
  bool has_explicit_boundary() const { return !patches_.empty(); }
  std::vector<TaggedPatch> candidate_patches() const;
  /// Volume pieces: explicit ones, or positive CSG leaves.
  std::vector<Piece> volume_pieces() const;
  bool has_explicit_pieces() const { return !pieces_.empty(); }

  /// True when a point on a primitive surface with outward normal `normal`
  /// separates Omega from its complement.
  bool on_boundary(const Vec3& y, const Vec3& normal, double feature) const;
  /// Distance to the nearest boundary crossing along the given direction set.
  double boundary_distance_estimate(const Vec3& x, int directions = 64) const;

  json meta;

 private:
  int n_;
  CsgPtr root_;
  Aabb box_;
  std::vector<Piece> pieces_;
  std::vector<TaggedPatch> patches_;
};
using DomainPtr = std::shared_ptr<const Domain>;

enum class CloudKind { Volume, Boundary, Measure };
std::string to_string(CloudKind k);

struct Cloud {
  CloudKind kind = CloudKind::Volume;
  int n = 2;
  std::vector<Vec3> points;
  std::vector<double> weights;
  std::vector<Vec3> normals;
  std::uint64_t seed = 0;
  /// Recorded relative accuracy of sum(weights) as an estimate of the measure.
  double tolerance = 0.0;

  std::size_t size() const { return points.size(); }
  double total() const;
  double mean_spacing() const;
  void push(const Vec3& p, double w) { points.push_back(p); weights.push_back(w); }
};

Cloud sample_volume(const Domain& d, std::size_t count, std::uint64_t seed);
Cloud sample_boundary(const Domain& d, std::size_t count, std::uint64_t seed);
/// Cell-centre grid (midpoint rule) with the given spacing.
Cloud grid_volume(const Domain& d, double spacing);
/// Product-rule quadrature on the volume pieces (ownership-filtered).
Cloud quadrature_volume(const Domain& d, int order);
/// Product-rule quadrature on the boundary patches.
Cloud quadrature_boundary(const Domain& d, int order);

struct MeasureFit {
  double c_mu = 0.0;
  bool diverges = false;
  double small_radius_slope = 0.0;
  std::vector<double> radii;
  std::vector<double> ratio;
};

/// max over probe centres x and radii r of mu(B_r(x))/r^alpha.
MeasureFit measure_check(const Cloud& cloud, double alpha, std::size_t probes, std::uint64_t seed);

}  // namespace sobolab::geometry
