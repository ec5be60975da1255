#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sobolab/fields.hpp"
#include "sobolab/geometry.hpp"
#include "sobolab/report.hpp"

namespace sobolab::experiments {

using fields::FieldFn;
using geometry::Cloud;
using geometry::Domain;
using report::AuditReport;
using json = nlohmann::json;

inline constexpr std::uint64_t kDefaultSeed = 20240601;

/// Cloud size, direction count and quadrature nodes of a run.
struct Resolution {
  std::string name = "smoke";
  std::size_t cloud = 1000;
  std::size_t directions = 256;
  int nodes = 32;

  /// Boundary clouds carry a quarter of the volume count.
  std::size_t boundary_cloud() const { return std::max<std::size_t>(cloud / 4, 16); }
  Resolution doubled() const;
  json to_json() const;
};

/// smoke (1e3, 256, 32), desk (1e4, 2048, 64), thorough (1e5, 16384, 128).
Resolution preset(const std::string& name);

struct PointwiseOptions {
  std::size_t probes = 12;
  /// Probe clearance from the boundary, relative to the diameter.
  double clearance = 0.05;
  /// Directions per cloud point for T g inside Q_k; 0 picks directions / 16.
  std::size_t cloud_directions = 0;
};

/// |grad^h u(x)| against I_{m-h}|grad^m u| + sum_k Q_k g_k + T g_0 at interior
/// probes, with feasible upper gradients g on a boundary cloud.
AuditReport pointwise_audit(const Domain& d, const FieldFn& u, int m, int h, const Resolution& res, std::uint64_t seed,
                            const PointwiseOptions& opt = {});

struct RearrangementOptions {
  std::vector<double> dilations{1, 2, 4, 8};
  int grid = 80;
  std::size_t measure_probes = 64;
};

/// Smallest C with |grad^h u|*_mu(c s) <= C RHS(s) on a log grid of s, per
/// dilation c; throws when the measure condition fails for alpha.
AuditReport rearrangement_audit(const Domain& d, const Cloud& mu, const FieldFn& u, int m, int h, double alpha,
                                const Resolution& res, std::uint64_t seed, const RearrangementOptions& opt = {});

enum class Theorem { MainMeasure, TrudMeasure, SuperLimiting };
Theorem theorem_from_string(const std::string& name);
std::string to_string(Theorem t);

struct SobolevParams {
  int m = 1, h = 0;
  double p = 1.5;      // ignored by TrudMeasure, which uses n/(m-h)
  double alpha = 0.0;  // 0: the dimension n
  std::vector<double> pk;  // SuperLimiting boundary exponents; empty: 2(n-1)/k
};

AuditReport sobolev_audit(Theorem t, const Domain& d, const Cloud& mu, const FieldFn& u, const SobolevParams& prm,
                          const Resolution& res, std::uint64_t seed);

/// Random polynomials of degree <= 2l-2 at random point pairs: max of
/// |functional| / largest term. Degree 2l-1 polynomials: C_fit =
/// max |functional| / (|grad^{2l-1} u(x)| + |grad^{2l-1} u(y)|) on two
/// independent pair draws.
AuditReport appendix_identity_check(int ell, int n, std::size_t trials, std::uint64_t seed);

}  // namespace sobolab::experiments
