#pragma once

#include <vector>

#include "sobolab/fields.hpp"
#include "sobolab/geometry.hpp"
#include "sobolab/rearrange.hpp"

namespace sobolab::seminorms {

using geometry::Cloud;

/// Left-hand sides of the boundary upper-gradient conditions on a cloud.
/// (k, 0): |sum_{|a|<=k-1} c(a,k) (y-x)^a |y-x|^{1-2k} [(-1)^|a| D^a u(y) - D^a u(x)]|;
/// (k, 1): the same summed in absolute value over the components of grad u;
/// (0, 1): |u(x)| pointwise.
class PairDifference {
 public:
  PairDifference(const fields::FieldFn& u, const Cloud& cloud, int k, int j);

  int k() const { return k_; }
  int j() const { return j_; }
  std::size_t size() const { return w_.size(); }
  const std::vector<double>& weights() const { return w_; }
  bool pointwise() const { return k_ == 0; }
  /// |u(x_i)| in the pointwise case.
  const std::vector<double>& values() const { return abs_u_; }

  /// D(x_a, x_b); zero on the diagonal and on skipped pairs.
  double operator()(std::size_t a, std::size_t b) const;
  /// max_b D(x_a, x_b).
  const std::vector<double>& row_max() const { return row_max_; }
  double max() const;
  /// Unordered pairs closer than the coincidence threshold.
  std::size_t skipped() const { return skipped_; }
  double threshold() const { return thr_; }

 private:
  double component(std::size_t a, std::size_t b, const Vec3& d, double scale, int comp) const;
  double eval(std::size_t a, std::size_t b, const Vec3& d, double r) const;

  int k_, j_, n_;
  double thr_ = 0.0;
  std::vector<Vec3> x_;
  std::vector<double> w_;
  std::vector<double> abs_u_;
  std::size_t stride_ = 0;
  std::vector<double> deriv_;  // D^beta u per point, JetSpace order
  std::vector<combinat::MultiIndex> alpha_;
  std::vector<double> coef_;
  std::vector<int> sign_;
  std::vector<std::vector<int>> index_;  // [component][alpha] -> jet index
  std::vector<double> row_max_;
  std::size_t skipped_ = 0;
};

/// g(x) = max_y D(x,y) / 2, or |u| in the pointwise case.
std::vector<double> feasible_upper_gradient(const PairDifference& D);

struct OptimalGradient {
  std::vector<double> g;
  double objective = 0.0;
  double primal = 0.0;  // matching value, equals objective at optimum
  std::size_t augmentations = 0;
};

constexpr std::size_t kOptimalLimit = 500;

/// Exact minimizer of ||g||_{L^r} over g(x)+g(y) >= D(x,y), g >= 0, for
/// r = 1 or infinity. r = 1 solves the doubled bipartite transportation
/// problem by successive shortest paths and symmetrizes its dual.
OptimalGradient optimal_upper_gradient(const PairDifference& D, double r);
/// Same on an explicit symmetric row-major matrix with zero diagonal.
OptimalGradient optimal_upper_gradient(const std::vector<double>& D, const std::vector<double>& weights, double r);

enum class Mode { Feasible, Optimal };

double v_seminorm(const PairDifference& D, const rearrange::NormSpec& spec, Mode mode = Mode::Feasible);
double v_seminorm(const fields::FieldFn& u, const Cloud& cloud, int k, int j, const rearrange::NormSpec& spec,
                  Mode mode = Mode::Feasible);

/// Signed two-point sum of the (k, 0) functional at (x, y) and the largest
/// magnitude of its individual terms.
struct TwoPointTerms {
  double sum = 0.0;
  double max_term = 0.0;
};
TwoPointTerms two_point_terms(const fields::FieldFn& u, const Vec3& x, const Vec3& y, int k);

/// Index pair (k, j) of the boundary seminorm attached to derivative order d:
/// ([(d+1)/2], 0) for d odd and ([(d+1)/2], 1) for d even.
std::pair<int, int> seminorm_indices(int d);

}  // namespace sobolab::seminorms
