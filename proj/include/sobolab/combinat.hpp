#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <vector>

#include "sobolab/core.hpp"

namespace sobolab::combinat {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

struct MultiIndex {
  std::vector<int> entries;

  int dim() const { return static_cast<int>(entries.size()); }
  int order() const;
  BigInt factorial() const;
  /// theta^alpha
  double monomial(const Vec3& p) const;
  MultiIndex operator+(const MultiIndex& o) const;
  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
};

BigInt factorial(int k);

/// All alpha with |alpha| <= k in graded-lex order: by order, then by
/// decreasing first entry, recursively.
std::vector<MultiIndex> enumerate_multiindices(int n, int k);
/// All alpha with |alpha| == d, same order as within one grade above.
std::vector<MultiIndex> exact_order_multiindices(int n, int d);
/// C(n+k, n), throws std::overflow_error beyond size_t.
std::size_t multiindex_count(int n, int k);

/// (2l-2-|alpha|)! / ((l-1-|alpha|)! alpha!)
Rational interp_coeff(const MultiIndex& alpha, int ell);

/// Integral of theta^alpha over S^{n-1}.
double sphere_moment(const MultiIndex& alpha);

class DualBasis {
 public:
  int dim() const { return n_; }
  int degree() const { return d_; }
  const std::vector<MultiIndex>& monomials() const { return mono_; }
  /// coeffs()[b][a]: coefficient of theta^{mono[a]} in P_{mono[b]}.
  const std::vector<std::vector<double>>& coeffs() const { return coef_; }
  double eval(std::size_t beta, const Vec3& theta) const;

  friend DualBasis build_dual_basis(int n, int ell);

 private:
  int n_ = 0;
  int d_ = 0;
  std::vector<MultiIndex> mono_;
  std::vector<std::vector<double>> coef_;
};

/// Polynomials P_beta of exact degree 2l-1 with  int P_beta theta^alpha = delta.
DualBasis build_dual_basis(int n, int ell);

}  // namespace sobolab::combinat
