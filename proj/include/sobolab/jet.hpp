#pragma once

#include <vector>

#include "sobolab/combinat.hpp"

namespace sobolab {

/// Index set of a truncated Taylor expansion in n variables up to a total order.
class JetSpace {
 public:
  static const JetSpace& get(int n, int order);

  int dim() const { return n_; }
  int order() const { return order_; }
  std::size_t size() const { return idx_.size(); }
  const std::vector<combinat::MultiIndex>& indices() const { return idx_; }
  /// Position of alpha in the graded-lex list, or -1 when |alpha| > order.
  int index_of(const combinat::MultiIndex& alpha) const;
  /// alpha! per index, as double.
  const std::vector<double>& factorials() const { return fact_; }

  struct Term {
    int a, b, c;
  };
  const std::vector<Term>& products() const { return prod_; }
  /// First index of each grade, plus size() at the end.
  const std::vector<std::size_t>& grade_offsets() const { return grade_; }

 private:
  JetSpace(int n, int order);
  int n_, order_;
  std::vector<combinat::MultiIndex> idx_;
  std::vector<int> lookup_;
  std::vector<double> fact_;
  std::vector<Term> prod_;
  std::vector<std::size_t> grade_;
};

/// Truncated Taylor polynomial sum_alpha c_alpha h^alpha of a function at a
/// point; c_alpha = D^alpha f / alpha!.
class Jet {
 public:
  Jet() = default;
  explicit Jet(const JetSpace& sp, double value = 0.0);

  static Jet variable(const JetSpace& sp, int i, double value);

  const JetSpace& space() const { return *sp_; }
  double value() const { return c_[0]; }
  std::vector<double>& coeffs() { return c_; }
  const std::vector<double>& coeffs() const { return c_; }

  /// D^alpha f at the expansion point.
  double derivative(const combinat::MultiIndex& alpha) const;
  double derivative(std::size_t index) const { return c_[index] * sp_->factorials()[index]; }
  /// Frobenius norm of the symmetric tensor of j-th derivatives.
  double tensor_norm(int j) const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(double s);
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator*(const Jet& a, const Jet& b);

  /// f(this) where taylor[k] = f^{(k)}(value())/k!.
  Jet compose(const std::vector<double>& taylor) const;
  /// Same jet re-expressed on a space of lower order.
  Jet truncate(const JetSpace& lower) const;

 private:
  const JetSpace* sp_ = nullptr;
  std::vector<double> c_;
};

Jet pow_int(const Jet& a, int e);
/// a^p for real p; requires a.value() > 0.
Jet pow_real(const Jet& a, double p);
Jet sqrt(const Jet& a);
Jet exp(const Jet& a);
Jet sin(const Jet& a);
Jet cos(const Jet& a);

/// Taylor coefficients of a polynomial p(t) = sum c_k t^k at t0, up to `order`.
std::vector<double> poly_taylor(const std::vector<double>& c, double t0, int order);

}  // namespace sobolab
