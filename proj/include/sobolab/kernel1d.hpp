#pragma once

#include <functional>
#include <vector>

#include "sobolab/combinat.hpp"

namespace sobolab::kernel1d {

class Poly1D {
 public:
  Poly1D() = default;
  explicit Poly1D(std::vector<double> coeffs);

  /// Coefficient of t^k.
  const std::vector<double>& coeffs() const { return c_; }
  int degree() const { return static_cast<int>(c_.size()) - 1; }

  double operator()(double t) const;
  double eval_naive(double t) const;
  Poly1D derivative(int order = 1) const;
  /// Antiderivative vanishing at t = 0.
  Poly1D antiderivative() const;
  Poly1D pow(int e) const;

  friend Poly1D operator+(const Poly1D& a, const Poly1D& b);
  friend Poly1D operator-(const Poly1D& a, const Poly1D& b);
  friend Poly1D operator*(const Poly1D& a, const Poly1D& b);
  friend Poly1D operator*(double s, const Poly1D& a);

 private:
  void trim();
  std::vector<double> c_;
};

struct BoundaryData1D {
  double a = 0.0, b = 1.0;
  std::vector<double> derivs_a;
  std::vector<double> derivs_b;
};

/// Exact rational coefficients of Q_{2l-1} (index = power of t).
std::vector<combinat::Rational> build_Q_exact(int ell);
Poly1D build_Q(int ell);

/// Normalization of the Green kernel obtained by solving w^{(2l)} = 1 with
/// zero boundary data and matching the kernel integral at s = 0.
double green_constant(int ell);
/// (-1)^l / ((2l-1)! * int_{-1}^{1} (1-r^2)^{l-1} dr)
double green_constant_closed_form(int ell);

/// kappa(s,r); the diagonal takes the continuous extension C (1-s^2)^{2l-1}/(2l-1).
double green_kernel(int ell, double s, double r);
/// kappa(., r) as a polynomial in s on {s > r} (upper) or {s < r}.
Poly1D green_kernel_branch(int ell, double r, bool upper);

/// d^j/ds^j of w(s) = int_{-1}^{1} kappa(s,r) phi(r) dr, for j <= 2l-1, with
/// `nodes` Gauss points on each of [-1,s] and [s,1].
double green_solution(int ell, const std::function<double(double)>& phi, double s, int deriv,
                      int nodes = 64);

/// (2l-1)!/(l-1)! (-1)^l sum_k (2l-k-2)!/(k!(l-k-1)!) (b-a)^{-(2l-k-1)} [(-1)^{k+1} psi^(k)(b) + psi^(k)(a)],
/// the constant (2l-1)-th derivative of the two-point Hermite interpolant.
double two_point_constant(int ell, const BoundaryData1D& data);

double repr_1d(int ell, const BoundaryData1D& data, double t,
               const std::function<double(double)>& psi_2l, int nodes = 64);

}  // namespace sobolab::kernel1d
