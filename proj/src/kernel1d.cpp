#include "sobolab/kernel1d.hpp"

#include <map>
#include <mutex>

namespace sobolab::kernel1d {

using combinat::BigInt;
using combinat::Rational;

Poly1D::Poly1D(std::vector<double> coeffs) : c_(std::move(coeffs)) { trim(); }

void Poly1D::trim() {
  while (c_.size() > 1 && c_.back() == 0.0) c_.pop_back();
  if (c_.empty()) c_.push_back(0.0);
}

double Poly1D::operator()(double t) const {
  double s = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) s = s * t + *it;
  return s;
}

double Poly1D::eval_naive(double t) const {
  double s = 0.0, p = 1.0;
  for (double c : c_) {
    s += c * p;
    p *= t;
  }
  return s;
}

Poly1D Poly1D::derivative(int order) const {
  std::vector<double> c = c_;
  for (int o = 0; o < order; ++o) {
    if (c.size() <= 1) return Poly1D({0.0});
    std::vector<double> d(c.size() - 1);
    for (std::size_t k = 1; k < c.size(); ++k) d[k - 1] = c[k] * static_cast<double>(k);
    c = std::move(d);
  }
  return Poly1D(std::move(c));
}

Poly1D Poly1D::antiderivative() const {
  std::vector<double> d(c_.size() + 1, 0.0);
  for (std::size_t k = 0; k < c_.size(); ++k) d[k + 1] = c_[k] / static_cast<double>(k + 1);
  return Poly1D(std::move(d));
}

Poly1D Poly1D::pow(int e) const {
  Poly1D r({1.0});
  for (int i = 0; i < e; ++i) r = r * *this;
  return r;
}

Poly1D operator+(const Poly1D& a, const Poly1D& b) {
  std::vector<double> c(std::max(a.c_.size(), b.c_.size()), 0.0);
  for (std::size_t k = 0; k < a.c_.size(); ++k) c[k] += a.c_[k];
  for (std::size_t k = 0; k < b.c_.size(); ++k) c[k] += b.c_[k];
  return Poly1D(std::move(c));
}

Poly1D operator-(const Poly1D& a, const Poly1D& b) { return a + (-1.0) * b; }

Poly1D operator*(const Poly1D& a, const Poly1D& b) {
  std::vector<double> c(a.c_.size() + b.c_.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
  return Poly1D(std::move(c));
}

Poly1D operator*(double s, const Poly1D& a) {
  std::vector<double> c = a.c_;
  for (double& x : c) x *= s;
  return Poly1D(std::move(c));
}

namespace {

BigInt binom(int n, int k) {
  return combinat::factorial(n) / (combinat::factorial(k) * combinat::factorial(n - k));
}

// (1 - t^2)^{l-1} = sum_j binom(l-1, j) (-1)^j t^{2j}
std::vector<Rational> one_minus_t2_pow(int m) {
  std::vector<Rational> c(2 * m + 1, Rational(0));
  for (int j = 0; j <= m; ++j) c[2 * j] = Rational(binom(m, j)) * (j % 2 ? -1 : 1);
  return c;
}

Rational eval_exact(const std::vector<Rational>& c, const Rational& t) {
  Rational s = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * t + *it;
  return s;
}

double ipow(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

}  // namespace

std::vector<Rational> build_Q_exact(int ell) {
  if (ell < 1) throw std::invalid_argument("build_Q: ell must be >= 1");
  auto d = one_minus_t2_pow(ell - 1);
  std::vector<Rational> q(d.size() + 1, Rational(0));
  for (std::size_t k = 0; k < d.size(); ++k) q[k + 1] = d[k] / Rational(static_cast<long>(k + 1));
  // Q = c * (A(t) - A(-1)), with c fixed by Q(1) = 1.
  Rational a_m1 = eval_exact(q, Rational(-1));
  Rational c = 1 / (eval_exact(q, Rational(1)) - a_m1);
  q[0] -= a_m1;
  for (auto& x : q) x *= c;
  return q;
}

Poly1D build_Q(int ell) {
  auto q = build_Q_exact(ell);
  std::vector<double> c;
  for (const auto& x : q) c.push_back(static_cast<double>(x));
  return Poly1D(std::move(c));
}

double green_constant_closed_form(int ell) {
  auto d = one_minus_t2_pow(ell - 1);
  Rational integral = 0;
  for (std::size_t k = 0; k < d.size(); k += 2) integral += d[k] * Rational(2, static_cast<long>(k + 1));
  Rational c = Rational(ell % 2 ? -1 : 1) / (Rational(combinat::factorial(2 * ell - 1)) * integral);
  return static_cast<double>(c);
}

namespace {

double kernel_unnormalized(int ell, double s, double r) {
  double d = std::abs(s - r);
  double one = 1.0 - s * r;
  double acc = 0.0, tail = 0.0;
  for (int j = 0; j < ell; ++j) {
    double cj = static_cast<double>(binom(ell - 1, j)) * ((ell - 1 - j) % 2 ? -1.0 : 1.0) / (2 * j + 1);
    acc += cj * ipow(one, 2 * j + 1) * ipow(d, 2 * ell - 2 * j - 2);
    tail += cj;
  }
  return acc - tail * ipow(d, 2 * ell - 1);
}

double calibrate(int ell) {
  const int nodes = 2 * ell + 4;
  auto f = [ell](double r) { return kernel_unnormalized(ell, 0.0, r); };
  double w1 = gauss_integrate(f, -1.0, 0.0, nodes) + gauss_integrate(f, 0.0, 1.0, nodes);
  double exact = (ell % 2 ? -1.0 : 1.0) / static_cast<double>(combinat::factorial(2 * ell));
  return exact / w1;
}

}  // namespace

double green_constant(int ell) {
  if (ell < 1) throw std::invalid_argument("green_constant: ell must be >= 1");
  static std::mutex mu;
  static std::map<int, double> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(ell);
  if (it != cache.end()) return it->second;
  return cache[ell] = calibrate(ell);
}

double green_kernel(int ell, double s, double r) {
  if (ell < 1) throw std::invalid_argument("green_kernel: ell must be >= 1");
  if (s < -1.0 || s > 1.0 || r < -1.0 || r > 1.0) throw std::domain_error("green_kernel: arguments outside [-1,1]");
  return green_constant(ell) * kernel_unnormalized(ell, s, r);
}

Poly1D green_kernel_branch(int ell, double r, bool upper) {
  Poly1D one_sr({1.0, -r});
  Poly1D d = upper ? Poly1D({-r, 1.0}) : Poly1D({r, -1.0});
  Poly1D acc({0.0});
  double tail = 0.0;
  for (int j = 0; j < ell; ++j) {
    double cj = static_cast<double>(binom(ell - 1, j)) * ((ell - 1 - j) % 2 ? -1.0 : 1.0) / (2 * j + 1);
    acc = acc + cj * (one_sr.pow(2 * j + 1) * d.pow(2 * ell - 2 * j - 2));
    tail += cj;
  }
  acc = acc - tail * d.pow(2 * ell - 1);
  return green_constant(ell) * acc;
}

double green_solution(int ell, const std::function<double(double)>& phi, double s, int deriv, int nodes) {
  if (deriv < 0 || deriv > 2 * ell - 1) throw std::invalid_argument("green_solution: derivative order out of range");
  if (s < -1.0 || s > 1.0) throw std::domain_error("green_solution: s outside [-1,1]");
  auto lower_part = [&](double r) { return green_kernel_branch(ell, r, true).derivative(deriv)(s) * phi(r); };
  auto upper_part = [&](double r) { return green_kernel_branch(ell, r, false).derivative(deriv)(s) * phi(r); };
  double v = 0.0;
  if (s > -1.0) v += gauss_integrate(lower_part, -1.0, s, nodes);
  if (s < 1.0) v += gauss_integrate(upper_part, s, 1.0, nodes);
  return v;
}

double two_point_constant(int ell, const BoundaryData1D& data) {
  if (!(data.a < data.b)) throw std::domain_error("two_point_constant: need a < b");
  if (static_cast<int>(data.derivs_a.size()) != ell || static_cast<int>(data.derivs_b.size()) != ell)
    throw std::invalid_argument("two_point_constant: boundary data must have length ell");
  double len = data.b - data.a, s = 0.0;
  for (int k = 0; k < ell; ++k) {
    double c = static_cast<double>(combinat::factorial(2 * ell - k - 2)) /
               static_cast<double>(combinat::factorial(k) * combinat::factorial(ell - k - 1));
    double sign = (k + 1) % 2 ? -1.0 : 1.0;
    s += c / std::pow(len, 2 * ell - k - 1) * (sign * data.derivs_b[k] + data.derivs_a[k]);
  }
  // Leading coefficient of the two-point Hermite interpolant; the 1/(l-1)! factor
  // is invisible for l <= 2.
  double scale = static_cast<double>(combinat::factorial(2 * ell - 1)) / static_cast<double>(combinat::factorial(ell - 1));
  return scale * (ell % 2 ? -1.0 : 1.0) * s;
}

double repr_1d(int ell, const BoundaryData1D& data, double t, const std::function<double(double)>& psi_2l,
               int nodes) {
  if (!(t > data.a && t < data.b)) throw std::domain_error("repr_1d: t outside (a,b)");
  Poly1D q = build_Q(ell);
  double a = data.a, b = data.b, len = b - a;
  double left = gauss_integrate([&](double tau) { return q((2 * tau - a - b) / len) * psi_2l(tau); }, a, t, nodes);
  double right = gauss_integrate([&](double tau) { return q((a + b - 2 * tau) / len) * psi_2l(tau); }, t, b, nodes);
  return left - right + two_point_constant(ell, data);
}

}  // namespace sobolab::kernel1d
