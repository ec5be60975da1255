#include "sobolab/combinat.hpp"

#include <Eigen/Dense>

#include <limits>

namespace sobolab::combinat {

int MultiIndex::order() const {
  int s = 0;
  for (int e : entries) s += e;
  return s;
}

BigInt factorial(int k) {
  if (k < 0) throw std::domain_error("factorial of negative integer");
  BigInt r = 1;
  for (int i = 2; i <= k; ++i) r *= i;
  return r;
}

BigInt MultiIndex::factorial() const {
  BigInt r = 1;
  for (int e : entries) r *= combinat::factorial(e);
  return r;
}

double MultiIndex::monomial(const Vec3& p) const {
  double r = 1.0;
  for (int i = 0; i < dim(); ++i)
    for (int e = 0; e < entries[i]; ++e) r *= p[i];
  return r;
}

MultiIndex MultiIndex::operator+(const MultiIndex& o) const {
  if (o.dim() != dim()) throw std::invalid_argument("multi-index dimension mismatch");
  MultiIndex r = *this;
  for (int i = 0; i < dim(); ++i) r.entries[i] += o.entries[i];
  return r;
}

std::size_t multiindex_count(int n, int k) {
  if (n < 1 || k < 0) throw std::invalid_argument("multiindex_count: need n >= 1, k >= 0");
  BigInt c = 1;
  for (int i = 1; i <= n; ++i) c = c * (k + i) / i;
  if (c > BigInt(std::numeric_limits<std::size_t>::max()))
    throw std::overflow_error("multi-index count exceeds size_t");
  return static_cast<std::size_t>(c);
}

namespace {

void fill_exact(int n, int d, std::vector<int>& cur, int pos, std::vector<MultiIndex>& out) {
  if (pos == n - 1) {
    cur[pos] = d;
    out.push_back({cur});
    return;
  }
  for (int a = d; a >= 0; --a) {
    cur[pos] = a;
    fill_exact(n, d - a, cur, pos + 1, out);
  }
}

}  // namespace

std::vector<MultiIndex> exact_order_multiindices(int n, int d) {
  if (n < 1 || d < 0) throw std::invalid_argument("exact_order_multiindices: need n >= 1, d >= 0");
  std::vector<MultiIndex> out;
  std::vector<int> cur(n, 0);
  fill_exact(n, d, cur, 0, out);
  return out;
}

std::vector<MultiIndex> enumerate_multiindices(int n, int k) {
  std::vector<MultiIndex> out;
  out.reserve(multiindex_count(n, k));
  for (int d = 0; d <= k; ++d) {
    auto g = exact_order_multiindices(n, d);
    out.insert(out.end(), g.begin(), g.end());
  }
  return out;
}

Rational interp_coeff(const MultiIndex& alpha, int ell) {
  if (ell < 1) throw std::domain_error("interp_coeff: ell must be >= 1");
  int a = alpha.order();
  if (a > ell - 1) throw std::domain_error("interp_coeff: |alpha| > ell - 1");
  return Rational(factorial(2 * ell - 2 - a), factorial(ell - 1 - a) * alpha.factorial());
}

double sphere_moment(const MultiIndex& alpha) {
  int n = alpha.dim();
  if (n < 2) throw std::invalid_argument("sphere_moment: n >= 2 required");
  double lg = 0.0;
  for (int e : alpha.entries) {
    if (e % 2 != 0) return 0.0;
    lg += std::lgamma(0.5 * (e + 1));
  }
  lg -= std::lgamma(0.5 * (alpha.order() + n));
  return 2.0 * std::exp(lg);
}

double DualBasis::eval(std::size_t beta, const Vec3& theta) const {
  const auto& c = coef_.at(beta);
  double s = 0.0;
  for (std::size_t a = 0; a < mono_.size(); ++a) s += c[a] * mono_[a].monomial(theta);
  return s;
}

DualBasis build_dual_basis(int n, int ell) {
  if (n < 2 || ell < 1) throw std::invalid_argument("build_dual_basis: need n >= 2, ell >= 1");
  DualBasis b;
  b.n_ = n;
  b.d_ = 2 * ell - 1;
  b.mono_ = exact_order_multiindices(n, b.d_);
  const int m = static_cast<int>(b.mono_.size());
  Eigen::MatrixXd g(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) g(i, j) = sphere_moment(b.mono_[i] + b.mono_[j]);
  Eigen::LLT<Eigen::MatrixXd> llt(g);
  if (llt.info() != Eigen::Success) throw std::runtime_error("build_dual_basis: singular Gram matrix");
  Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(m, m));
  b.coef_.assign(m, std::vector<double>(m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) b.coef_[i][j] = inv(i, j);
  return b;
}

}  // namespace sobolab::combinat
