#include "sobolab/jet.hpp"

#include <map>
#include <memory>
#include <mutex>

namespace sobolab {

using combinat::MultiIndex;

namespace {

int encode(const MultiIndex& a, int base) {
  int k = 0;
  for (int e : a.entries) k = k * base + e;
  return k;
}

}  // namespace

JetSpace::JetSpace(int n, int order) : n_(n), order_(order) {
  idx_ = combinat::enumerate_multiindices(n, order);
  int base = order + 1, total = 1;
  for (int i = 0; i < n; ++i) total *= base;
  lookup_.assign(total, -1);
  for (std::size_t i = 0; i < idx_.size(); ++i) {
    lookup_[encode(idx_[i], base)] = static_cast<int>(i);
    fact_.push_back(static_cast<double>(idx_[i].factorial()));
  }
  for (std::size_t a = 0; a < idx_.size(); ++a)
    for (std::size_t b = 0; b < idx_.size(); ++b) {
      if (idx_[a].order() + idx_[b].order() > order) continue;
      prod_.push_back({static_cast<int>(a), static_cast<int>(b), index_of(idx_[a] + idx_[b])});
    }
  for (int d = 0; d <= order; ++d) grade_.push_back(combinat::multiindex_count(n, d) - combinat::exact_order_multiindices(n, d).size());
  grade_.push_back(idx_.size());
}

const JetSpace& JetSpace::get(int n, int order) {
  if (n < 1 || n > 3 || order < 0) throw std::invalid_argument("JetSpace: need 1 <= n <= 3, order >= 0");
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<JetSpace>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{n, order}];
  if (!slot) slot.reset(new JetSpace(n, order));
  return *slot;
}

int JetSpace::index_of(const MultiIndex& alpha) const {
  if (alpha.dim() != n_) throw std::invalid_argument("JetSpace::index_of: dimension mismatch");
  if (alpha.order() > order_) return -1;
  return lookup_[encode(alpha, order_ + 1)];
}

Jet::Jet(const JetSpace& sp, double value) : sp_(&sp), c_(sp.size(), 0.0) { c_[0] = value; }

Jet Jet::variable(const JetSpace& sp, int i, double value) {
  Jet j(sp, value);
  if (sp.order() >= 1) {
    MultiIndex e{std::vector<int>(sp.dim(), 0)};
    e.entries[i] = 1;
    j.c_[sp.index_of(e)] = 1.0;
  }
  return j;
}

double Jet::derivative(const MultiIndex& alpha) const {
  int k = sp_->index_of(alpha);
  if (k < 0) throw std::out_of_range("Jet::derivative: order exceeds jet order");
  return derivative(static_cast<std::size_t>(k));
}

double Jet::tensor_norm(int j) const {
  if (j > sp_->order()) throw std::out_of_range("Jet::tensor_norm: order exceeds jet order");
  double jf = std::tgamma(j + 1.0), s = 0.0;
  const auto& g = sp_->grade_offsets();
  for (std::size_t k = g[j]; k < g[j + 1]; ++k) {
    double d = derivative(k);
    s += jf / sp_->factorials()[k] * d * d;
  }
  return std::sqrt(s);
}

Jet& Jet::operator+=(const Jet& o) {
  for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
  return *this;
}

Jet& Jet::operator*=(double s) {
  for (double& x : c_) x *= s;
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  Jet r(*a.sp_, 0.0);
  for (const auto& t : a.sp_->products()) r.c_[t.c] += a.c_[t.a] * b.c_[t.b];
  return r;
}

Jet Jet::compose(const std::vector<double>& taylor) const {
  Jet h = *this;
  h.c_[0] = 0.0;
  int K = std::min<int>(sp_->order(), static_cast<int>(taylor.size()) - 1);
  Jet r(*sp_, K >= 0 ? taylor[K] : 0.0);
  for (int k = K - 1; k >= 0; --k) {
    r = r * h;
    r.c_[0] += taylor[k];
  }
  return r;
}

Jet Jet::truncate(const JetSpace& lower) const {
  if (lower.dim() != sp_->dim() || lower.order() > sp_->order()) throw std::invalid_argument("Jet::truncate: incompatible space");
  Jet r(lower, 0.0);
  for (std::size_t k = 0; k < lower.size(); ++k) r.c_[k] = c_[k];
  return r;
}

Jet pow_int(const Jet& a, int e) {
  if (e < 0) throw std::invalid_argument("pow_int: negative exponent");
  Jet r(a.space(), 1.0), base = a;
  while (e > 0) {
    if (e & 1) r = r * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return r;
}

Jet pow_real(const Jet& a, double p) {
  double v = a.value();
  if (!(v > 0.0)) throw std::domain_error("pow_real: base must be positive");
  int K = a.space().order();
  std::vector<double> t(K + 1);
  double coef = 1.0;
  for (int k = 0; k <= K; ++k) {
    t[k] = coef * std::pow(v, p - k);
    coef *= (p - k) / (k + 1);
  }
  return a.compose(t);
}

Jet sqrt(const Jet& a) { return pow_real(a, 0.5); }

Jet exp(const Jet& a) {
  int K = a.space().order();
  std::vector<double> t(K + 1);
  double e = std::exp(a.value()), f = 1.0;
  for (int k = 0; k <= K; ++k) {
    t[k] = e / f;
    f *= (k + 1);
  }
  return a.compose(t);
}

namespace {

std::vector<double> trig_taylor(double v, int K, bool is_sin) {
  std::vector<double> t(K + 1);
  double s = std::sin(v), c = std::cos(v), f = 1.0;
  for (int k = 0; k <= K; ++k) {
    // k-th derivative of sin cycles sin, cos, -sin, -cos.
    int ph = (k + (is_sin ? 0 : 1)) % 4;
    double d = ph == 0 ? s : ph == 1 ? c : ph == 2 ? -s : -c;
    t[k] = d / f;
    f *= (k + 1);
  }
  return t;
}

}  // namespace

Jet sin(const Jet& a) { return a.compose(trig_taylor(a.value(), a.space().order(), true)); }
Jet cos(const Jet& a) { return a.compose(trig_taylor(a.value(), a.space().order(), false)); }

std::vector<double> poly_taylor(const std::vector<double>& c, double t0, int order) {
  std::vector<double> out(order + 1, 0.0);
  std::vector<double> d = c;
  double f = 1.0;
  for (int k = 0; k <= order && !d.empty(); ++k) {
    double s = 0.0;
    for (auto it = d.rbegin(); it != d.rend(); ++it) s = s * t0 + *it;
    out[k] = s / f;
    f *= (k + 1);
    std::vector<double> nd(d.size() > 1 ? d.size() - 1 : 0);
    for (std::size_t i = 1; i < d.size(); ++i) nd[i - 1] = d[i] * static_cast<double>(i);
    d = std::move(nd);
  }
  return out;
}

}  // namespace sobolab
