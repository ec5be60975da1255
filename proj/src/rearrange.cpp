#include "sobolab/rearrange.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

#include "sobolab/core.hpp"

namespace sobolab::rearrange {

namespace {

// int_a^b r^{-c} dr
double power_integral(double a, double b, double c) {
  if (!(b > a)) return 0.0;
  if (std::abs(c - 1.0) < 1e-14) return std::log(b / a);
  return (std::pow(b, 1.0 - c) - std::pow(a, 1.0 - c)) / (1.0 - c);
}

}  // namespace

StepFunction::StepFunction(std::vector<double> breaks, std::vector<double> values) {
  if (breaks.size() != values.size()) throw std::invalid_argument("StepFunction: breaks and values differ in length");
  double prev_s = 0.0, prev_v = INFINITY;
  for (std::size_t i = 0; i < breaks.size(); ++i) {
    if (!(breaks[i] >= prev_s)) throw std::invalid_argument("StepFunction: breakpoints must increase");
    if (!(values[i] >= 0.0) || values[i] > prev_v) throw std::invalid_argument("StepFunction: values must be nonnegative and nonincreasing");
    double lo = prev_s;
    prev_s = breaks[i];
    prev_v = values[i];
    if (breaks[i] == lo || values[i] == 0.0) continue;
    if (!v_.empty() && v_.back() == values[i])
      s_.back() = breaks[i];
    else {
      s_.push_back(breaks[i]);
      v_.push_back(values[i]);
    }
  }
}

double StepFunction::operator()(double s) const {
  if (s < 0) return v_.empty() ? 0.0 : v_.front();
  auto it = std::upper_bound(s_.begin(), s_.end(), s);
  return it == s_.end() ? 0.0 : v_[static_cast<std::size_t>(it - s_.begin())];
}

double StepFunction::integral() const { return partial_integral(support()); }

double StepFunction::partial_integral(double x) const {
  double acc = 0.0, lo = 0.0;
  for (std::size_t i = 0; i < v_.size() && lo < x; ++i) {
    acc += v_[i] * (std::min(s_[i], x) - lo);
    lo = s_[i];
  }
  return acc;
}

double StepFunction::weighted_tail(double a, double c) const {
  double acc = 0.0, lo = 0.0;
  for (std::size_t i = 0; i < v_.size(); ++i) {
    double l = std::max(lo, a), r = s_[i];
    if (r > l) {
      if (l == 0.0 && c >= 1.0) return INFINITY;
      acc += v_[i] * power_integral(l, r, c);
    }
    lo = s_[i];
  }
  return acc;
}

StepFunction StepFunction::scaled(double lambda) const {
  std::vector<double> v = v_;
  for (double& x : v) x *= std::abs(lambda);
  return StepFunction(s_, v);
}

StepFunction rearrange(const std::vector<double>& values, const std::vector<double>& weights) {
  if (values.size() != weights.size()) throw std::invalid_argument("rearrange: values and weights differ in length");
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  for (double w : weights)
    if (!(w > 0)) throw std::invalid_argument("rearrange: weights must be positive");
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return std::abs(values[a]) > std::abs(values[b]); });
  std::vector<double> s, v;
  double acc = 0.0;
  for (std::size_t i : idx) {
    acc += weights[i];
    s.push_back(acc);
    v.push_back(std::abs(values[i]));
  }
  return StepFunction(std::move(s), std::move(v));
}

void NormSpec::validate() const {
  switch (kind) {
    case NormKind::Lebesgue:
      if (!(p >= 1)) throw std::invalid_argument("NormSpec: Lebesgue needs p >= 1");
      break;
    case NormKind::LorentzL1:
    case NormKind::LorentzWeak:
      if (!(sigma > 1)) throw std::invalid_argument("NormSpec: Lorentz spaces need sigma > 1");
      break;
    case NormKind::ExpOrlicz:
      if (!(sigma > 0) || !(V > 0)) throw std::invalid_argument("NormSpec: exp L^sigma needs sigma > 0 and V > 0");
      break;
    case NormKind::ZygmundLog:
      if (!(p >= 1) || !(V > 0) || !(sigma > -1)) throw std::invalid_argument("NormSpec: L^p(log L)^sigma needs p >= 1, sigma > -1, V > 0");
      break;
  }
}

std::string NormSpec::describe() const {
  auto num = [](double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return std::string(buf);
  };
  switch (kind) {
    case NormKind::Lebesgue: return std::isinf(p) ? "L^inf" : "L^" + num(p);
    case NormKind::LorentzL1: return "L^{" + num(sigma) + ",1}";
    case NormKind::LorentzWeak: return "L^{" + num(sigma) + ",inf}";
    case NormKind::ExpOrlicz: return "exp L^" + num(sigma);
    case NormKind::ZygmundLog: return "L^" + num(p) + "(log L)^" + num(sigma);
  }
  return "";
}

double norm(const StepFunction& phi, const NormSpec& spec) {
  spec.validate();
  const auto& s = phi.breaks();
  const auto& v = phi.values();
  if (spec.measure_bounded() && phi.support() > spec.V * (1 + 1e-12))
    throw std::invalid_argument("norm: support " + std::to_string(phi.support()) + " exceeds the total measure " + std::to_string(spec.V));
  double acc = 0.0, lo = 0.0;
  switch (spec.kind) {
    case NormKind::Lebesgue:
      if (std::isinf(spec.p)) return v.empty() ? 0.0 : v.front();
      for (std::size_t i = 0; i < v.size(); ++i) {
        acc += std::pow(v[i], spec.p) * (s[i] - lo);
        lo = s[i];
      }
      return std::pow(acc, 1.0 / spec.p);
    case NormKind::LorentzL1:
      for (std::size_t i = 0; i < v.size(); ++i) {
        acc += v[i] * spec.sigma * (std::pow(s[i], 1.0 / spec.sigma) - std::pow(lo, 1.0 / spec.sigma));
        lo = s[i];
      }
      return acc;
    case NormKind::LorentzWeak:
      for (std::size_t i = 0; i < v.size(); ++i) acc = std::max(acc, v[i] * std::pow(s[i], 1.0 / spec.sigma));
      return acc;
    case NormKind::ExpOrlicz:
      for (std::size_t i = 0; i < v.size(); ++i)
        acc = std::max(acc, v[i] * std::pow(1.0 + std::log(spec.V / std::min(s[i], spec.V)), -1.0 / spec.sigma));
      return acc;
    case NormKind::ZygmundLog: {
      // int_a^b (1 + log(V/s))^sigma ds = V e [G(sigma+1, u_b) - G(sigma+1, u_a)], u = 1 + log(V/s)
      double a1 = spec.sigma + 1.0;
      auto upper = [&](double x) {
        if (x <= 0.0) return 0.0;
        double u = 1.0 + std::log(spec.V / std::min(x, spec.V));
        return boost::math::tgamma(a1, u);
      };
      for (std::size_t i = 0; i < v.size(); ++i) {
        double w = spec.V * std::exp(1.0) * (upper(s[i]) - upper(lo));
        acc += std::pow(v[i], spec.p) * w;
        lo = s[i];
      }
      return std::pow(acc, 1.0 / spec.p);
    }
  }
  return 0.0;
}

double k_functional(const StepFunction& phi, double s) {
  if (!(s > 0)) throw std::invalid_argument("k_functional: s must be positive");
  return phi.partial_integral(s);
}

Reduced reduced_from_string(const std::string& name) {
  if (name == "R1") return Reduced::R1;
  if (name == "R2") return Reduced::R2;
  if (name == "R3") return Reduced::R3;
  if (name == "R4") return Reduced::R4;
  if (name == "R5") return Reduced::R5;
  throw std::invalid_argument("unknown reduced operator '" + name + "'");
}

std::string to_string(Reduced r) {
  static const char* names[] = {"R1", "R2", "R3", "R4", "R5"};
  return names[static_cast<int>(r)];
}

void HardyParams::validate(Reduced kind) const {
  if (n < 2) throw std::invalid_argument("HardyParams: n must be at least 2");
  if (!(m - h > 0 && m - h < n)) throw std::invalid_argument("HardyParams: need 0 < m - h < n");
  if (!(alpha > n - 1 && alpha <= n)) throw std::invalid_argument("HardyParams: need n - 1 < alpha <= n");
  if ((kind == Reduced::R3 || kind == Reduced::R4) && !(k >= 1 && k <= m - h - 1))
    throw std::invalid_argument("HardyParams: R3/R4 need 1 <= k <= m - h - 1");
}

double reduced_op(Reduced kind, const StepFunction& phi, double s, const HardyParams& p) {
  p.validate(kind);
  if (!(s > 0)) throw std::invalid_argument("reduced_op: s must be positive");
  const double n = p.n, a = p.alpha, mh = p.m - p.h;
  switch (kind) {
    case Reduced::R1: return std::pow(s, -(n - mh) / a) * phi.partial_integral(std::pow(s, n / a));
    case Reduced::R2: return phi.weighted_tail(std::pow(s, n / a), (n - mh) / n);
    case Reduced::R3: return std::pow(s, -(n - p.k - 1) / a) * phi.partial_integral(std::pow(s, (n - 1) / a));
    case Reduced::R4: return phi.weighted_tail(std::pow(s, (n - 1) / a), (n - p.k - 1) / (n - 1));
    case Reduced::R5: return std::pow(s, -(n - 1) / a) * phi.partial_integral(std::pow(s, (n - 1) / a));
  }
  return 0.0;
}

double reduced_scale(Reduced kind, const StepFunction& phi, const HardyParams& p) {
  double e = kind == Reduced::R1 || kind == Reduced::R2 ? p.alpha / p.n : p.alpha / (p.n - 1);
  return std::pow(phi.support(), e);
}

double reduced_norm(Reduced kind, const StepFunction& phi, const NormSpec& target, const HardyParams& p, int per_decade) {
  if (phi.empty()) return 0.0;
  if (per_decade < 1) throw std::invalid_argument("reduced_norm: per_decade must be positive");
  double scale = reduced_scale(kind, phi, p);
  double lo = scale * 1e-4, hi = scale * 10.0;
  if (target.measure_bounded()) {
    hi = std::min(hi, target.V);
    lo = std::min(lo, hi * 1e-5);
  }
  int cells = std::max(1, static_cast<int>(std::ceil(per_decade * std::log10(hi / lo))));
  std::vector<double> vals, widths;
  double prev = lo;
  for (int j = 1; j <= cells; ++j) {
    double next = lo * std::pow(hi / lo, static_cast<double>(j) / cells);
    vals.push_back(reduced_op(kind, phi, std::sqrt(prev * next), p));
    widths.push_back(next - prev);
    prev = next;
  }
  return norm(rearrange(vals, widths), target);
}

HardyFit hardy_constant_fit(Reduced kind, const NormSpec& source, const NormSpec& target, const std::vector<StepFunction>& tests,
                            const HardyParams& p, int per_decade) {
  if (tests.empty()) throw std::invalid_argument("hardy_constant_fit: empty test set");
  p.validate(kind);
  HardyFit fit;
  for (std::size_t i = 0; i < tests.size(); ++i) {
    double den = norm(tests[i], source);
    if (!(den > 0)) {
      ++fit.skipped;
      fit.warnings.push_back("test function " + std::to_string(i) + " has zero source norm; skipped");
      continue;
    }
    double r = reduced_norm(kind, tests[i], target, p, per_decade) / den;
    fit.ratios.push_back(r);
    fit.constant = std::max(fit.constant, r);
  }
  return fit;
}

std::vector<StepFunction> hardy_test_set(std::size_t count, std::uint64_t seed) {
  std::vector<StepFunction> out;
  Rng base(seed);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng = base.split(i);
    int K = 1 + static_cast<int>(rng.uniform() * 12);
    std::vector<double> s(K), v(K);
    for (int j = 0; j < K; ++j) {
      s[j] = std::pow(10.0, rng.uniform(-3.0, 1.0));
      v[j] = std::exp(rng.normal());
    }
    std::sort(s.begin(), s.end());
    std::sort(v.begin(), v.end(), std::greater<>());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    v.resize(s.size());
    out.emplace_back(s, v);
  }
  return out;
}

StepFunction spike(double eps) {
  if (!(eps > 0)) throw std::invalid_argument("spike: width must be positive");
  return StepFunction({eps}, {1.0});
}

}  // namespace sobolab::rearrange
