#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sobolab::rearrange {

/// Nonincreasing nonnegative step function on (0, inf): value v_i on
/// [s_{i-1}, s_i), s_0 = 0, zero beyond the support s_K.
class StepFunction {
 public:
  StepFunction() = default;
  /// Canonicalizes: drops empty and zero steps, merges equal neighbours.
  /// Throws unless breaks are increasing and values nonincreasing.
  StepFunction(std::vector<double> breaks, std::vector<double> values);

  const std::vector<double>& breaks() const { return s_; }  // s_1..s_K
  const std::vector<double>& values() const { return v_; }
  std::size_t steps() const { return v_.size(); }
  bool empty() const { return v_.empty(); }
  double support() const { return v_.empty() ? 0.0 : s_.back(); }
  double operator()(double s) const;
  double integral() const;
  /// int_0^x phi.
  double partial_integral(double x) const;
  /// int_a^inf r^{-c} phi(r) dr (c < 1 when a = 0).
  double weighted_tail(double a, double c) const;
  StepFunction scaled(double lambda) const;

 private:
  std::vector<double> s_, v_;
};

/// Decreasing rearrangement of |values| with respect to the given weights.
StepFunction rearrange(const std::vector<double>& values, const std::vector<double>& weights);

enum class NormKind { Lebesgue, LorentzL1, LorentzWeak, ExpOrlicz, ZygmundLog };

struct NormSpec {
  NormKind kind = NormKind::Lebesgue;
  double p = 1.0;
  double sigma = 1.0;
  double V = 0.0;  // total measure for ExpOrlicz / ZygmundLog

  static NormSpec lebesgue(double p) { return {NormKind::Lebesgue, p, 1.0, 0.0}; }
  static NormSpec lorentz_l1(double sigma) { return {NormKind::LorentzL1, 1.0, sigma, 0.0}; }
  static NormSpec lorentz_weak(double sigma) { return {NormKind::LorentzWeak, 1.0, sigma, 0.0}; }
  static NormSpec exp_orlicz(double sigma, double V) { return {NormKind::ExpOrlicz, 1.0, sigma, V}; }
  static NormSpec zygmund_log(double p, double sigma, double V) { return {NormKind::ZygmundLog, p, sigma, V}; }

  void validate() const;
  bool measure_bounded() const { return kind == NormKind::ExpOrlicz || kind == NormKind::ZygmundLog; }
  std::string describe() const;
};

/// Lebesgue: (sum v^p ds)^{1/p}; L^{s,1}: int phi s^{1/sigma-1}; L^{s,inf}:
/// max v_i s_i^{1/sigma}; exp L^sigma: sup (1+log(V/s))^{-1/sigma} phi;
/// L^p(log L)^sigma: ||(1+log(V/s))^{sigma/p} phi||_{L^p(0,V)}.
double norm(const StepFunction& phi, const NormSpec& spec);

/// K(phi, s; L^1, L^inf) = int_0^s phi.
double k_functional(const StepFunction& phi, double s);

enum class Reduced { R1, R2, R3, R4, R5 };
Reduced reduced_from_string(const std::string& name);
std::string to_string(Reduced r);

struct HardyParams {
  int n = 2, m = 1, h = 0, k = 1;
  double alpha = 2.0;
  void validate(Reduced kind) const;
};

/// R1: s^{-(n-m+h)/a} int_0^{s^{n/a}} phi;  R2: int_{s^{n/a}}^inf r^{-(n-m+h)/n} phi;
/// R3: s^{-(n-k-1)/a} int_0^{s^{(n-1)/a}} phi;  R4: int_{s^{(n-1)/a}}^inf r^{-(n-k-1)/(n-1)} phi;
/// R5: s^{-(n-1)/a} int_0^{s^{(n-1)/a}} phi.
double reduced_op(Reduced kind, const StepFunction& phi, double s, const HardyParams& p);

/// Support of reduced_op in s: support^{a/n} for R1, R2 and support^{a/(n-1)} otherwise.
double reduced_scale(Reduced kind, const StepFunction& phi, const HardyParams& p);

/// Target norm of s -> reduced_op(phi, s) sampled on a log grid of
/// `per_decade` points per decade over [scale 1e-4, scale 10] (clipped at V
/// for measure-bounded targets), rearranged with the cell widths as weights.
double reduced_norm(Reduced kind, const StepFunction& phi, const NormSpec& target, const HardyParams& p, int per_decade = 200);

struct HardyFit {
  double constant = 0.0;
  std::vector<double> ratios;
  std::size_t skipped = 0;
  std::vector<std::string> warnings;
};

/// max over the test set of ||R phi||_target / ||phi||_source.
HardyFit hardy_constant_fit(Reduced kind, const NormSpec& source, const NormSpec& target, const std::vector<StepFunction>& tests,
                            const HardyParams& p, int per_decade = 200);

/// Random nonincreasing step functions (log-uniform breaks in [1e-3, 10]).
/// The first `count` members do not depend on larger counts.
std::vector<StepFunction> hardy_test_set(std::size_t count, std::uint64_t seed);

/// chi_{(0, eps)}.
StepFunction spike(double eps);

}  // namespace sobolab::rearrange
