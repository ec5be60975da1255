#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace sobolab {

inline constexpr const char* kVersion = "0.3.0";

/// Absolute geometric tolerance (domains are normalized to unit diameter scale).
inline constexpr double kGeomTol = 1e-9;

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }
  friend Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
  friend Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
  friend Vec3 operator*(double s, Vec3 a) { return a *= s; }
  friend Vec3 operator*(Vec3 a, double s) { return a *= s; }
  friend Vec3 operator-(Vec3 a) { return a *= -1.0; }
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline Vec3 normalized(const Vec3& a) {
  double l = norm(a);
  if (l == 0.0) throw std::invalid_argument("normalize: zero vector");
  return a * (1.0 / l);
}

/// Two unit vectors completing `a` (unit) to an orthonormal frame.
void orthonormal_complement(const Vec3& a, Vec3& e1, Vec3& e2);

/// Volume of the unit ball in R^n.
double unit_ball_volume(int n);
/// H^{n-1}(S^{n-1}) = n * omega_n.
inline double sphere_area(int n) { return n * unit_ball_volume(n); }

/// Counter-based generator: the k-th draw of stream s under seed is a pure
/// function of (seed, s, k), so streams can be split and consumed in any order.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

  Rng split(std::uint64_t key) const;

  std::uint64_t next_u64();
  /// Uniform on the open interval (0,1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  /// Uniform direction on S^{n-1} (normalized Gaussian vector).
  Vec3 direction(int n);

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x);

/// Gauss-Legendre rule on [-1,1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int npts);

/// Integral of f over [a,b] with an npts-point Gauss-Legendre rule.
double gauss_integrate(const std::function<double(double)>& f, double a, double b, int npts);

/// Runs body(i) for i in [0,n). Work is split into contiguous blocks; results
/// must be written by index so the outcome is independent of `threads`.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, int threads = 0);

int default_threads();
void set_default_threads(int threads);

}  // namespace sobolab
