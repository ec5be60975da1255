#include "sobolab/core.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <thread>

namespace sobolab {

void orthonormal_complement(const Vec3& a, Vec3& e1, Vec3& e2) {
  Vec3 t = std::abs(a.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  e1 = normalized(t - dot(t, a) * a);
  e2 = cross(a, e1);
}

double unit_ball_volume(int n) {
  return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng Rng::split(std::uint64_t key) const {
  return Rng(seed_, mix64(stream_ ^ mix64(key + 0x632be59bd9b4e019ULL)));
}

std::uint64_t Rng::next_u64() {
  std::uint64_t k = counter_++;
  return mix64(mix64(seed_ ^ 0xd1b54a32d192ed03ULL) ^ mix64(stream_) ^ mix64(k * 0xa0761d6478bd642fULL));
}

double Rng::uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal() {
  double u1 = uniform();
  double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Vec3 Rng::direction(int n) {
  for (;;) {
    Vec3 v{normal(), normal(), n == 3 ? normal() : 0.0};
    double l = norm(v);
    if (l > 1e-12) return v * (1.0 / l);
  }
}

namespace {

GaussRule compute_gauss(int n) {
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    double w = 2.0 / ((1.0 - z * z) * pp * pp);
    r.nodes[i] = -z;
    r.nodes[n - 1 - i] = z;
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  return r;
}

int g_threads = 1;

}  // namespace

const GaussRule& gauss_legendre(int npts) {
  if (npts < 1) throw std::invalid_argument("gauss_legendre: npts < 1");
  static std::mutex mu;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[npts];
  if (!slot) slot = std::make_unique<GaussRule>(compute_gauss(npts));
  return *slot;
}

double gauss_integrate(const std::function<double(double)>& f, double a, double b, int npts) {
  const GaussRule& g = gauss_legendre(npts);
  double half = 0.5 * (b - a), mid = 0.5 * (a + b), s = 0.0;
  for (int i = 0; i < npts; ++i) s += g.weights[i] * f(mid + half * g.nodes[i]);
  return s * half;
}

int default_threads() { return g_threads; }
void set_default_threads(int threads) { g_threads = std::max(1, threads); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, int threads) {
  int t = threads > 0 ? threads : g_threads;
  if (t <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::size_t nt = std::min<std::size_t>(t, n);
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errs(nt);
  for (std::size_t w = 0; w < nt; ++w) {
    pool.emplace_back([&, w] {
      std::size_t lo = n * w / nt, hi = n * (w + 1) / nt;
      try {
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        errs[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

}  // namespace sobolab
