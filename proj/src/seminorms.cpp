#include "sobolab/seminorms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "sobolab/jet.hpp"

namespace sobolab::seminorms {

namespace {

double bbox_diagonal(const std::vector<Vec3>& pts) {
  if (pts.empty()) return 0.0;
  Vec3 lo = pts.front(), hi = pts.front();
  for (const auto& p : pts) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
  }
  return norm(hi - lo);
}

}  // namespace

PairDifference::PairDifference(const fields::FieldFn& u, const Cloud& cloud, int k, int j)
    : k_(k), j_(j), n_(cloud.n), x_(cloud.points), w_(cloud.weights) {
  if (k < 0 || (j != 0 && j != 1) || (k == 0 && j == 0))
    throw std::invalid_argument("pair_functional: need (k, j) != (0, 0) with j in {0, 1}");
  if (u.dim() != cloud.n) throw std::invalid_argument("pair_functional: field and cloud dimensions differ");
  const int order = k - 1 + j;
  if (u.max_order() < order) throw std::invalid_argument("pair_functional: field lacks derivatives of order " + std::to_string(order));
  const std::size_t N = x_.size();
  thr_ = 1e-9 * bbox_diagonal(x_);

  if (k == 0) {
    abs_u_.resize(N);
    parallel_for(N, [&](std::size_t i) { abs_u_[i] = std::abs(u.value(x_[i])); });
    row_max_ = abs_u_;
    return;
  }

  const JetSpace& sp = JetSpace::get(n_, order);
  stride_ = sp.size();
  deriv_.assign(N * stride_, 0.0);
  parallel_for(N, [&](std::size_t i) {
    Jet jt = u.jet(x_[i], order);
    for (std::size_t b = 0; b < stride_; ++b) deriv_[i * stride_ + b] = jt.derivative(b);
  });

  alpha_ = combinat::enumerate_multiindices(n_, k - 1);
  for (const auto& a : alpha_) {
    coef_.push_back(static_cast<double>(combinat::interp_coeff(a, k)));
    sign_.push_back(a.order() % 2 == 0 ? 1 : -1);
  }
  const int comps = j == 0 ? 1 : n_;
  index_.assign(comps, std::vector<int>(alpha_.size()));
  for (int c = 0; c < comps; ++c)
    for (std::size_t a = 0; a < alpha_.size(); ++a) {
      combinat::MultiIndex b = alpha_[a];
      if (j == 1) b.entries[c] += 1;
      index_[c][a] = sp.index_of(b);
    }

  // D vanishes on pairs of points whose stored derivatives are all zero
  std::vector<char> null(N);
  for (std::size_t i = 0; i < N; ++i)
    null[i] = std::all_of(deriv_.begin() + i * stride_, deriv_.begin() + (i + 1) * stride_, [](double v) { return v == 0.0; });

  row_max_.assign(N, 0.0);
  std::vector<std::size_t> skips(N, 0);
  if (k == 1 && j == 0) {
    // |u(y) - u(x)| / |y - x|; the same value as eval, without the multi-index loop
    const double c0 = coef_[0];
    parallel_for(N, [&](std::size_t a) {
      double m = 0.0;
      const double ua = deriv_[a];
      for (std::size_t b = 0; b < N; ++b) {
        if (b == a) continue;
        double r = norm(x_[b] - x_[a]);
        if (r < thr_) {
          if (b > a) ++skips[a];
          continue;
        }
        if (null[a] && null[b]) continue;
        m = std::max(m, std::abs(c0 * 1.0 * (deriv_[b] - ua)) * (1.0 / r));
      }
      row_max_[a] = m;
    });
    skipped_ = std::accumulate(skips.begin(), skips.end(), std::size_t{0});
    return;
  }
  parallel_for(N, [&](std::size_t a) {
    double m = 0.0;
    for (std::size_t b = 0; b < N; ++b) {
      if (b == a) continue;
      Vec3 d = x_[b] - x_[a];
      double r = norm(d);
      if (r < thr_) {
        if (b > a) ++skips[a];
        continue;
      }
      if (null[a] && null[b]) continue;
      m = std::max(m, eval(a, b, d, r));
    }
    row_max_[a] = m;
  });
  skipped_ = std::accumulate(skips.begin(), skips.end(), std::size_t{0});
}

double PairDifference::component(std::size_t a, std::size_t b, const Vec3& d, double scale, int comp) const {
  const double* da = &deriv_[a * stride_];
  const double* db = &deriv_[b * stride_];
  double s = 0.0;
  for (std::size_t t = 0; t < alpha_.size(); ++t) {
    int idx = index_[comp][t];
    s += coef_[t] * alpha_[t].monomial(d) * (sign_[t] * db[idx] - da[idx]);
  }
  return std::abs(s) * scale;
}

double PairDifference::operator()(std::size_t a, std::size_t b) const {
  if (a == b) return 0.0;
  if (k_ == 0) throw std::logic_error("PairDifference: pointwise case has no pairs");
  Vec3 d = x_[b] - x_[a];
  double r = norm(d);
  if (r < thr_) return 0.0;
  return eval(a, b, d, r);
}

double PairDifference::eval(std::size_t a, std::size_t b, const Vec3& d, double r) const {
  double inv = 1.0 / r, scale = inv;
  for (int e = 1; e < 2 * k_ - 1; ++e) scale *= inv;
  double sum = 0.0;
  for (std::size_t c = 0; c < index_.size(); ++c) sum += component(a, b, d, scale, static_cast<int>(c));
  return sum;
}

double PairDifference::max() const {
  return row_max_.empty() ? 0.0 : *std::max_element(row_max_.begin(), row_max_.end());
}

TwoPointTerms two_point_terms(const fields::FieldFn& u, const Vec3& x, const Vec3& y, int k) {
  if (k < 1) throw std::invalid_argument("two_point_terms: k must be positive");
  Vec3 d = y - x;
  double r = norm(d);
  if (r == 0.0) throw std::invalid_argument("two_point_terms: coincident points");
  const int n = u.dim();
  Jet jx = u.jet(x, k - 1), jy = u.jet(y, k - 1);
  const JetSpace& sp = JetSpace::get(n, k - 1);
  double scale = std::pow(r, 1 - 2 * k);
  TwoPointTerms out;
  for (const auto& a : combinat::enumerate_multiindices(n, k - 1)) {
    int idx = sp.index_of(a);
    double sign = a.order() % 2 == 0 ? 1.0 : -1.0;
    double c = static_cast<double>(combinat::interp_coeff(a, k)) * a.monomial(d) * scale;
    double ty = c * sign * jy.derivative(static_cast<std::size_t>(idx));
    double tx = -c * jx.derivative(static_cast<std::size_t>(idx));
    out.sum += ty + tx;
    out.max_term = std::max({out.max_term, std::abs(ty), std::abs(tx)});
  }
  return out;
}

std::vector<double> feasible_upper_gradient(const PairDifference& D) {
  if (D.pointwise()) return D.values();
  std::vector<double> g = D.row_max();
  for (double& v : g) v *= 0.5;
  return g;
}

namespace {

// Maximum-weight transportation sum D_ij x_ij, sum_j x_ij <= w_i, sum_i x_ij <= w_j,
// as a min-cost flow s -> L_i -> R_j -> t with a free bypass s -> t. Dijkstra with
// potentials on the dense residual graph; stops once no negative s-t path remains.
OptimalGradient transport_lp(const std::vector<double>& d, const std::vector<double>& w) {
  const std::size_t N = w.size();
  const double wsum = std::accumulate(w.begin(), w.end(), 0.0);
  const double eps = 1e-14 * std::max(wsum, 1e-300);
  const double dmax = d.empty() ? 0.0 : *std::max_element(d.begin(), d.end());

  // nodes: 0 = s, 1..N = L, N+1..2N = R, 2N+1 = t
  const std::size_t V = 2 * N + 2, S = 0, T = 2 * N + 1;
  auto L = [](std::size_t i) { return 1 + i; };
  auto R = [N](std::size_t j) { return 1 + N + j; };
  std::vector<double> fs(N, 0.0), ft(N, 0.0), x(N * N, 0.0);

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> pi(V, 0.0);
  for (std::size_t j = 0; j < N; ++j) {
    double m = 0.0;
    for (std::size_t i = 0; i < N; ++i) m = std::min(m, -d[i * N + j]);
    pi[R(j)] = m;
    pi[T] = std::min(pi[T], m);
  }

  OptimalGradient out;
  std::vector<double> dist(V);
  std::vector<std::size_t> pred(V);
  std::vector<char> done(V);
  const std::size_t cap_iter = 50 * N + 100;
  for (;;) {
    std::fill(dist.begin(), dist.end(), inf);
    std::fill(done.begin(), done.end(), 0);
    dist[S] = 0.0;
    auto relax = [&](std::size_t u, std::size_t v, double cost) {
      if (done[v]) return;
      double nd = dist[u] + cost + pi[u] - pi[v];
      if (nd < dist[v]) {
        dist[v] = nd;
        pred[v] = u;
      }
    };
    for (std::size_t it = 0; it < V; ++it) {
      std::size_t u = V;
      double best = inf;
      for (std::size_t v = 0; v < V; ++v)
        if (!done[v] && dist[v] < best) {
          best = dist[v];
          u = v;
        }
      if (u == V) break;
      done[u] = 1;
      if (u == S) {
        for (std::size_t i = 0; i < N; ++i)
          if (w[i] - fs[i] > eps) relax(S, L(i), 0.0);
        relax(S, T, 0.0);
      } else if (u <= N) {
        std::size_t i = u - 1;
        for (std::size_t j = 0; j < N; ++j)
          if (d[i * N + j] > 0.0) relax(u, R(j), -d[i * N + j]);
        if (fs[i] > eps) relax(u, S, 0.0);
      } else if (u < T) {
        std::size_t j = u - 1 - N;
        for (std::size_t i = 0; i < N; ++i)
          if (x[i * N + j] > eps) relax(u, L(i), d[i * N + j]);
        if (w[j] - ft[j] > eps) relax(u, T, 0.0);
      } else {
        for (std::size_t j = 0; j < N; ++j)
          if (ft[j] > eps) relax(T, R(j), 0.0);
      }
    }
    for (std::size_t v = 0; v < V; ++v)
      if (dist[v] < inf) pi[v] += dist[v];
    // pi now holds true distances from s; pi[t] <= 0 through the bypass
    if (pi[T] - pi[S] >= -1e-12 * (1.0 + dmax) || pred[T] == S) break;
    if (++out.augmentations > cap_iter) throw std::runtime_error("optimal_upper_gradient: no convergence");

    double push = inf;
    for (std::size_t v = T; v != S; v = pred[v]) {
      std::size_t u = pred[v];
      if (u == S) push = std::min(push, w[v - 1] - fs[v - 1]);
      else if (v == T) push = std::min(push, w[u - 1 - N] - ft[u - 1 - N]);
      else if (v == S) push = std::min(push, fs[u - 1]);
      else if (u > N && u < T && v <= N) push = std::min(push, x[(v - 1) * N + (u - 1 - N)]);
      else if (u == T) push = std::min(push, ft[v - 1 - N]);
    }
    for (std::size_t v = T; v != S; v = pred[v]) {
      std::size_t u = pred[v];
      if (u == S) fs[v - 1] += push;
      else if (v == T) ft[u - 1 - N] += push;
      else if (v == S) fs[u - 1] -= push;
      else if (u <= N && v > N) x[(u - 1) * N + (v - 1 - N)] += push;
      else if (u > N && u < T && v <= N) x[(v - 1) * N + (u - 1 - N)] -= push;
      else if (u == T) ft[v - 1 - N] -= push;
    }
  }

  out.g.assign(N, 0.0);
  for (std::size_t i = 0; i < N; ++i) {
    double a = std::max(0.0, pi[L(i)] - pi[S]);
    double b = std::max(0.0, pi[T] - pi[R(i)]);
    out.g[i] = 0.5 * (a + b);
    out.objective += w[i] * out.g[i];
  }
  double p = 0.0;
  for (std::size_t q = 0; q < N * N; ++q) p += d[q] * x[q];
  out.primal = 0.5 * p;
  return out;
}

}  // namespace

OptimalGradient optimal_upper_gradient(const PairDifference& D, double r) {
  if (r != 1.0 && !std::isinf(r)) throw std::invalid_argument("optimal_upper_gradient: r must be 1 or infinity");
  if (D.size() > kOptimalLimit)
    throw std::invalid_argument("optimal_upper_gradient: cloud of " + std::to_string(D.size()) + " points exceeds " +
                                std::to_string(kOptimalLimit) + "; use feasible_upper_gradient");
  OptimalGradient out;
  if (D.pointwise()) {
    out.g = D.values();
    for (std::size_t i = 0; i < out.g.size(); ++i)
      out.objective = std::isinf(r) ? std::max(out.objective, out.g[i]) : out.objective + D.weights()[i] * out.g[i];
    out.primal = out.objective;
    return out;
  }
  if (std::isinf(r)) {
    out.objective = out.primal = 0.5 * D.max();
    out.g.assign(D.size(), out.objective);
    return out;
  }
  std::vector<double> d(D.size() * D.size(), 0.0);
  for (std::size_t i = 0; i < D.size(); ++i)
    for (std::size_t j = i + 1; j < D.size(); ++j) d[i * D.size() + j] = d[j * D.size() + i] = D(i, j);
  return transport_lp(d, D.weights());
}

OptimalGradient optimal_upper_gradient(const std::vector<double>& D, const std::vector<double>& weights, double r) {
  const std::size_t N = weights.size();
  if (D.size() != N * N) throw std::invalid_argument("optimal_upper_gradient: matrix size mismatch");
  if (r != 1.0 && !std::isinf(r)) throw std::invalid_argument("optimal_upper_gradient: r must be 1 or infinity");
  if (N > kOptimalLimit) throw std::invalid_argument("optimal_upper_gradient: too many points; use feasible_upper_gradient");
  for (std::size_t i = 0; i < N; ++i) {
    if (!(weights[i] > 0)) throw std::invalid_argument("optimal_upper_gradient: weights must be positive");
    if (D[i * N + i] != 0.0) throw std::invalid_argument("optimal_upper_gradient: diagonal must vanish");
    for (std::size_t j = 0; j < N; ++j)
      if (D[i * N + j] != D[j * N + i] || D[i * N + j] < 0) throw std::invalid_argument("optimal_upper_gradient: D must be symmetric and nonnegative");
  }
  if (std::isinf(r)) {
    OptimalGradient out;
    out.objective = out.primal = D.empty() ? 0.0 : 0.5 * *std::max_element(D.begin(), D.end());
    out.g.assign(N, out.objective);
    return out;
  }
  return transport_lp(D, weights);
}

double v_seminorm(const PairDifference& D, const rearrange::NormSpec& spec, Mode mode) {
  std::vector<double> g;
  if (mode == Mode::Feasible) {
    g = feasible_upper_gradient(D);
  } else {
    if (spec.kind != rearrange::NormKind::Lebesgue || (spec.p != 1.0 && !std::isinf(spec.p)))
      throw std::invalid_argument("v_seminorm: optimal mode needs L^1 or L^inf");
    g = optimal_upper_gradient(D, spec.p).g;
  }
  return rearrange::norm(rearrange::rearrange(g, D.weights()), spec);
}

double v_seminorm(const fields::FieldFn& u, const Cloud& cloud, int k, int j, const rearrange::NormSpec& spec, Mode mode) {
  return v_seminorm(PairDifference(u, cloud, k, j), spec, mode);
}

std::pair<int, int> seminorm_indices(int d) {
  if (d < 0) throw std::invalid_argument("seminorm_indices: negative order");
  return {(d + 1) / 2, d % 2 == 1 ? 0 : 1};
}

}  // namespace sobolab::seminorms
