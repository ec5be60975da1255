#include "sobolab/gallery.hpp"

#include <algorithm>

namespace sobolab::geometry {

namespace {

Vec3 up(int n) {
  Vec3 e{};
  e[n - 1] = 1.0;
  return e;
}

void require_decreasing(const std::vector<double>& v, const char* what, bool strict = true) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0)) throw std::invalid_argument(std::string(what) + ": entries must be positive");
    if (i > 0 && (strict ? v[i] >= v[i - 1] : v[i] > v[i - 1]))
      throw std::invalid_argument(std::string(what) + ": sequence must decrease");
  }
}

std::shared_ptr<RectPatch> rect(int n, Vec3 o, Vec3 e1, Vec3 e2, Vec3 nrm) {
  return std::make_shared<RectPatch>(n, o, e1, e2, nrm);
}

std::shared_ptr<RectPatch> graded_rect(int n, Vec3 o, Vec3 e1, Vec3 e2, Vec3 nrm, Vec3 focus, double min_len) {
  auto r = rect(n, o, e1, e2, nrm);
  double l1 = norm(e1), l2 = n == 3 ? norm(e2) : 1.0;
  double fu = dot(focus - o, e1) / (l1 * l1);
  double fv = n == 3 ? dot(focus - o, e2) / (l2 * l2) : 0.0;
  r->graded(fu, fv, std::min(1.0, min_len / std::max(l1, l2)));
  return r;
}

// Horizontal face {x_n = level} of the box [x0,x1] x [-y,y] minus square (n=3)
// or interval (n=2) holes of half width hw centred at (xc, 0); rects graded
// toward each hole.
void face_with_holes(int n, double level, double x0, double x1, double y, const std::vector<double>& xc,
                     const std::vector<double>& hw, const Vec3& nrm, const std::string& role, int k,
                     std::vector<TaggedPatch>& out) {
  auto at = [&](double x, double yy) {
    Vec3 p{};
    p[0] = x;
    if (n == 3) p[1] = yy;
    p[n - 1] = level;
    return p;
  };
  Vec3 ex{1, 0, 0}, ey = n == 3 ? Vec3{0, 1, 0} : Vec3{};
  double left = x0;
  for (std::size_t i = 0; i <= xc.size(); ++i) {
    double right = i < xc.size() ? xc[i] - hw[i] : x1;
    double lo_focus = i > 0 ? left : NAN, hi_focus = i < xc.size() ? right : NAN;
    double mid = 0.5 * (left + right);
    double min_len = 0.25 * std::min(i > 0 ? hw[i - 1] : 1.0, i < xc.size() ? hw[i] : 1.0);
    if (right > left) {
      // strip [left, right] x [-y, y], split so each half has one focus
      double cuts[3] = {left, mid, right};
      for (int s = 0; s < 2; ++s) {
        double a = cuts[s], b = cuts[s + 1];
        double f = s == 0 ? lo_focus : hi_focus;
        Vec3 o = at(a, -y), e1 = (b - a) * ex, e2 = (2 * y) * ey;
        if (std::isnan(f))
          out.push_back({role, k, rect(n, o, e1, e2, nrm)});
        else
          out.push_back({role, k, graded_rect(n, o, e1, e2, nrm, at(f, 0.0), min_len)});
      }
    }
    if (i < xc.size() && n == 3) {
      double a = xc[i] - hw[i], w = 2 * hw[i];
      out.push_back({role, k, graded_rect(n, at(a, -y), w * ex, (y - hw[i]) * ey, nrm, at(xc[i], -hw[i]), 0.25 * hw[i])});
      out.push_back({role, k, graded_rect(n, at(a, hw[i]), w * ex, (y - hw[i]) * ey, nrm, at(xc[i], hw[i]), 0.25 * hw[i])});
    }
    if (i < xc.size()) left = xc[i] + hw[i];
  }
}

// Side faces of the box [x0,x1] x [-y,y] x [z0,z1] (last coordinate vertical).
void box_sides(int n, double x0, double x1, double y, double z0, double z1, const std::string& role, int k,
               std::vector<TaggedPatch>& out) {
  Vec3 ex{1, 0, 0}, ey{0, 1, 0}, ez = up(n);
  auto at = [&](double x, double yy, double z) {
    Vec3 p{};
    p[0] = x;
    if (n == 3) p[1] = yy;
    p[n - 1] = z;
    return p;
  };
  double h = z1 - z0;
  if (n == 2) {
    out.push_back({role, k, rect(2, at(x0, 0, z0), h * ez, {}, {-1, 0, 0})});
    out.push_back({role, k, rect(2, at(x1, 0, z0), h * ez, {}, {1, 0, 0})});
    return;
  }
  out.push_back({role, k, rect(3, at(x0, -y, z0), (2 * y) * ey, h * ez, {-1, 0, 0})});
  out.push_back({role, k, rect(3, at(x1, -y, z0), (2 * y) * ey, h * ez, {1, 0, 0})});
  out.push_back({role, k, rect(3, at(x0, -y, z0), (x1 - x0) * ex, h * ez, {0, -1, 0})});
  out.push_back({role, k, rect(3, at(x0, y, z0), (x1 - x0) * ex, h * ez, {0, 1, 0})});
}

std::vector<double> get_vec(const json& p, const char* key) {
  if (!p.contains(key)) return {};
  return p.at(key).get<std::vector<double>>();
}

Vec3 get_point(const json& p, const char* key, Vec3 def) {
  if (!p.contains(key)) return def;
  auto v = p.at(key).get<std::vector<double>>();
  Vec3 r{};
  for (std::size_t i = 0; i < v.size() && i < 3; ++i) r[static_cast<int>(i)] = v[i];
  return r;
}

}  // namespace

double CuspRoom::radius(double t) const { return std::pow(t + eps, beta); }

CuspChainLayout cusp_chain_layout(const CuspChainParams& p) {
  if (p.n != 2 && p.n != 3) throw std::invalid_argument("cusp_chain: n must be 2 or 3");
  if (p.h.empty() || p.h.size() != p.eps.size()) throw std::invalid_argument("cusp_chain: h and eps must have equal nonzero length");
  if (!(p.beta > 0) || p.resolution < 1 || !(p.corridor_factor > 0)) throw std::invalid_argument("cusp_chain: invalid parameters");
  require_decreasing(p.h, "cusp_chain h");
  require_decreasing(p.eps, "cusp_chain eps");
  CuspChainLayout L;
  L.params = p;
  double z = 0.0;
  for (std::size_t k = 0; k < p.h.size(); ++k) {
    if (!(p.eps[k] < p.h[k])) throw std::invalid_argument("cusp_chain: need eps_k < h_k");
    CuspRoom r;
    r.h = p.h[k];
    r.eps = p.eps[k];
    r.beta = p.beta;
    r.corridor_lo = z;
    r.corridor_radius = std::pow(p.eps[k], p.beta);
    r.z = z + p.corridor_factor * p.h[k];
    L.rooms.push_back(r);
    z = r.z + r.h;
  }
  return L;
}

Domain cusp_chain(const CuspChainParams& p) {
  CuspChainLayout L = cusp_chain_layout(p);
  const int n = p.n;
  const Vec3 e = up(n);
  const double ov = kGalleryOverlap;
  std::vector<CsgPtr> leaves;
  std::vector<Piece> pieces;
  std::vector<TaggedPatch> patches;
  for (std::size_t k = 0; k < L.rooms.size(); ++k) {
    const CuspRoom& r = L.rooms[k];
    int kk = static_cast<int>(k) + 1;
    double cl = r.z - r.corridor_lo;
    // corridor H_k
    double lo = k == 0 ? r.corridor_lo : r.corridor_lo - ov;
    auto cor = std::make_shared<Frustum>(n, lo * e, e, r.z + ov - lo, r.corridor_radius, r.corridor_radius);
    leaves.push_back(leaf(cor));
    pieces.push_back({"corridor", kk, cor});
    Frustum cor_exact(n, r.corridor_lo * e, e, cl, r.corridor_radius, r.corridor_radius);
    patches.push_back({"corridor", kk, std::make_shared<LateralPatch>(cor_exact)});
    if (k == 0) patches.push_back({"corridor_cap", kk, std::make_shared<AnnulusPatch>(n, r.corridor_lo * e, -e, 0.0, r.corridor_radius)});
    // room Omega_k as stacked frusta
    auto rad = [&](double t) { return r.radius(t); };
    for (int i = 0; i < p.resolution; ++i) {
      double t0 = r.h * i / p.resolution, t1 = r.h * (i + 1) / p.resolution;
      double r0 = rad(t0), r1 = rad(t1);
      double t1x = i + 1 < p.resolution ? t1 + ov : t1;
      double r1x = r0 + (r1 - r0) * (t1x - t0) / (t1 - t0);
      auto slice = std::make_shared<Frustum>(n, (r.z + t0) * e, e, t1x - t0, r0, r1x);
      leaves.push_back(leaf(slice));
      pieces.push_back({"room", kk, slice});
      patches.push_back({"room", kk, std::make_shared<LateralPatch>(Frustum(n, (r.z + t0) * e, e, t1 - t0, r0, r1))});
    }
    double r_in = k + 1 < L.rooms.size() ? L.rooms[k + 1].corridor_radius : 0.0;
    patches.push_back({"room_top", kk, std::make_shared<AnnulusPatch>(n, (r.z + r.h) * e, e, r_in, rad(r.h))});
  }
  Domain d(n, csg_union(leaves));
  d.set_pieces(std::move(pieces));
  d.set_patches(std::move(patches));
  json rooms = json::array();
  for (const auto& r : L.rooms)
    rooms.push_back({{"z", r.z}, {"h", r.h}, {"eps", r.eps}, {"corridor_lo", r.corridor_lo}, {"corridor_radius", r.corridor_radius}});
  d.meta = {{"gallery", "cusp_chain"},
            {"params", {{"n", n}, {"beta", p.beta}, {"h", p.h}, {"eps", p.eps}, {"resolution", p.resolution}, {"corridor_factor", p.corridor_factor}}},
            {"rooms", rooms}};
  return d;
}

RoomsLayout rooms_layout(const RoomsParams& p) {
  if (p.n != 2 && p.n != 3) throw std::invalid_argument("rooms_corridors: n must be 2 or 3");
  std::size_t K = p.a.size();
  if (K == 0 || p.b.size() != K || p.c.size() != K || (!p.d.empty() && p.d.size() != K))
    throw std::invalid_argument("rooms_corridors: a, b, c (and d) must have equal nonzero length");
  for (double v : p.a)
    if (!(v > 0)) throw std::invalid_argument("rooms_corridors: a must be positive");
  require_decreasing(p.b, "rooms_corridors b", false);
  require_decreasing(p.c, "rooms_corridors c");
  RoomsLayout L;
  L.params = p;
  if (L.params.d.empty())
    for (double c : p.c) L.params.d.push_back(c * c * c);
  for (std::size_t k = 0; k < K; ++k)
    if (!(L.params.d[k] > 0 && L.params.d[k] < p.a[k])) throw std::invalid_argument("rooms_corridors: need 0 < d_k < a_k");
  double amax = *std::max_element(p.a.begin(), p.a.end()), gap = 0.5 * amax;
  double S = 0.0;
  for (double a : p.a) S += a;
  S += gap * static_cast<double>(K - 1);
  double x = -S / 2;
  for (std::size_t k = 0; k < K; ++k) {
    L.x_left.push_back(x);
    L.neck_center.push_back(x + p.a[k] / 2);
    x += p.a[k] + gap;
  }
  L.base_x = std::max(1.0, S / 2 + gap);
  L.base_y = std::max(1.0, amax / 2 + gap);
  return L;
}

Domain rooms_corridors(const RoomsParams& p) {
  RoomsLayout L = rooms_layout(p);
  const auto& q = L.params;
  const int n = p.n;
  const double ov = kGalleryOverlap;
  const Vec3 e = up(n);
  auto box = [&](double x0, double x1, double hy, double z0, double z1) {
    Vec3 lo{}, hi{};
    lo[0] = x0;
    hi[0] = x1;
    if (n == 3) {
      lo[1] = -hy;
      hi[1] = hy;
    }
    lo[n - 1] = z0;
    hi[n - 1] = z1;
    return std::make_shared<Box>(n, lo, hi);
  };
  std::vector<CsgPtr> leaves;
  std::vector<Piece> pieces;
  std::vector<TaggedPatch> patches;
  auto base = box(-L.base_x, L.base_x, L.base_y, -1.0, 0.0);
  leaves.push_back(leaf(base));
  pieces.push_back({"base", 0, base});
  std::vector<double> hw;
  for (double d : q.d) hw.push_back(d / 2);
  // base boundary
  {
    Vec3 o{};
    o[0] = -L.base_x;
    if (n == 3) o[1] = -L.base_y;
    o[n - 1] = -1.0;
    Vec3 ex{2 * L.base_x, 0, 0}, ey = n == 3 ? Vec3{0, 2 * L.base_y, 0} : Vec3{};
    patches.push_back({"base", 0, rect(n, o, ex, ey, -e)});
    box_sides(n, -L.base_x, L.base_x, L.base_y, -1.0, 0.0, "base", 0, patches);
    face_with_holes(n, 0.0, -L.base_x, L.base_x, L.base_y, L.neck_center, hw, e, "base", 0, patches);
  }
  for (std::size_t k = 0; k < q.a.size(); ++k) {
    int kk = static_cast<int>(k) + 1;
    double xc = L.neck_center[k], c = q.c[k], b = q.b[k], a = q.a[k];
    auto neck = box(xc - hw[k], xc + hw[k], hw[k], -ov, c + ov);
    auto room = box(L.x_left[k], L.x_left[k] + a, a / 2, c, c + b);
    leaves.push_back(leaf(neck));
    leaves.push_back(leaf(room));
    pieces.push_back({"neck", kk, neck});
    pieces.push_back({"room", kk, room});
    box_sides(n, xc - hw[k], xc + hw[k], hw[k], 0.0, c, "neck", kk, patches);
    box_sides(n, L.x_left[k], L.x_left[k] + a, a / 2, c, c + b, "room", kk, patches);
    face_with_holes(n, c, L.x_left[k], L.x_left[k] + a, a / 2, {xc}, {hw[k]}, -e, "room", kk, patches);
    Vec3 o{};
    o[0] = L.x_left[k];
    if (n == 3) o[1] = -a / 2;
    o[n - 1] = c + b;
    patches.push_back({"room_top", kk, rect(n, o, {a, 0, 0}, n == 3 ? Vec3{0, a, 0} : Vec3{}, e)});
  }
  Domain d(n, csg_union(leaves));
  d.set_pieces(std::move(pieces));
  d.set_patches(std::move(patches));
  d.meta = {{"gallery", "rooms_corridors"},
            {"params", {{"n", n}, {"a", q.a}, {"b", q.b}, {"c", q.c}, {"d", q.d}}},
            {"x_left", L.x_left},
            {"base_half_extent", {L.base_x, L.base_y}}};
  return d;
}

BallChainLayout ball_chain_layout(const BallChainParams& p) {
  if (p.n != 2 && p.n != 3) throw std::invalid_argument("ball_chain: n must be 2 or 3");
  if (p.delta.empty() || p.delta.size() != p.eps.size()) throw std::invalid_argument("ball_chain: delta and eps must have equal nonzero length");
  require_decreasing(p.delta, "ball_chain delta");
  require_decreasing(p.eps, "ball_chain eps");
  for (std::size_t k = 0; k < p.delta.size(); ++k)
    if (!(p.eps[k] < p.delta[k] / 2)) throw std::invalid_argument("ball_chain: need eps_k < delta_k / 2");
  if (!(p.corridor_scale > 0 && p.corridor_scale <= 1)) throw std::invalid_argument("ball_chain: corridor_scale must lie in (0,1]");
  BallChainLayout L;
  L.params = p;
  Vec3 e = up(p.n), c{};
  L.centers.push_back(c);
  for (std::size_t k = 1; k < p.delta.size(); ++k) {
    c = c + (p.delta[k - 1] + 0.5 * p.delta[k] + p.delta[k]) * e;
    L.centers.push_back(c);
  }
  return L;
}

Domain ball_chain(const BallChainParams& p) {
  BallChainLayout L = ball_chain_layout(p);
  const Vec3 e = up(p.n);
  std::vector<CsgPtr> leaves;
  for (std::size_t k = 0; k < L.centers.size(); ++k) {
    leaves.push_back(leaf(std::make_shared<Ball>(p.n, L.centers[k], p.delta[k])));
    if (k + 1 < L.centers.size()) {
      double rho = p.corridor_scale * p.eps[k + 1];
      Vec3 a = L.centers[k] + (p.delta[k] - rho - kGalleryOverlap) * e;
      Vec3 b = L.centers[k + 1] - (p.delta[k + 1] - rho - kGalleryOverlap) * e;
      leaves.push_back(leaf(std::make_shared<Frustum>(p.n, a, e, norm(b - a), rho, rho)));
    }
  }
  Domain d(p.n, csg_union(leaves));
  json centers = json::array();
  for (const auto& c : L.centers) centers.push_back(c[p.n - 1]);
  d.meta = {{"gallery", "ball_chain"},
            {"params", {{"n", p.n}, {"delta", p.delta}, {"eps", p.eps}, {"corridor_scale", p.corridor_scale}}},
            {"centers", centers}};
  return d;
}

Domain gallery(const std::string& name, const json& params) {
  int n = params.value("n", 2);
  if (name == "ball") {
    double r = params.value("r", 1.0);
    Domain d(n, leaf(std::make_shared<Ball>(n, get_point(params, "center", {}), r)));
    d.meta = {{"gallery", "ball"}, {"params", params}};
    return d;
  }
  if (name == "box") {
    Vec3 one{1, 1, n == 3 ? 1.0 : 0.0};
    Domain d(n, leaf(std::make_shared<Box>(n, get_point(params, "lo", {}), get_point(params, "hi", one))));
    d.meta = {{"gallery", "box"}, {"params", params}};
    return d;
  }
  if (name == "cusp_chain") {
    CuspChainParams p;
    p.n = params.value("n", 3);
    p.beta = params.value("beta", 2.0);
    p.h = get_vec(params, "h");
    p.eps = get_vec(params, "eps");
    p.resolution = params.value("resolution", 64);
    p.corridor_factor = params.value("corridor_factor", 0.25);
    return cusp_chain(p);
  }
  if (name == "rooms_corridors") {
    RoomsParams p;
    p.n = n;
    p.a = get_vec(params, "a");
    p.b = get_vec(params, "b");
    p.c = get_vec(params, "c");
    p.d = get_vec(params, "d");
    return rooms_corridors(p);
  }
  if (name == "ball_chain") {
    BallChainParams p;
    p.n = params.value("n", 3);
    p.delta = get_vec(params, "delta");
    p.eps = get_vec(params, "eps");
    p.corridor_scale = params.value("corridor_scale", 1.0);
    return ball_chain(p);
  }
  throw std::invalid_argument("gallery: unknown domain '" + name + "'");
}

}  // namespace sobolab::geometry
