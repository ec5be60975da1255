#include "sobolab/domain_io.hpp"

#include <fstream>

#include "sobolab/gallery.hpp"

namespace sobolab::geometry {

namespace {

Vec3 point(const json& j, const char* key, int n) {
  auto v = j.at(key).get<std::vector<double>>();
  if (static_cast<int>(v.size()) != n) throw std::invalid_argument(std::string("domain: '") + key + "' must have " + std::to_string(n) + " entries");
  Vec3 p{};
  for (int i = 0; i < n; ++i) p[i] = v[i];
  return p;
}

CsgPtr parse_node(const json& j, int n) {
  if (j.contains("op")) {
    std::string op = j.at("op");
    std::vector<CsgPtr> ch;
    for (const auto& c : j.at("children")) ch.push_back(parse_node(c, n));
    if (ch.empty()) throw std::invalid_argument("domain: '" + op + "' needs children");
    if (op == "union") return csg_union(ch);
    if (op == "intersection") return csg_intersection(ch);
    if (op == "difference") {
      if (ch.size() != 2) throw std::invalid_argument("domain: difference takes exactly two children");
      return csg_difference(ch[0], ch[1]);
    }
    throw std::invalid_argument("domain: unknown op '" + op + "'");
  }
  std::string kind = j.at("primitive");
  if (kind == "ball") return leaf(std::make_shared<Ball>(n, point(j, "center", n), j.at("radius").get<double>()));
  if (kind == "box") return leaf(std::make_shared<Box>(n, point(j, "lo", n), point(j, "hi", n)));
  if (kind == "halfspace") return leaf(std::make_shared<HalfSpace>(n, point(j, "point", n), point(j, "normal", n)));
  if (kind == "frustum" || kind == "cylinder") {
    double r0 = kind == "cylinder" ? j.at("radius").get<double>() : j.at("r0").get<double>();
    double r1 = kind == "cylinder" ? r0 : j.at("r1").get<double>();
    return leaf(std::make_shared<Frustum>(n, point(j, "origin", n), point(j, "axis", n), j.at("length").get<double>(), r0, r1));
  }
  if (kind == "polygon") {
    if (n != 2) throw std::invalid_argument("domain: polygon requires dimension 2");
    std::vector<Vec3> vs;
    for (const auto& v : j.at("vertices")) {
      auto c = v.get<std::vector<double>>();
      if (c.size() != 2) throw std::invalid_argument("domain: polygon vertices need 2 coordinates");
      vs.push_back({c[0], c[1], 0.0});
    }
    return leaf(std::make_shared<ConvexPolygon>(vs));
  }
  throw std::invalid_argument("domain: unknown primitive '" + kind + "'");
}

json dump_node(const CsgNode& nd, int n) {
  switch (nd.op) {
    case CsgOp::Leaf:
      return nd.prim->to_json();
    case CsgOp::Union:
    case CsgOp::Intersection:
    case CsgOp::Difference: {
      json ch = json::array();
      for (const auto& c : nd.children) ch.push_back(dump_node(*c, n));
      const char* op = nd.op == CsgOp::Union ? "union" : nd.op == CsgOp::Intersection ? "intersection" : "difference";
      return {{"op", op}, {"children", ch}};
    }
  }
  return {};
}

}  // namespace

Domain domain_from_json(const json& j) {
  if (j.contains("schema") && j.at("schema") != kDomainSchema)
    throw std::invalid_argument("domain: unsupported schema " + j.at("schema").dump());
  if (j.contains("gallery")) {
    json params = j.value("params", json::object());
    if (j.contains("dimension") && !params.contains("n")) params["n"] = j.at("dimension");
    return gallery(j.at("gallery").get<std::string>(), params);
  }
  int n = j.at("dimension").get<int>();
  if (n != 2 && n != 3) throw std::invalid_argument("domain: dimension must be 2 or 3");
  Domain d(n, parse_node(j.at("tree"), n));
  d.meta = {{"source", "tree"}};
  return d;
}

Domain load_domain(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("domain: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("domain: " + path + ": " + e.what());
  }
  return domain_from_json(j);
}

json domain_to_json(const Domain& d) {
  json j = {{"schema", kDomainSchema}, {"dimension", d.dim()}, {"tree", dump_node(*d.root(), d.dim())}};
  if (d.meta.contains("gallery")) {
    j["gallery"] = d.meta.at("gallery");
    j["params"] = d.meta.value("params", json::object());
  }
  return j;
}

}  // namespace sobolab::geometry
