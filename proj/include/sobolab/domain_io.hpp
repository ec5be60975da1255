#pragma once

#include <string>

#include "sobolab/geometry.hpp"

namespace sobolab::geometry {

inline constexpr const char* kDomainSchema = "sobolab.domain/1";

/// Either {"schema", "dimension", "tree"} with tree nodes
/// {"op": union|intersection|difference, "children": [...]} or
/// {"primitive": ball|box|halfspace|frustum|polygon, ...}, or
/// {"schema", "gallery": name, "params": {...}}.
Domain domain_from_json(const json& j);
Domain load_domain(const std::string& path);
/// Tree form of a domain (gallery domains also carry their name and params).
json domain_to_json(const Domain& d);

}  // namespace sobolab::geometry
