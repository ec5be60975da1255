#pragma once

#include <string>
#include <vector>

#include "sobolab/experiments.hpp"

namespace sobolab::counterexamples {

using experiments::Resolution;
using report::AuditReport;
using json = nlohmann::json;

/// ex3, ex1, ex2, ex4a, ex4b.
const std::vector<std::string>& names();

/// Defaults merged with `user`; unknown keys and ill-typed values throw
/// std::invalid_argument.
json resolve_params(const std::string& name, const json& user = json::object());

/// Per-k norms of the family attacking the example's inequality, their
/// ratio, fitted rates where known, and the "inequality_violated" flag
/// (ratio strictly increasing over the window and grown by >= factor).
/// Throws std::invalid_argument on parameter errors, including decay
/// sequences that are not strictly decreasing.
AuditReport counterexample_run(const std::string& name, const json& params, const Resolution& res);

/// Strictly increasing and last / first >= factor.
bool violation(const std::vector<double>& ratios, double factor);

}  // namespace sobolab::counterexamples
