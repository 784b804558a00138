#pragma once

#include <string>

#include "bipan/model.hpp"
#include "bipan/plan.hpp"

namespace bipan {

/// Graphviz rendering in the usual PPR colours: products as red-family
/// circles shaded by kind, processes as green boxes, skills as blue rounded
/// boxes. Flow edges are black, skill edges dashed yellow.
std::string export_dot(const BiPanModel& model);

/// As above, with the plan overlaid as numbered red edges (one per step).
std::string export_dot(const BiPanModel& model, const Plan& plan);

}  // namespace bipan
