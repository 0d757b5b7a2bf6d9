#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cvxproj/convexdom.hpp"

namespace cvx {

struct RenderData {
  std::vector<Eigen::Vector2d> points;  // canonical-chart coordinates
  std::vector<std::pair<Eigen::Vector2d, Eigen::Vector2d>> segments;
};

/// SVG scatter/segment plot in the canonical affine chart of a domain in
/// RP^2, with the domain boundary outlined. Deterministic styling and
/// full-precision coordinates. Throws when the ambient dimension is not 3.
std::string render_chart_svg(const ConvexDomain& dom, const RenderData& data);

/// Chart coordinates of a projective point for plotting.
Eigen::Vector2d chart_point(const ConvexDomain& dom, const ProjPoint& p);

}  // namespace cvx
