#pragma once

#include <vector>

#include "cvxproj/projlin.hpp"

namespace cvx {

/// Half-space normal . y <= offset in affine chart coordinates.
struct ChartFacet {
  Vec normal;
  double offset;
};

/// Brute-force facet enumeration of the convex hull of a point set.
/// Intended for the small dimensions (<= 5) this library works in.
std::vector<ChartFacet> hull_facets(const std::vector<Vec>& pts);

/// Indices of the points that are vertices of the hull.
std::vector<int> extreme_point_indices(const std::vector<Vec>& pts,
                                       const std::vector<ChartFacet>& facets);

/// Minimum-norm point of the convex hull of the rows (Frank-Wolfe).
Vec min_norm_in_hull(const Mat& rows);

/// Simplicial decomposition of the hull, as index tuples into pts.
std::vector<std::vector<int>> triangulate_hull(const std::vector<Vec>& pts);

/// Raw integrals over the union of simplices: volume, integral of y,
/// integral of y y^T.
struct ChartMoments {
  double volume = 0.0;
  Vec first;
  Mat second;
};

ChartMoments chart_moments(const std::vector<Vec>& pts,
                           const std::vector<std::vector<int>>& simplices);

/// integral of y y^T |y|^2 dy over the triangulated hull, coordinates
/// shifted by the given center.
Mat contracted_fourth_moment(const std::vector<Vec>& pts,
                             const std::vector<std::vector<int>>& simplices,
                             const Vec& center);

/// integral of (u . (y - center))^3 dy over the triangulated hull.
double third_moment_along(const std::vector<Vec>& pts,
                          const std::vector<std::vector<int>>& simplices,
                          const Vec& center, const Vec& u);

}  // namespace cvx
