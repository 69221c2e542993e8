#pragma once

#include <Eigen/Dense>
#include <vector>

namespace fuchsian {

/// Triangular facet of a 3d convex hull; indices into the input points,
/// counterclockwise seen from outside.
struct HullFacet {
  int a, b, c;
  Eigen::Vector3d normal; // outward unit normal
  double offset;          // <normal, x> = offset on the plane
};

/// Convex hull of a 3d point set (quickhull). Assumes a full-dimensional
/// input; throws "degenerate" otherwise. Points within planeTol of a facet
/// plane are treated as on it, so exactly cocircular points may end up
/// interior to a facet; convexHullFaces recovers them.
std::vector<HullFacet> convexHull(const std::vector<Eigen::Vector3d>& pts,
                                  double planeTol = 1e-12);

/// Polygonal face of a hull after merging coplanar facets.
struct HullFace {
  Eigen::Vector3d normal;
  double offset;
  std::vector<int> cycle; // vertex indices, counterclockwise from outside
};

/// Merged, maximal polygon faces of the hull: coplanar adjacent facets are
/// united (relative plane tolerance mergeTol) and dropped cocircular
/// boundary points are restored into the cycles.
std::vector<HullFace> convexHullFaces(const std::vector<Eigen::Vector3d>& pts,
                                      double mergeTol = 1e-9);

/// 2d convex hull (monotone chain); indices into the input, strictly
/// convex corners only, counterclockwise.
std::vector<int> hullPolygon2D(const std::vector<Eigen::Vector2d>& pts);

} // namespace fuchsian
