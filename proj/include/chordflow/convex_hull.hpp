#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

#include "chordflow/common.hpp"

namespace chordflow {

struct HullFacet {
    std::array<int, 3> v;      // vertex indices, CCW from outside
    Eigen::Vector3d normal;    // outward unit normal
    double offset = 0.0;       // normal . x = offset on the facet plane
};

/// Convex hull of a 3D point set (quickhull). Throws GeometryError if the
/// points are affinely degenerate.
std::vector<HullFacet> convex_hull_3d(const std::vector<Eigen::Vector3d>& pts);

/// Convex hull of points in the z=0 plane; returns CCW vertex indices.
std::vector<int> convex_hull_2d(const std::vector<Eigen::Vector3d>& pts);

}  // namespace chordflow
