#pragma once

#include "chordflow/sphere_grid.hpp"

namespace chordflow {

/// Eigenvalue floor below which a node is flagged as having lost convexity.
inline constexpr double kConvexityFloor = 1e-8;

/// Covariant derivatives of a scalar field h on S^{n-1}, plus the derived
/// quantities the engines consume: the Euclidean gradient map
/// grad_bar h = grad h + h x and det(Hess h + h I).
///
/// n=3 uses the per-node least-squares quadratic fit baked into the grid;
/// n=2 uses fourth-order central differences on the uniform angle grid.
struct SurfaceDerivatives {
    GridPtr grid;
    std::vector<Eigen::Vector2d> grad;      // tangent-frame components
    std::vector<Eigen::Matrix2d> hess;      // n=2: only (0,0) is meaningful
    std::vector<Eigen::Vector3d> grad_map;  // grad h + h x
    std::vector<double> ma_det;             // det(Hess + h I)
    std::vector<double> min_eig;            // smallest eigenvalue of (Hess + h I)
    std::vector<int> nonconvex;             // nodes with min_eig < kConvexityFloor

    bool convex() const { return nonconvex.empty(); }
};

SurfaceDerivatives covariant_derivatives(const ScalarField& h);

std::vector<Eigen::Vector3d> euclidean_gradient_map(const ScalarField& h);

struct MongeAmpereResult {
    ScalarField det;
    std::vector<int> nonconvex;
};
MongeAmpereResult monge_ampere_det(const ScalarField& h);

}  // namespace chordflow
