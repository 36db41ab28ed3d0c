#pragma once

#include <array>
#include <memory>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Dense>

#include "chordflow/common.hpp"

namespace chordflow {

/// Quadrature grid on S^{n-1}, n in {2,3}.
///
/// n=2: uniform angular grid with trapezoidal (equal) weights.
/// n=3: geodesic icosphere; `resolution` counts 1->4 subdivision levels and
///      weights are spherical Voronoi cell areas, so sum(w) = 4*pi up to
///      roundoff. Tangent frames and derivative stencils are fixed at
///      construction and reused for determinism.
struct SphereGrid {
    int dim = 3;
    int resolution = 0;
    std::vector<Eigen::Vector3d> nodes;
    std::vector<double> weights;
    std::vector<Eigen::Vector3d> frame_u;  // first tangent direction
    std::vector<Eigen::Vector3d> frame_v;  // second tangent direction (n=3)
    std::vector<std::array<int, 3>> triangles;             // n=3
    std::vector<std::vector<int>> stencil;                 // n=3: 2-ring, self first
    std::vector<Eigen::Matrix<double, 5, Eigen::Dynamic>> deriv_op;  // n=3 LSQ fit
    std::vector<double> stencil_cond;                      // LSQ condition per node
    double mean_spacing = 0.0;  // typical angular node distance

    size_t size() const { return nodes.size(); }
    double total_weight() const;
};

using GridPtr = std::shared_ptr<const SphereGrid>;

/// Build a grid. For dim=2 `resolution` is the node count (>= 8); for dim=3
/// it is the icosphere subdivision level (0..7; level L has 10*4^L+2 nodes).
/// `frame_seed` re-randomizes the tangent frames (used to test frame
/// independence); 0 keeps the default deterministic frames. Passing
/// `with_operators = false` skips the derivative-stencil setup for grids
/// used only as quadrature rules.
GridPtr build_grid(int dim, int resolution, uint64_t frame_seed = 0, bool with_operators = true);

/// Scalar field sampled at the grid nodes.
struct ScalarField {
    GridPtr grid;
    std::vector<double> values;

    ScalarField() = default;
    ScalarField(GridPtr g, std::vector<double> v);
    explicit ScalarField(GridPtr g, double fill = 0.0);

    double min() const;
    double max() const;
};

/// sum_i w_i f_i. Rejects non-finite values.
double quadrature(const ScalarField& f);

}  // namespace chordflow
