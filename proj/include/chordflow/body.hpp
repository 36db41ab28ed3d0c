#pragma once

#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "chordflow/convex_hull.hpp"
#include "chordflow/derivatives.hpp"
#include "chordflow/sphere_grid.hpp"

namespace chordflow {

struct BallSpec {
    double radius = 1.0;
    Eigen::Vector3d center = Eigen::Vector3d::Zero();
    int dim = 3;
};

/// E = center + shape * B_1 with shape symmetric positive definite.
/// Planar bodies (dim=2) are embedded in z=0 with shape(2,2)=1.
struct EllipsoidSpec {
    Eigen::Vector3d center = Eigen::Vector3d::Zero();
    Eigen::Matrix3d shape = Eigen::Matrix3d::Identity();
    int dim = 3;

    std::vector<double> semi_axes() const;  // ascending, size dim
    double volume() const;
    double eccentricity() const;  // a_max / a_min
    void validate() const;        // symmetry within 1e-12, eigenvalues > 0
};

struct PolytopeSpec {
    std::vector<Eigen::Vector3d> vertices;
    int dim = 3;
};

struct SupportTableSpec {
    ScalarField h;
};

using BodySpec = std::variant<BallSpec, EllipsoidSpec, PolytopeSpec, SupportTableSpec>;

struct Halfspace {
    Eigen::Vector3d normal;
    double offset;  // x . normal <= offset
};

/// A convex body with exact support / radial / X-ray / volume queries.
///
/// Ball and ellipsoid queries are closed-form. Polytopes carry their facet
/// list (from the convex hull of the vertices). A support table represents
/// the Wulff shape [h] of its grid samples: the halfspace intersection
/// {x : x . x_i <= h_i}; chords are exact interval intersections and the
/// support function and vertex set come from the polar-dual hull.
class BodyHandle {
  public:
    explicit BodyHandle(BodySpec spec);

    int dim() const { return dim_; }
    const BodySpec& spec() const { return spec_; }

    double support(const Eigen::Vector3d& x) const;
    /// Largest t >= 0 with z + t u in K. Throws GeometryError if z is outside.
    double radial(const Eigen::Vector3d& z, const Eigen::Vector3d& u) const;
    /// Chord length |K intersect (z + R u)|; zero off the body.
    double xray(const Eigen::Vector3d& z, const Eigen::Vector3d& u) const;
    bool contains(const Eigen::Vector3d& x) const;

    double volume(const GridPtr& grid = nullptr) const;
    double surface_area(const GridPtr& grid = nullptr) const;

    ScalarField support_field(const GridPtr& grid) const;
    std::vector<Eigen::Vector3d> boundary_points(const GridPtr& grid) const;

    /// Any interior point (center / vertex mean / Wulff inball center).
    Eigen::Vector3d interior_point() const;
    /// Upper bound for max_{x in K} |x - p|.
    double reach_bound(const Eigen::Vector3d& p) const;

    bool polytopal() const;
    const std::vector<Halfspace>& halfspaces() const;      // polytopal only
    const std::vector<Eigen::Vector3d>& vertices() const;  // polytopal only

    BodyHandle scaled(double t) const;                     // t K
    BodyHandle translated(const Eigen::Vector3d& v) const; // K + v

  private:
    void build_polytope(const PolytopeSpec& p);
    void build_table(const SupportTableSpec& t);
    void chord_interval(const Eigen::Vector3d& z, const Eigen::Vector3d& u, double& tlo,
                        double& thi) const;

    BodySpec spec_;
    int dim_ = 3;
    Eigen::Matrix3d inv_sq_ = Eigen::Matrix3d::Identity();  // ellipsoid: shape^-2
    std::vector<Halfspace> halfspaces_;
    std::vector<Eigen::Vector3d> vertices_;
    double membership_tol_ = 1e-12;
};

/// Wulff shape [h] of a positive grid field (h need not be a support
/// function). Throws if h is not strictly positive.
BodyHandle wulff_body(const ScalarField& h);

/// Minimum-volume enclosing ellipsoid of a point set (Khachiyan ascent with
/// away steps; `tol` is the relative optimality gap). Optional warm-start
/// weights are updated in place when supplied.
EllipsoidSpec min_enclosing_ellipsoid(const std::vector<Eigen::Vector3d>& pts, int dim,
                                      double tol = 1e-7,
                                      std::vector<double>* warm_weights = nullptr);

EllipsoidSpec min_enclosing_ellipsoid(const BodyHandle& body, const GridPtr& grid);

double eccentricity(const BodyHandle& body, const GridPtr& grid);
/// min over grid nodes of the support values; errors if not positive.
double dist_origin(const BodyHandle& body, const GridPtr& grid);

}  // namespace chordflow
