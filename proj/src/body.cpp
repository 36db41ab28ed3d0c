#include "chordflow/body.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace chordflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::Matrix3d spd_sqrt(const Eigen::Matrix3d& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m);
    Eigen::Vector3d ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

std::vector<double> EllipsoidSpec::semi_axes() const {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(shape);
    std::vector<double> ax;
    if (dim == 2) {
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es2(shape.topLeftCorner<2, 2>());
        ax = {es2.eigenvalues()(0), es2.eigenvalues()(1)};
    } else {
        ax = {es.eigenvalues()(0), es.eigenvalues()(1), es.eigenvalues()(2)};
    }
    std::sort(ax.begin(), ax.end());
    return ax;
}

double EllipsoidSpec::volume() const {
    const auto ax = semi_axes();
    double prod = 1.0;
    for (double a : ax) prod *= a;
    return unit_ball_volume(dim) * prod;
}

double EllipsoidSpec::eccentricity() const {
    const auto ax = semi_axes();
    return ax.back() / ax.front();
}

void EllipsoidSpec::validate() const {
    const double scale = shape.cwiseAbs().maxCoeff();
    if ((shape - shape.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, scale))
        throw GeometryError("ellipsoid shape matrix is not symmetric");
    if (semi_axes().front() <= 0.0)
        throw GeometryError("ellipsoid shape matrix is not positive definite");
}

BodyHandle::BodyHandle(BodySpec spec) : spec_(std::move(spec)) {
    if (const auto* b = std::get_if<BallSpec>(&spec_)) {
        dim_ = b->dim;
        if (b->radius <= 0.0) throw GeometryError("ball radius must be positive");
    } else if (const auto* e = std::get_if<EllipsoidSpec>(&spec_)) {
        dim_ = e->dim;
        e->validate();
        inv_sq_ = (e->shape * e->shape).inverse();
    } else if (const auto* p = std::get_if<PolytopeSpec>(&spec_)) {
        dim_ = p->dim;
        build_polytope(*p);
    } else {
        const auto& t = std::get<SupportTableSpec>(spec_);
        dim_ = t.h.grid->dim;
        build_table(t);
    }
}

void BodyHandle::build_polytope(const PolytopeSpec& p) {
    if (p.vertices.size() < static_cast<size_t>(p.dim) + 1)
        throw GeometryError("polytope needs at least dim+1 vertices");
    vertices_ = p.vertices;
    if (dim_ == 3) {
        for (const auto& f : convex_hull_3d(vertices_))
            halfspaces_.push_back({f.normal, f.offset});
    } else {
        const auto ring = convex_hull_2d(vertices_);
        const size_t m = ring.size();
        for (size_t k = 0; k < m; ++k) {
            const Eigen::Vector3d a = vertices_[ring[k]];
            const Eigen::Vector3d b = vertices_[ring[(k + 1) % m]];
            Eigen::Vector3d nrm(b.y() - a.y(), a.x() - b.x(), 0.0);  // outward for CCW ring
            nrm.normalize();
            halfspaces_.push_back({nrm, nrm.dot(a)});
        }
    }
    double scale = 0.0;
    for (const auto& hs : halfspaces_) scale = std::max(scale, std::abs(hs.offset));
    membership_tol_ = 1e-9 * std::max(scale, 1e-6);
}

void BodyHandle::build_table(const SupportTableSpec& t) {
    const SphereGrid& g = *t.h.grid;
    double hmax = 0.0;
    for (size_t i = 0; i < g.size(); ++i) {
        const double hv = t.h.values[i];
        if (!(hv > 0.0)) throw GeometryError("support table must be strictly positive");
        halfspaces_.push_back({g.nodes[i], hv});
        hmax = std::max(hmax, hv);
    }
    membership_tol_ = 1e-9 * hmax;

    // Polar duality: [h] = (conv{x_i/h_i})^polar, so facets of the polar hull
    // are exactly the vertices of [h].
    std::vector<Eigen::Vector3d> polar(g.size());
    for (size_t i = 0; i < g.size(); ++i) polar[i] = g.nodes[i] / t.h.values[i];
    std::vector<Eigen::Vector3d> verts;
    if (dim_ == 3) {
        for (const auto& f : convex_hull_3d(polar)) {
            if (f.offset <= 1e-14) throw GeometryError("wulff shape has empty interior");
            verts.push_back(f.normal / f.offset);
        }
    } else {
        const auto ring = convex_hull_2d(polar);
        const size_t m = ring.size();
        for (size_t k = 0; k < m; ++k) {
            const Eigen::Vector3d a = polar[ring[k]];
            const Eigen::Vector3d b = polar[ring[(k + 1) % m]];
            Eigen::Vector3d nrm(b.y() - a.y(), a.x() - b.x(), 0.0);
            nrm.normalize();
            const double off = nrm.dot(a);
            if (off <= 1e-14) throw GeometryError("wulff shape has empty interior");
            verts.push_back(nrm / off);
        }
    }
    // dedupe vertices shared by coplanar polar facets
    for (const auto& v : verts) {
        bool dup = false;
        for (const auto& w : vertices_)
            if ((v - w).norm() < 1e-9 * (1.0 + v.norm())) {
                dup = true;
                break;
            }
        if (!dup) vertices_.push_back(v);
    }
}

bool BodyHandle::polytopal() const { return !halfspaces_.empty(); }

const std::vector<Halfspace>& BodyHandle::halfspaces() const {
    if (!polytopal()) throw GeometryError("body has no halfspace representation");
    return halfspaces_;
}

const std::vector<Eigen::Vector3d>& BodyHandle::vertices() const {
    if (vertices_.empty()) throw GeometryError("body has no vertex representation");
    return vertices_;
}

double BodyHandle::support(const Eigen::Vector3d& x) const {
    if (const auto* b = std::get_if<BallSpec>(&spec_))
        return b->radius * x.norm() + b->center.dot(x);
    if (const auto* e = std::get_if<EllipsoidSpec>(&spec_))
        return (e->shape * x).norm() + e->center.dot(x);
    double s = -kInf;
    for (const auto& v : vertices_) s = std::max(s, v.dot(x));
    return s;
}

void BodyHandle::chord_interval(const Eigen::Vector3d& z, const Eigen::Vector3d& u, double& tlo,
                                double& thi) const {
    tlo = -kInf;
    thi = kInf;
    if (const auto* b = std::get_if<BallSpec>(&spec_)) {
        const Eigen::Vector3d w = z - b->center;
        const double bb = w.dot(u);
        const double disc = bb * bb - (w.squaredNorm() - b->radius * b->radius);
        if (disc <= 0.0) {
            tlo = 0.0;
            thi = 0.0;
            return;
        }
        const double s = std::sqrt(disc);
        tlo = -bb - s;
        thi = -bb + s;
        return;
    }
    if (std::get_if<EllipsoidSpec>(&spec_)) {
        const auto& e = std::get<EllipsoidSpec>(spec_);
        const Eigen::Vector3d w = z - e.center;
        const double a = u.dot(inv_sq_ * u);
        const double bb = w.dot(inv_sq_ * u);
        const double c = w.dot(inv_sq_ * w) - 1.0;
        const double disc = bb * bb - a * c;
        if (disc <= 0.0 || a <= 0.0) {
            tlo = 0.0;
            thi = 0.0;
            return;
        }
        const double s = std::sqrt(disc);
        tlo = (-bb - s) / a;
        thi = (-bb + s) / a;
        return;
    }
    for (const auto& hs : halfspaces_) {
        const double s = hs.normal.dot(u);
        const double rhs = hs.offset - hs.normal.dot(z);
        if (s > 1e-14) {
            thi = std::min(thi, rhs / s);
        } else if (s < -1e-14) {
            tlo = std::max(tlo, rhs / s);
        } else if (rhs < -membership_tol_) {
            tlo = 0.0;
            thi = 0.0;
            return;
        }
    }
    if (tlo > thi) {
        tlo = 0.0;
        thi = 0.0;
    }
}

double BodyHandle::radial(const Eigen::Vector3d& z, const Eigen::Vector3d& u) const {
    if (!contains(z)) throw GeometryError("radial: base point is outside the body");
    double tlo, thi;
    chord_interval(z, u, tlo, thi);
    return std::max(0.0, thi);
}

double BodyHandle::xray(const Eigen::Vector3d& z, const Eigen::Vector3d& u) const {
    double tlo, thi;
    chord_interval(z, u, tlo, thi);
    return std::max(0.0, thi - tlo);
}

bool BodyHandle::contains(const Eigen::Vector3d& x) const {
    if (const auto* b = std::get_if<BallSpec>(&spec_))
        return (x - b->center).norm() <= b->radius * (1.0 + 1e-12) + 1e-15;
    if (const auto* e = std::get_if<EllipsoidSpec>(&spec_)) {
        const Eigen::Vector3d w = x - e->center;
        return w.dot(inv_sq_ * w) <= 1.0 + 1e-10;
    }
    for (const auto& hs : halfspaces_)
        if (hs.normal.dot(x) - hs.offset > membership_tol_) return false;
    return true;
}

double BodyHandle::volume(const GridPtr& grid) const {
    if (const auto* b = std::get_if<BallSpec>(&spec_))
        return unit_ball_volume(dim_) * std::pow(b->radius, dim_);
    if (const auto* e = std::get_if<EllipsoidSpec>(&spec_)) return e->volume();
    if (std::get_if<PolytopeSpec>(&spec_)) {
        // divergence theorem over facets; exact for the triangulated hull
        if (dim_ == 3) {
            double v = 0.0;
            for (const auto& f : convex_hull_3d(vertices_)) {
                const Eigen::Vector3d a = vertices_[f.v[0]], b = vertices_[f.v[1]],
                                      c = vertices_[f.v[2]];
                v += a.dot(b.cross(c));
            }
            return v / 6.0;
        }
        const auto ring = convex_hull_2d(vertices_);
        double v = 0.0;
        for (size_t k = 0; k < ring.size(); ++k) {
            const Eigen::Vector3d a = vertices_[ring[k]];
            const Eigen::Vector3d b = vertices_[ring[(k + 1) % ring.size()]];
            v += a.x() * b.y() - b.x() * a.y();
        }
        return 0.5 * v;
    }
    // support table: smooth route (1/n) * int h det(Hess h + h I)
    const auto& t = std::get<SupportTableSpec>(spec_);
    SurfaceDerivatives d = covariant_derivatives(t.h);
    if (!d.convex())
        throw GeometryError("volume: convexity loss at " + std::to_string(d.nonconvex.size()) +
                            " nodes");
    ScalarField integrand(t.h.grid);
    for (size_t i = 0; i < integrand.values.size(); ++i)
        integrand.values[i] = t.h.values[i] * d.ma_det[i];
    return quadrature(integrand) / dim_;
    (void)grid;
}

double BodyHandle::surface_area(const GridPtr& grid) const {
    if (const auto* b = std::get_if<BallSpec>(&spec_))
        return sphere_measure(dim_) * std::pow(b->radius, dim_ - 1);
    if (const auto* e = std::get_if<EllipsoidSpec>(&spec_)) {
        if (!grid) throw ConfigError("surface_area of an ellipsoid needs a grid");
        // S = int det(Hess h + h I); for h = |A x| the determinant is
        // det(A)^2 / |A x|^{n+1} (exact), so only quadrature error remains.
        const double detA = (dim_ == 2) ? e->shape.topLeftCorner<2, 2>().determinant()
                                        : e->shape.determinant();
        ScalarField f(grid);
        for (size_t i = 0; i < grid->size(); ++i)
            f.values[i] = detA * detA / std::pow((e->shape * grid->nodes[i]).norm(), dim_ + 1);
        return quadrature(f);
    }
    if (std::get_if<PolytopeSpec>(&spec_)) {
        if (dim_ == 3) {
            double s = 0.0;
            for (const auto& f : convex_hull_3d(vertices_)) {
                const Eigen::Vector3d a = vertices_[f.v[0]], b = vertices_[f.v[1]],
                                      c = vertices_[f.v[2]];
                s += 0.5 * ((b - a).cross(c - a)).norm();
            }
            return s;
        }
        const auto ring = convex_hull_2d(vertices_);
        double s = 0.0;
        for (size_t k = 0; k < ring.size(); ++k)
            s += (vertices_[ring[(k + 1) % ring.size()]] - vertices_[ring[k]]).norm();
        return s;
    }
    const auto& t = std::get<SupportTableSpec>(spec_);
    SurfaceDerivatives d = covariant_derivatives(t.h);
    ScalarField f(t.h.grid, std::move(d.ma_det));
    return quadrature(f);
}

ScalarField BodyHandle::support_field(const GridPtr& grid) const {
    ScalarField f(grid);
    for (size_t i = 0; i < grid->size(); ++i) f.values[i] = support(grid->nodes[i]);
    return f;
}

std::vector<Eigen::Vector3d> BodyHandle::boundary_points(const GridPtr& grid) const {
    if (const auto* b = std::get_if<BallSpec>(&spec_)) {
        std::vector<Eigen::Vector3d> out(grid->size());
        for (size_t i = 0; i < grid->size(); ++i) out[i] = b->center + b->radius * grid->nodes[i];
        return out;
    }
    if (const auto* e = std::get_if<EllipsoidSpec>(&spec_)) {
        std::vector<Eigen::Vector3d> out(grid->size());
        const Eigen::Matrix3d A2 = e->shape * e->shape;
        for (size_t i = 0; i < grid->size(); ++i) {
            const Eigen::Vector3d& x = grid->nodes[i];
            out[i] = e->center + A2 * x / (e->shape * x).norm();
        }
        return out;
    }
    if (std::get_if<PolytopeSpec>(&spec_)) return vertices_;
    const auto& t = std::get<SupportTableSpec>(spec_);
    return euclidean_gradient_map(t.h);
}

Eigen::Vector3d BodyHandle::interior_point() const {
    if (const auto* b = std::get_if<BallSpec>(&spec_)) return b->center;
    if (const auto* e = std::get_if<EllipsoidSpec>(&spec_)) return e->center;
    Eigen::Vector3d m = Eigen::Vector3d::Zero();
    for (const auto& v : vertices_) m += v;
    return m / static_cast<double>(vertices_.size());
}

double BodyHandle::reach_bound(const Eigen::Vector3d& p) const {
    if (const auto* b = std::get_if<BallSpec>(&spec_))
        return (b->center - p).norm() + b->radius;
    if (const auto* e = std::get_if<EllipsoidSpec>(&spec_)) {
        const auto ax = e->semi_axes();
        return (e->center - p).norm() + ax.back();
    }
    double r = 0.0;
    for (const auto& v : vertices_) r = std::max(r, (v - p).norm());
    return r;
}

BodyHandle BodyHandle::scaled(double t) const {
    if (t <= 0.0) throw GeometryError("scaling factor must be positive");
    if (const auto* b = std::get_if<BallSpec>(&spec_))
        return BodyHandle(BallSpec{b->radius * t, b->center * t, b->dim});
    if (const auto* e = std::get_if<EllipsoidSpec>(&spec_)) {
        EllipsoidSpec s = *e;
        s.center *= t;
        s.shape *= t;
        if (s.dim == 2) s.shape(2, 2) = 1.0;
        return BodyHandle(s);
    }
    if (const auto* p = std::get_if<PolytopeSpec>(&spec_)) {
        PolytopeSpec s = *p;
        for (auto& v : s.vertices) v *= t;
        return BodyHandle(s);
    }
    const auto& tab = std::get<SupportTableSpec>(spec_);
    ScalarField h = tab.h;
    for (double& v : h.values) v *= t;
    return BodyHandle(SupportTableSpec{std::move(h)});
}

BodyHandle BodyHandle::translated(const Eigen::Vector3d& v) const {
    if (const auto* b = std::get_if<BallSpec>(&spec_))
        return BodyHandle(BallSpec{b->radius, b->center + v, b->dim});
    if (const auto* e = std::get_if<EllipsoidSpec>(&spec_)) {
        EllipsoidSpec s = *e;
        s.center += v;
        return BodyHandle(s);
    }
    if (const auto* p = std::get_if<PolytopeSpec>(&spec_)) {
        PolytopeSpec s = *p;
        for (auto& w : s.vertices) w += v;
        return BodyHandle(s);
    }
    const auto& tab = std::get<SupportTableSpec>(spec_);
    ScalarField h = tab.h;
    for (size_t i = 0; i < h.values.size(); ++i) h.values[i] += h.grid->nodes[i].dot(v);
    return BodyHandle(SupportTableSpec{std::move(h)});
}

BodyHandle wulff_body(const ScalarField& h) {
    return BodyHandle(SupportTableSpec{h});
}

EllipsoidSpec min_enclosing_ellipsoid(const std::vector<Eigen::Vector3d>& pts, int dim,
                                      double tol, std::vector<double>* warm_weights) {
    const int m = static_cast<int>(pts.size());
    const int d = dim;
    if (m < d + 1) throw GeometryError("min_enclosing_ellipsoid: too few points");

    Eigen::MatrixXd Q(d + 1, m);
    for (int i = 0; i < m; ++i) {
        for (int k = 0; k < d; ++k) Q(k, i) = pts[i][k];
        Q(d, i) = 1.0;
    }

    Eigen::VectorXd u = Eigen::VectorXd::Constant(m, 1.0 / m);
    if (warm_weights && static_cast<int>(warm_weights->size()) == m) {
        double s = 0.0;
        for (double w : *warm_weights) s += std::max(w, 0.0);
        if (s > 0.0)
            for (int i = 0; i < m; ++i) u(i) = std::max((*warm_weights)[i], 0.0) / s;
    }

    const int max_iter = 500000;
    const double target = d + 1;
    Eigen::VectorXd kappa(m);
    for (int iter = 0; iter < max_iter; ++iter) {
        Eigen::MatrixXd X = Q * u.asDiagonal() * Q.transpose();
        Eigen::MatrixXd Xi = X.inverse();
        for (int i = 0; i < m; ++i) kappa(i) = Q.col(i).dot(Xi * Q.col(i));

        int ip = 0, im = -1;
        double kp = -kInf, km = kInf;
        for (int i = 0; i < m; ++i) {
            if (kappa(i) > kp) {
                kp = kappa(i);
                ip = i;
            }
            if (u(i) > 1e-14 && kappa(i) < km) {
                km = kappa(i);
                im = i;
            }
        }
        const bool up_ok = kp <= target * (1.0 + tol);
        const bool dn_ok = (im < 0) || km >= target * (1.0 - tol);
        if (up_ok && dn_ok) break;

        if (kp - target >= target - km || im < 0) {
            const double lam = (kp - target) / (target * (kp - 1.0));
            u *= (1.0 - lam);
            u(ip) += lam;
        } else {
            double lam = (km - target) / (target * (km - 1.0));  // negative
            lam = std::max(lam, -u(im) / (1.0 - u(im)));
            u *= (1.0 - lam);
            u(im) += lam;
        }
    }
    if (warm_weights) warm_weights->assign(u.data(), u.data() + m);

    Eigen::VectorXd c = Eigen::VectorXd::Zero(d);
    for (int i = 0; i < m; ++i)
        for (int k = 0; k < d; ++k) c(k) += u(i) * pts[i][k];
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < m; ++i) {
        Eigen::VectorXd p(d);
        for (int k = 0; k < d; ++k) p(k) = pts[i][k];
        sigma += u(i) * p * p.transpose();
    }
    sigma -= c * c.transpose();

    // containment radius from the realized maximum so all points end up inside
    Eigen::MatrixXd sig_inv = sigma.inverse();
    double rho = 0.0;
    for (int i = 0; i < m; ++i) {
        Eigen::VectorXd w(d);
        for (int k = 0; k < d; ++k) w(k) = pts[i][k] - c(k);
        rho = std::max(rho, w.dot(sig_inv * w));
    }

    EllipsoidSpec out;
    out.dim = dim;
    out.center = Eigen::Vector3d::Zero();
    for (int k = 0; k < d; ++k) out.center[k] = c(k);
    Eigen::Matrix3d S3 = Eigen::Matrix3d::Identity();
    S3.topLeftCorner(d, d) = rho * sigma;
    out.shape = spd_sqrt(S3);
    if (dim == 2) {
        out.shape.row(2) = Eigen::Vector3d::UnitZ();
        out.shape.col(2) = Eigen::Vector3d::UnitZ();
    }
    return out;
}

EllipsoidSpec min_enclosing_ellipsoid(const BodyHandle& body, const GridPtr& grid) {
    return min_enclosing_ellipsoid(body.boundary_points(grid), body.dim());
}

double eccentricity(const BodyHandle& body, const GridPtr& grid) {
    return min_enclosing_ellipsoid(body, grid).eccentricity();
}

double dist_origin(const BodyHandle& body, const GridPtr& grid) {
    double d = kInf;
    for (const auto& x : grid->nodes) d = std::min(d, body.support(x));
    if (d <= 0.0) throw GeometryError("dist_origin: origin is not interior");
    return d;
}

}  // namespace chordflow
