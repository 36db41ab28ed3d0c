#include "chordflow/sphere_grid.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <Eigen/SVD>

#include "chordflow/rng.hpp"

namespace chordflow {

namespace {

// Spherical triangle area (Oosterom–Strackee).
double spherical_triangle_area(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                               const Eigen::Vector3d& c) {
    const double num = std::abs(a.dot(b.cross(c)));
    const double den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
    return 2.0 * std::atan2(num, den);
}

// Circumcenter of a spherical triangle, oriented toward the triangle.
Eigen::Vector3d spherical_circumcenter(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                                       const Eigen::Vector3d& c) {
    Eigen::Vector3d o = (b - a).cross(c - a);
    const double n = o.norm();
    if (n < 1e-15) throw GeometryError("degenerate triangle in grid construction");
    o /= n;
    if (o.dot(a + b + c) < 0.0) o = -o;
    return o;
}

struct IcoMesh {
    std::vector<Eigen::Vector3d> v;
    std::vector<std::array<int, 3>> f;
};

IcoMesh base_icosahedron() {
    const double phi = 0.5 * (1.0 + std::sqrt(5.0));
    std::vector<Eigen::Vector3d> v = {
        {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
        {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
        {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1},
    };
    for (auto& p : v) p.normalize();
    std::vector<std::array<int, 3>> f = {
        {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
        {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
        {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1},
    };
    return {std::move(v), std::move(f)};
}

IcoMesh subdivide(const IcoMesh& m) {
    IcoMesh out;
    out.v = m.v;
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int i, int j) {
        auto key = std::minmax(i, j);
        auto it = midpoint.find(key);
        if (it != midpoint.end()) return it->second;
        Eigen::Vector3d p = (m.v[i] + m.v[j]).normalized();
        out.v.push_back(p);
        int idx = static_cast<int>(out.v.size()) - 1;
        midpoint.emplace(key, idx);
        return idx;
    };
    for (const auto& t : m.f) {
        const int a = mid(t[0], t[1]), b = mid(t[1], t[2]), c = mid(t[2], t[0]);
        out.f.push_back({t[0], a, c});
        out.f.push_back({t[1], b, a});
        out.f.push_back({t[2], c, b});
        out.f.push_back({a, b, c});
    }
    return out;
}

void build_frames(SphereGrid& g, uint64_t frame_seed) {
    const size_t n = g.nodes.size();
    g.frame_u.resize(n);
    g.frame_v.resize(n);
    RngStream rng(frame_seed == 0 ? 0x5eedf00d : frame_seed);
    for (size_t i = 0; i < n; ++i) {
        const Eigen::Vector3d& x = g.nodes[i];
        if (g.dim == 2) {
            g.frame_u[i] = Eigen::Vector3d(-x.y(), x.x(), 0.0);
            g.frame_v[i] = Eigen::Vector3d::Zero();
            continue;
        }
        // pick the coordinate axis least aligned with x
        int k = 0;
        for (int j = 1; j < 3; ++j)
            if (std::abs(x[j]) < std::abs(x[k])) k = j;
        Eigen::Vector3d e1 = Eigen::Vector3d::Unit(k);
        e1 = (e1 - e1.dot(x) * x).normalized();
        Eigen::Vector3d e2 = x.cross(e1);
        if (frame_seed != 0) {
            const double t = rng.uniform(0.0, 2.0 * kPi);
            const Eigen::Vector3d r1 = std::cos(t) * e1 + std::sin(t) * e2;
            e2 = -std::sin(t) * e1 + std::cos(t) * e2;
            e1 = r1;
        }
        g.frame_u[i] = e1;
        g.frame_v[i] = e2;
    }
}

// Weighted least-squares quadratic fit in normal coordinates over the 2-ring.
// Rows of the stored operator map stencil samples to (g1, g2, h11, h12, h22).
void build_deriv_ops(SphereGrid& g) {
    const size_t n = g.nodes.size();

    std::vector<std::set<int>> adj(n);
    for (const auto& t : g.triangles) {
        adj[t[0]].insert(t[1]);
        adj[t[0]].insert(t[2]);
        adj[t[1]].insert(t[0]);
        adj[t[1]].insert(t[2]);
        adj[t[2]].insert(t[0]);
        adj[t[2]].insert(t[1]);
    }

    g.stencil.resize(n);
    g.deriv_op.resize(n);
    g.stencil_cond.assign(n, 0.0);

    for (size_t i = 0; i < n; ++i) {
        std::set<int> ring(adj[i]);
        for (int j : adj[i]) ring.insert(adj[j].begin(), adj[j].end());
        ring.erase(static_cast<int>(i));
        std::vector<int>& st = g.stencil[i];
        st.clear();
        st.push_back(static_cast<int>(i));
        st.insert(st.end(), ring.begin(), ring.end());

        const int m = static_cast<int>(st.size());
        Eigen::MatrixXd A(m, 6);
        Eigen::VectorXd wts(m);
        const Eigen::Vector3d& xi = g.nodes[i];
        double theta_bar = 0.0;
        for (int j : adj[i]) theta_bar += std::acos(std::clamp(xi.dot(g.nodes[j]), -1.0, 1.0));
        theta_bar /= static_cast<double>(adj[i].size());

        for (int r = 0; r < m; ++r) {
            const Eigen::Vector3d& xj = g.nodes[st[r]];
            const double ct = std::clamp(xi.dot(xj), -1.0, 1.0);
            Eigen::Vector3d tang = xj - ct * xi;
            const double stn = tang.norm();
            const double theta = std::atan2(stn, ct);
            double u1 = 0.0, u2 = 0.0;
            if (stn > 1e-15) {
                tang /= stn;
                u1 = theta * tang.dot(g.frame_u[i]);
                u2 = theta * tang.dot(g.frame_v[i]);
            }
            A(r, 0) = 1.0;
            A(r, 1) = u1;
            A(r, 2) = u2;
            A(r, 3) = 0.5 * u1 * u1;
            A(r, 4) = u1 * u2;
            A(r, 5) = 0.5 * u2 * u2;
            wts(r) = std::exp(-(theta * theta) / (theta_bar * theta_bar));
        }

        Eigen::MatrixXd Aw = wts.asDiagonal() * A;
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(Aw, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sv = svd.singularValues();
        g.stencil_cond[i] = sv(0) / std::max(sv(sv.size() - 1), 1e-300);
        // pseudo-inverse times the sample weights: coeffs = P * values
        Eigen::MatrixXd P = svd.solve(Eigen::MatrixXd(wts.asDiagonal()));
        g.deriv_op[i] = P.bottomRows(5);
    }
}

GridPtr build_circle_grid(int resolution) {
    if (resolution < 8) throw ConfigError("circle grid needs resolution >= 8");
    auto g = std::make_shared<SphereGrid>();
    g->dim = 2;
    g->resolution = resolution;
    const double dth = 2.0 * kPi / resolution;
    g->nodes.reserve(resolution);
    for (int i = 0; i < resolution; ++i) {
        const double t = dth * i;
        g->nodes.emplace_back(std::cos(t), std::sin(t), 0.0);
        g->weights.push_back(dth);
    }
    g->mean_spacing = dth;
    build_frames(*g, 0);
    return g;
}

GridPtr build_icosphere_grid(int level, uint64_t frame_seed, bool with_operators) {
    if (level < 0 || level > 7)
        throw ConfigError("icosphere subdivision level must be in [0, 7]");
    IcoMesh m = base_icosahedron();
    for (int l = 0; l < level; ++l) m = subdivide(m);

    auto g = std::make_shared<SphereGrid>();
    g->dim = 3;
    g->resolution = level;
    g->nodes = std::move(m.v);
    g->triangles = std::move(m.f);
    g->weights.assign(g->nodes.size(), 0.0);

    // Voronoi-area weights: split every triangle at its circumcenter and the
    // edge midpoints; the three quads partition the triangle exactly.
    for (const auto& t : g->triangles) {
        const Eigen::Vector3d &a = g->nodes[t[0]], &b = g->nodes[t[1]], &c = g->nodes[t[2]];
        const Eigen::Vector3d o = spherical_circumcenter(a, b, c);
        const Eigen::Vector3d mab = (a + b).normalized();
        const Eigen::Vector3d mbc = (b + c).normalized();
        const Eigen::Vector3d mca = (c + a).normalized();
        g->weights[t[0]] += spherical_triangle_area(a, mab, o) + spherical_triangle_area(a, o, mca);
        g->weights[t[1]] += spherical_triangle_area(b, mbc, o) + spherical_triangle_area(b, o, mab);
        g->weights[t[2]] += spherical_triangle_area(c, mca, o) + spherical_triangle_area(c, o, mbc);
    }

    g->mean_spacing = std::sqrt(4.0 * kPi / static_cast<double>(g->nodes.size()));
    build_frames(*g, frame_seed);
    if (with_operators) build_deriv_ops(*g);
    return g;
}

}  // namespace

double SphereGrid::total_weight() const {
    return pairwise_sum(weights);
}

GridPtr build_grid(int dim, int resolution, uint64_t frame_seed, bool with_operators) {
    if (dim == 2) return build_circle_grid(resolution);
    if (dim == 3) return build_icosphere_grid(resolution, frame_seed, with_operators);
    throw ConfigError("grid dimension must be 2 or 3");
}

ScalarField::ScalarField(GridPtr g, std::vector<double> v)
    : grid(std::move(g)), values(std::move(v)) {
    if (!grid || values.size() != grid->size())
        throw ConfigError("scalar field size does not match grid");
}

ScalarField::ScalarField(GridPtr g, double fill) : grid(std::move(g)) {
    if (!grid) throw ConfigError("scalar field needs a grid");
    values.assign(grid->size(), fill);
}

double ScalarField::min() const {
    return *std::min_element(values.begin(), values.end());
}

double ScalarField::max() const {
    return *std::max_element(values.begin(), values.end());
}

double quadrature(const ScalarField& f) {
    if (!f.grid || f.values.size() != f.grid->size())
        throw ConfigError("field/grid mismatch in quadrature");
    std::vector<double> terms(f.values.size());
    for (size_t i = 0; i < terms.size(); ++i) {
        if (!std::isfinite(f.values[i])) throw EstimatorError("non-finite value in quadrature");
        terms[i] = f.grid->weights[i] * f.values[i];
    }
    return pairwise_sum(terms);
}

}  // namespace chordflow
