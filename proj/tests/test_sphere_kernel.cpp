#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>

#include "chordflow/derivatives.hpp"
#include "chordflow/sphere_grid.hpp"

using namespace chordflow;

namespace {

ScalarField sample(const GridPtr& g, const std::function<double(const Eigen::Vector3d&)>& f) {
    ScalarField out(g);
    for (size_t i = 0; i < g->size(); ++i) out.values[i] = f(g->nodes[i]);
    return out;
}

double ellipsoid_support(const Eigen::Vector3d& ax, const Eigen::Vector3d& x) {
    Eigen::Vector3d v(ax.x() * x.x(), ax.y() * x.y(), ax.z() * x.z());
    return v.norm();
}

}  // namespace

TEST_CASE("grid construction invariants") {
    for (int dim : {2, 3}) {
        auto g = build_grid(dim, dim == 2 ? 256 : 4);
        for (const auto& x : g->nodes) CHECK(std::abs(x.norm() - 1.0) < 1e-12);
        const double total = g->total_weight();
        const double expect = sphere_measure(dim);
        CHECK(std::abs(total - expect) < (dim == 2 ? 1e-12 : 1e-8));
        for (int k = 0; k < 3; ++k) {
            auto f = sample(g, [k](const Eigen::Vector3d& x) { return x[k]; });
            CHECK(std::abs(quadrature(f)) < 1e-10);
        }
    }
    CHECK_THROWS_AS(build_grid(4, 16), ConfigError);
    CHECK_THROWS_AS(build_grid(2, 4), ConfigError);
}

TEST_CASE("quadrature exactness and smooth accuracy") {
    auto g = build_grid(3, 4);
    auto one = sample(g, [](const Eigen::Vector3d&) { return 1.0; });
    CHECK(quadrature(one) == doctest::Approx(4.0 * kPi).epsilon(1e-9));

    auto g2 = build_grid(2, 256);
    auto one2 = sample(g2, [](const Eigen::Vector3d&) { return 1.0; });
    CHECK(quadrature(one2) == doctest::Approx(2.0 * kPi).epsilon(1e-12));

    auto q2 = sample(g, [](const Eigen::Vector3d& x) { return x.z() * x.z(); });
    CHECK(std::abs(quadrature(q2) - 4.0 * kPi / 3.0) < 1e-4);

    // |x.e1| has a kink along a great circle; the 1e-4 tolerance needs the
    // finest grid (error is O(spacing^2): 2.5e-3 at level 4, 1.6e-4 at 6).
    auto gf = build_grid(3, 7, 0, /*with_operators=*/false);
    auto qa = sample(gf, [](const Eigen::Vector3d& x) { return std::abs(x.x()); });
    CHECK(std::abs(quadrature(qa) - 2.0 * kPi) < 1e-4);

    auto odd = sample(g, [](const Eigen::Vector3d& x) { return x.x() * x.y() * x.z(); });
    CHECK(std::abs(quadrature(odd)) < 1e-8);

    ScalarField bad(g, 1.0);
    bad.values[3] = std::nan("");
    CHECK_THROWS_AS(quadrature(bad), EstimatorError);
}

TEST_CASE("derivatives: constants and linear functions") {
    for (int dim : {2, 3}) {
        auto g = build_grid(dim, dim == 2 ? 128 : 3);

        auto c = sample(g, [](const Eigen::Vector3d&) { return 2.5; });
        auto dc = covariant_derivatives(c);
        for (size_t i = 0; i < g->size(); ++i) {
            CHECK(dc.grad[i].norm() < 1e-10);
            CHECK(dc.hess[i].norm() < 1e-9);
            CHECK(dc.ma_det[i] == doctest::Approx(dim == 2 ? 2.5 : 6.25).epsilon(1e-9));
        }

        // h(x) = x.v is the support function of the point {v}: Hess + h I = 0
        const Eigen::Vector3d v = dim == 2 ? Eigen::Vector3d(0.3, -0.2, 0.0)
                                           : Eigen::Vector3d(0.3, -0.2, 0.5);
        auto lin = sample(g, [&](const Eigen::Vector3d& x) { return x.dot(v); });
        auto dl = covariant_derivatives(lin);
        const double tol = dim == 2 ? 1e-6 : 5e-3;
        for (size_t i = 0; i < g->size(); ++i) {
            Eigen::Matrix2d B = dl.hess[i];
            B(0, 0) += lin.values[i];
            if (dim == 3) B(1, 1) += lin.values[i];
            CHECK(B.cwiseAbs().maxCoeff() < tol);
        }
    }
}

TEST_CASE("euclidean gradient map") {
    auto g = build_grid(3, 3);
    auto ball = sample(g, [](const Eigen::Vector3d&) { return 1.7; });
    auto pts = euclidean_gradient_map(ball);
    for (size_t i = 0; i < g->size(); ++i) CHECK((pts[i] - 1.7 * g->nodes[i]).norm() < 1e-10);

    const Eigen::Vector3d v(0.2, 0.1, -0.3);
    auto tball = sample(g, [&](const Eigen::Vector3d& x) { return 1.0 + x.dot(v); });
    auto tpts = euclidean_gradient_map(tball);
    for (size_t i = 0; i < g->size(); ++i) CHECK((tpts[i] - (v + g->nodes[i])).norm() < 5e-3);

    // tangency point on an axis: grad_bar h at normal e_k is a_k e_k
    const Eigen::Vector3d ax(1.3, 1.0, 0.8);
    auto he = sample(g, [&](const Eigen::Vector3d& x) { return ellipsoid_support(ax, x); });
    auto epts = euclidean_gradient_map(he);
    for (size_t i = 0; i < g->size(); ++i) {
        if (std::abs(std::abs(g->nodes[i].z()) - 1.0) < 1e-12) {
            CHECK((epts[i] - 0.8 * g->nodes[i]).norm() < 5e-3);
        }
    }
}

TEST_CASE("monge-ampere determinant") {
    auto g3 = build_grid(3, 3);
    auto r = sample(g3, [](const Eigen::Vector3d&) { return 1.4; });
    auto mr = monge_ampere_det(r);
    for (double d : mr.det.values) CHECK(d == doctest::Approx(1.4 * 1.4).epsilon(1e-9));
    CHECK(mr.nonconvex.empty());

    auto g2 = build_grid(2, 128);
    auto r2 = sample(g2, [](const Eigen::Vector3d&) { return 1.4; });
    auto mr2 = monge_ampere_det(r2);
    for (double d : mr2.det.values) CHECK(d == doctest::Approx(1.4).epsilon(1e-9));

    // curvature is translation invariant
    const Eigen::Vector3d v(0.25, -0.15, 0.1);
    auto tb = sample(g3, [&](const Eigen::Vector3d& x) { return 1.4 + x.dot(v); });
    auto mt = monge_ampere_det(tb);
    for (double d : mt.det.values) CHECK(std::abs(d - 1.4 * 1.4) < 2e-2);

    // convexity loss is flagged, not clamped
    auto wavy = sample(g3, [](const Eigen::Vector3d& x) { return 0.2 + 0.9 * x.z() * x.z(); });
    auto mw = monge_ampere_det(wavy);
    CHECK(!mw.nonconvex.empty());
}

TEST_CASE("ellipsoid curvature matches the analytic determinant") {
    // det(Hess h + h I) = det(A)^2 / |A x|^4 for h = |A x| on S^2
    const Eigen::Vector3d ax(1.0, 1.0, 2.0);
    auto g = build_grid(3, 4);
    auto h = sample(g, [&](const Eigen::Vector3d& x) { return ellipsoid_support(ax, x); });
    auto d = covariant_derivatives(h);
    const double detA = ax.prod();
    double worst_pole = 0.0, worst_equator = 0.0;
    for (size_t i = 0; i < g->size(); ++i) {
        const double exact = detA * detA / std::pow(h.values[i], 4);
        const double rel = std::abs(d.ma_det[i] - exact) / exact;
        const double z = std::abs(g->nodes[i].z());
        if (z > 0.999) {
            worst_pole = std::max(worst_pole, rel);
            Eigen::Matrix2d B = d.hess[i] + h.values[i] * Eigen::Matrix2d::Identity();
            Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(B);
            CHECK(std::abs(es.eigenvalues()(0) - 0.5) < 0.01 * 0.5);
            CHECK(std::abs(es.eigenvalues()(1) - 0.5) < 0.01 * 0.5);
        }
        if (z < 1e-6) worst_equator = std::max(worst_equator, rel);
    }
    CHECK(worst_pole < 0.01);
    CHECK(worst_equator < 0.01);
}

TEST_CASE("determinant converges under refinement (order >= 1.5)") {
    const Eigen::Vector3d ax(1.2, 0.9, 1.5);
    double err[2];
    for (int k = 0; k < 2; ++k) {
        auto g = build_grid(3, 3 + k);
        auto h = sample(g, [&](const Eigen::Vector3d& x) { return ellipsoid_support(ax, x); });
        auto d = covariant_derivatives(h);
        const double detA = ax.prod();
        double worst = 0.0;
        for (size_t i = 0; i < g->size(); ++i) {
            const double exact = detA * detA / std::pow(h.values[i], 4);
            worst = std::max(worst, std::abs(d.ma_det[i] - exact) / exact);
        }
        err[k] = worst;
    }
    const double order = std::log2(err[0] / err[1]);
    CHECK(order >= 1.5);
}

TEST_CASE("frame independence of the determinant") {
    const Eigen::Vector3d ax(1.2, 0.9, 1.5);
    auto ga = build_grid(3, 3, 0);
    auto gb = build_grid(3, 3, 1234567);
    auto ha = sample(ga, [&](const Eigen::Vector3d& x) { return ellipsoid_support(ax, x); });
    auto hb = sample(gb, [&](const Eigen::Vector3d& x) { return ellipsoid_support(ax, x); });
    auto da = covariant_derivatives(ha);
    auto db = covariant_derivatives(hb);
    for (size_t i = 0; i < ga->size(); ++i)
        CHECK(std::abs(da.ma_det[i] - db.ma_det[i]) < 1e-10);
}

TEST_CASE("stencil conditioning is reported") {
    auto g = build_grid(3, 3);
    REQUIRE(g->stencil_cond.size() == g->size());
    for (double c : g->stencil_cond) {
        CHECK(c >= 1.0);
        CHECK(c < 1e8);
    }
}
