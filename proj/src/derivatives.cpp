#include "chordflow/derivatives.hpp"

#include <cmath>

namespace chordflow {

SurfaceDerivatives covariant_derivatives(const ScalarField& h) {
    if (!h.grid) throw ConfigError("covariant_derivatives: field has no grid");
    const SphereGrid& g = *h.grid;
    const size_t n = g.size();
    SurfaceDerivatives out;
    out.grid = h.grid;
    out.grad.resize(n);
    out.hess.resize(n);
    out.grad_map.resize(n);
    out.ma_det.resize(n);
    out.min_eig.resize(n);

    if (g.dim == 2) {
        const int m = static_cast<int>(n);
        const double dth = 2.0 * kPi / m;
        auto at = [&](int i) { return h.values[((i % m) + m) % m]; };
        for (int i = 0; i < m; ++i) {
            const double d1 = (-at(i + 2) + 8.0 * at(i + 1) - 8.0 * at(i - 1) + at(i - 2)) /
                              (12.0 * dth);
            const double d2 = (-at(i + 2) + 16.0 * at(i + 1) - 30.0 * at(i) +
                               16.0 * at(i - 1) - at(i - 2)) /
                              (12.0 * dth * dth);
            out.grad[i] = {d1, 0.0};
            out.hess[i] = Eigen::Matrix2d::Zero();
            out.hess[i](0, 0) = d2;
            const double b = d2 + h.values[i];
            out.ma_det[i] = b;
            out.min_eig[i] = b;
            out.grad_map[i] = d1 * g.frame_u[i] + h.values[i] * g.nodes[i];
            if (b < kConvexityFloor) out.nonconvex.push_back(i);
        }
        return out;
    }

    for (size_t i = 0; i < n; ++i) {
        const auto& st = g.stencil[i];
        Eigen::VectorXd vals(st.size());
        for (size_t r = 0; r < st.size(); ++r) vals(r) = h.values[st[r]];
        const Eigen::Matrix<double, 5, 1> c = g.deriv_op[i] * vals;
        out.grad[i] = {c(0), c(1)};
        Eigen::Matrix2d H;
        H << c(2), c(3), c(3), c(4);
        out.hess[i] = H;
        const double hv = h.values[i];
        Eigen::Matrix2d B = H + hv * Eigen::Matrix2d::Identity();
        out.ma_det[i] = B.determinant();
        const double mean = 0.5 * (B(0, 0) + B(1, 1));
        const double rad = std::sqrt(std::max(0.0, 0.25 * (B(0, 0) - B(1, 1)) * (B(0, 0) - B(1, 1)) +
                                              B(0, 1) * B(0, 1)));
        out.min_eig[i] = mean - rad;
        out.grad_map[i] = c(0) * g.frame_u[i] + c(1) * g.frame_v[i] + hv * g.nodes[i];
        if (out.min_eig[i] < kConvexityFloor) out.nonconvex.push_back(static_cast<int>(i));
    }
    return out;
}

std::vector<Eigen::Vector3d> euclidean_gradient_map(const ScalarField& h) {
    return covariant_derivatives(h).grad_map;
}

MongeAmpereResult monge_ampere_det(const ScalarField& h) {
    SurfaceDerivatives d = covariant_derivatives(h);
    return {ScalarField(h.grid, std::move(d.ma_det)), std::move(d.nonconvex)};
}

}  // namespace chordflow
