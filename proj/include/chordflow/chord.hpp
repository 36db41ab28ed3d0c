#pragma once

#include <optional>
#include <string>

#include "chordflow/body.hpp"

namespace chordflow {

/// Result of one estimator run. `error_estimate` is the Monte Carlo standard
/// error plus, when a coarse grid is supplied, the directional-quadrature
/// refinement delta.
struct EstimatorReport {
    double value = 0.0;
    double error_estimate = 0.0;
    std::string method;
    long long samples = 0;
    uint64_t seed = 0;
};

enum class DualQuermassMethod { radial_quadrature, xray_quadrature, riesz_potential };
enum class ChordIntegralMethod { grassmann_projection, riesz_double, dual_quermass_volume };

const char* to_string(DualQuermassMethod m);
const char* to_string(ChordIntegralMethod m);

struct EstimatorOptions {
    GridPtr grid;         // direction grid (required)
    GridPtr coarse_grid;  // optional; enables a refinement-delta error term
    long long samples = 200000;
    uint64_t seed = 1;
    int threads = 1;
};

/// x^q with the a.e. chord convention: X = 0 contributes 0.
inline double chord_pow(double x, double q) {
    if (x <= 0.0) return 0.0;
    return std::pow(x, q);
}

/// Closed form I_q(B_1) in R^n (projection formula integrated exactly).
double ball_chord_integral(int dim, double q);

/// q-th dual quermassintegral of K with respect to z.
///   radial_quadrature: (1/n) sum w rho_{K,z}(u)^s            (z in K)
///   xray_quadrature:   (1/2n) sum w X_K(z,u)^s               (s > -1, z on dK)
///   riesz_potential:   (s/n) MC of int_K |x-z|^{s-n} dx      (s > 0)
EstimatorReport dual_quermass(const BodyHandle& body, const Eigen::Vector3d& z, double s,
                              DualQuermassMethod method, const EstimatorOptions& opts);

/// q-th chord integral of K.
///   grassmann_projection: (1/(n w_n)) int_{S^{n-1}} int_{K|u^perp} X^q, directions
///     by grid quadrature, base points by MC over a support bounding box
///     (deterministic nested quadrature for n=2);
///   riesz_double:         (q(q-1)/(n w_n)) MC of int_K int_K |x-z|^{q-n-1};
///   dual_quermass_volume: (q/w_n) MC of int_K V~_{q-1}(K,z) dz.
EstimatorReport chord_integral(const BodyHandle& body, double q, ChordIntegralMethod method,
                               const EstimatorOptions& opts);

/// Evaluation route for the nonlocal V~_{q-1}([h], grad_bar h(x_i)) at every
/// grid node.
///   divergence: boundary-flux form of the Riesz potential,
///     V~_s(K,z) = (1/n) oint |y-z|^{s-n} (y-z).nu dH^{n-1}(y), pulled back to
///     the normal sphere with Jacobian det(Hess h + h I); needs s > 0.
///   xray: Eq.-style chord quadrature (1/2n) sum w X([h]; z, u)^s with exact
///     halfspace chords; needs s > -1.
enum class BoundaryVqMethod { divergence, xray };

std::vector<double> boundary_dual_quermass(const ScalarField& h, const SurfaceDerivatives& d,
                                           double s, BoundaryVqMethod method, int threads = 1);

/// Chord measure F_q([h], .) pushed to the normal sphere:
/// density(x) = (2q/w_n) V~_{q-1}([h], grad_bar h(x)) det(Hess h + h I)(x).
struct MeasureField {
    GridPtr grid;
    std::vector<double> density;
    double p = 1.0;
    double q = 0.0;
    double total_mass() const;
};

MeasureField chord_measure(const ScalarField& h, double q,
                           BoundaryVqMethod method = BoundaryVqMethod::divergence,
                           int threads = 1);
/// dF_{p,q} = h^{1-p} dF_q.
MeasureField lp_chord_measure(const ScalarField& h, double p, double q,
                              BoundaryVqMethod method = BoundaryVqMethod::divergence,
                              int threads = 1);

struct CheckReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double rel_gap = 0.0;  // |lhs-rhs| / max(|lhs|, |rhs|)
    double lhs_err = 0.0;
    double rhs_err = 0.0;
    std::string detail;
};

/// I_q(tK) vs t^{n+q-1} I_q(K); when p is given additionally compares the
/// F_{p,q} total-mass ratio against t^{n+q-p-1}.
struct HomogeneityReport {
    CheckReport integral;
    std::optional<CheckReport> measure_mass;
};
HomogeneityReport homogeneity_check(const BodyHandle& body, double q, double t,
                                    const EstimatorOptions& opts,
                                    std::optional<double> p = std::nullopt);

/// I_q vs (n+q-1)^{-1} int h dF_q.
CheckReport identity_check(const ScalarField& h, double q, const EstimatorOptions& opts);

/// Central difference of I_q([h + eps g]) against int g dF_q([h], .).
/// Throws EstimatorError when the Richardson ratio flags a nonlinear eps.
struct VariationalReport {
    double derivative = 0.0;   // Richardson-extrapolated central difference
    double measure_side = 0.0; // int g dF_q
    double rel_gap = 0.0;
    double richardson_ratio = 0.0;  // |D_eps - D_eps/2| / |extrapolated|
};
VariationalReport variational_check(const ScalarField& h, const ScalarField& g, double q,
                                    double eps, const EstimatorOptions& opts);

/// I_q(E) / (a_2...a_n a_1^q); bounded below by a dimensional constant.
double iq_lower_bound_ratio(const EllipsoidSpec& e, double q, const EstimatorOptions& opts);

}  // namespace chordflow
