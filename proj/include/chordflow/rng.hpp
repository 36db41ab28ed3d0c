#pragma once

#include <random>

#include <Eigen/Core>

#include "chordflow/common.hpp"

namespace chordflow {

/// Seeded random stream. Every Monte Carlo estimator takes an explicit
/// 64-bit seed; batches draw from substreams so results are reproducible
/// and independent of batch scheduling.
class RngStream {
  public:
    explicit RngStream(uint64_t seed) : eng_(splitmix64(seed)) {}

    double uniform() { return unif_(eng_); }
    double uniform(double a, double b) { return a + (b - a) * unif_(eng_); }
    double normal() { return norm_(eng_); }

    /// Uniform point on S^{dim-1} (dim = 2 or 3), embedded in R^3.
    Eigen::Vector3d unit_vector(int dim) {
        if (dim == 2) {
            const double t = uniform(0.0, 2.0 * kPi);
            return {std::cos(t), std::sin(t), 0.0};
        }
        // Marsaglia rejection
        while (true) {
            const double a = uniform(-1.0, 1.0), b = uniform(-1.0, 1.0);
            const double s = a * a + b * b;
            if (s >= 1.0 || s == 0.0) continue;
            const double r = 2.0 * std::sqrt(1.0 - s);
            return {a * r, b * r, 1.0 - 2.0 * s};
        }
    }

    std::mt19937_64& engine() { return eng_; }

  private:
    std::mt19937_64 eng_;
    std::uniform_real_distribution<double> unif_{0.0, 1.0};
    std::normal_distribution<double> norm_{0.0, 1.0};
};

}  // namespace chordflow
