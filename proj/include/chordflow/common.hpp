#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace chordflow {

inline constexpr double kPi = std::numbers::pi;

/// Volume of the unit ball in R^n.
inline double unit_ball_volume(int n) {
    switch (n) {
        case 1: return 2.0;
        case 2: return kPi;
        case 3: return 4.0 * kPi / 3.0;
        default: return std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
    }
}

/// Surface measure of S^{n-1}, i.e. n * omega_n.
inline double sphere_measure(int n) { return n * unit_ball_volume(n); }

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct GeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EstimatorError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct FlowError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derive an independent substream seed from (seed, index).
inline uint64_t substream_seed(uint64_t seed, uint64_t index) {
    return splitmix64(seed ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

/// Fixed-order pairwise summation. Deterministic for a given value order,
/// independent of how the values were produced (thread count, batching).
inline double pairwise_sum(std::span<const double> v) {
    const size_t n = v.size();
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const size_t half = n / 2;
    return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

/// Run fn(i) for i in [0, n). Work is split into contiguous chunks; outputs
/// must be written to per-index slots so results do not depend on the number
/// of threads.
inline void parallel_for(size_t n, const std::function<void(size_t)>& fn, int threads = 1) {
    if (threads <= 1 || n < 2) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const size_t t = std::min<size_t>(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(t);
    const size_t chunk = (n + t - 1) / t;
    for (size_t k = 0; k < t; ++k) {
        const size_t lo = k * chunk;
        const size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace chordflow
