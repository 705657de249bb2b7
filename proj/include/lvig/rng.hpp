#pragma once

/// @file rng.hpp
/// @brief Deterministic random sampling with cross-platform reproducibility.
///
/// The engine is std::mt19937_64, whose output sequence is pinned by the
/// standard. The distributions are implemented here rather than taken from
/// <random> because std::*_distribution algorithms are implementation-defined
/// and would break byte-identical outputs across toolchains. Independent
/// substreams are derived by mixing (seed, stream, trial) through a
/// SplitMix64-style finalizer.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "lvig/types.hpp"

namespace lvig {

namespace detail {

/// SplitMix64 finalizer; good avalanche, standard constants.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace detail

/// Deterministic RNG with hand-rolled distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(detail::mix64(seed)) {}

    /// Independent substream for (seed, stream, trial); any two distinct
    /// triples give unrelated sequences.
    static Rng substream(std::uint64_t seed, std::uint64_t stream,
                         std::uint64_t trial = 0) {
        std::uint64_t s = detail::mix64(seed);
        s = detail::mix64(s ^ (0x632be59bd9b4e019ull + stream));
        s = detail::mix64(s ^ (0x9e3779b97f4a7c15ull * (trial + 1)));
        return Rng(s);
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() {
        return std::ldexp(static_cast<double>(eng_() >> 11), -53);
    }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    /// Standard normal via Box-Muller (pairwise, one value cached).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    /// Log-uniform on [lo, hi]: the base-10 exponent is uniform.
    double log_uniform(double lo, double hi) {
        return std::pow(10.0, uniform(std::log10(lo), std::log10(hi)));
    }

    /// Vector of d independent standard normals.
    Vector gaussian_vector(int d) {
        Vector v(d);
        for (int i = 0; i < d; ++i) v[i] = normal();
        return v;
    }

    /// Uniform in the closed Euclidean ball of the given radius: normalized
    /// Gaussian direction scaled by radius * u^(1/d).
    Vector ball(int d, double radius) {
        Vector v = gaussian_vector(d);
        const double norm = v.norm();
        if (norm == 0.0) return Vector::Zero(d);  // measure-zero guard
        const double r = radius * std::pow(uniform01(), 1.0 / d);
        return v * (r / norm);
    }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace lvig
