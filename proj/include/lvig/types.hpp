#pragma once

/// @file types.hpp
/// @brief Shared numeric aliases, tolerances, and the Equilibrium record.

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lvig/community.hpp"
#include "lvig/errors.hpp"

namespace lvig {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Complex = std::complex<double>;

/// Default absolute tolerances used across the library. Every operation that
/// depends on one of these accepts it as a parameter with these defaults.
struct Tolerances {
    /// Eigenvalues with |Re| <= stability are treated as axis-touching.
    double stability = 1e-9;
    /// Equilibrium coordinates must exceed this to count as present.
    double positivity = 1e-9;
    /// Invasion rates with |r| <= sign are recorded as sign 0 (nonhyperbolic).
    double sign = 1e-9;
    /// Complementarity/feasibility slack for the LCP solver.
    double lcp = 1e-9;
};

/// A stationary point of the dynamics together with its classification.
/// u_star is always a full n-vector; coordinates outside `community` are 0.
struct Equilibrium {
    Community community;
    Vector u_star;
    bool admissible = true;
    bool hyperbolic = true;
    bool is_gass = false;
};

/// Throws NumericalDomainError if any entry of M is NaN or infinite.
inline void require_finite(const Matrix& M, const std::string& what) {
    if (!M.allFinite())
        throw NumericalDomainError(what + " contains a non-finite entry");
}

inline void require_finite(const Vector& v, const std::string& what) {
    if (!v.allFinite())
        throw NumericalDomainError(what + " contains a non-finite entry");
}

/// Formats a vector as "(x_1, ..., x_n)" with `digits` fractional digits.
inline std::string format_vector(const Vector& v, int digits = 6) {
    std::string s = "(";
    char buf[64];
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.*f", digits, v[i]);
        if (i > 0) s += ", ";
        s += buf;
    }
    s += ")";
    return s;
}

}  // namespace lvig
