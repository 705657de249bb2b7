/// @file oracles.hpp
/// @brief Frozen reference values for the test suite.
///
/// Every constant below was computed independently with exact rational
/// arithmetic (or closed forms) and is asserted against the library, never
/// derived from it.

#pragma once

#include <vector>

#include "lvig/community.hpp"
#include "lvig/equilibria.hpp"
#include "lvig/types.hpp"

namespace oracle {

using lvig::Community;
using lvig::Matrix;
using lvig::Vector;

// ---------------------------------------------------------------------------
// Flagship 3-species system.
// ---------------------------------------------------------------------------

inline Matrix flagship_A() {
    Matrix A(3, 3);
    A << -1.0, 0.08, -0.47,
          0.66, -1.0, 0.12,
          0.56, -0.28, -1.0;
    return A;
}

inline Vector flagship_b() {
    Vector b(3);
    b << 0.43, -0.05, 0.28;
    return b;
}

inline lvig::LVSystem flagship() {
    return lvig::make_system(flagship_A(), flagship_b(), "flagship");
}

/// The six admissible communities, in canonical order.
inline std::vector<Community> flagship_admissible() {
    return {Community::empty(), Community::of({0}), Community::of({2}),
            Community::of({0, 1}), Community::of({0, 2}),
            Community::of({0, 1, 2})};
}

// Exact equilibria (rationals evaluated to double):
//   {1}     : 43/100
//   {3}     : 7/25
//   {1,2}   : (1065/2368, 1169/4736)
//   {1,3}   : (373/1579, 651/1579)
//   {1,2,3} : (76239/287942, 24535/143971, 54789/143971)
inline Vector flagship_u(const Community& c) {
    Vector u = Vector::Zero(3);
    if (c == Community::of({0})) {
        u << 0.43, 0.0, 0.0;
    } else if (c == Community::of({2})) {
        u << 0.0, 0.0, 0.28;
    } else if (c == Community::of({0, 1})) {
        u << 0.4497466216216216, 0.24683277027027026, 0.0;
    } else if (c == Community::of({0, 2})) {
        u << 0.23622545915136162, 0.0, 0.4122862571247625;
    } else if (c == Community::of({0, 1, 2})) {
        u << 0.2647720721534198, 0.17041626438657786, 0.3805558063776733;
    }
    return u;
}

/// Invasion rates r_i(I) for every admissible I and outsider i (0-based i).
struct RateEntry {
    Community community;
    int species;
    double rate;
};

inline std::vector<RateEntry> flagship_rates() {
    return {
        {Community::empty(), 0, 0.43},
        {Community::empty(), 1, -0.05},
        {Community::empty(), 2, 0.28},
        {Community::of({0}), 1, 0.2338},
        {Community::of({0}), 2, 0.5208},
        {Community::of({2}), 0, 0.2984},
        {Community::of({2}), 1, -0.0164},
        {Community::of({0, 1}), 2, 0.46274493243243242},
        {Community::of({0, 2}), 1, 0.15538315389487017},
    };
}

/// The nine edges shared by the invasion graph and information structure.
inline std::vector<std::pair<Community, Community>> flagship_edges() {
    const auto c = [](std::initializer_list<int> m) { return Community::of(m); };
    return {
        {Community::empty(), c({0})},     {Community::empty(), c({2})},
        {Community::empty(), c({0, 2})},  {c({0}), c({0, 1})},
        {c({0}), c({0, 2})},              {c({0}), c({0, 1, 2})},
        {c({2}), c({0, 2})},              {c({0, 1}), c({0, 1, 2})},
        {c({0, 2}), c({0, 1, 2})},
    };
}

/// Exact single-attractor map: subset of species -> support of its GASS.
inline std::vector<std::pair<Community, Community>> flagship_gass_map() {
    const auto c = [](std::initializer_list<int> m) { return Community::of(m); };
    return {
        {Community::empty(), Community::empty()},
        {c({0}), c({0})},
        {c({1}), Community::empty()},
        {c({2}), c({2})},
        {c({0, 1}), c({0, 1})},
        {c({0, 2}), c({0, 2})},
        {c({1, 2}), c({2})},
        {c({0, 1, 2}), c({0, 1, 2})},
    };
}

/// Jacobian of the vector field at u*({3}), natural coordinate order.
inline Matrix flagship_jacobian_3() {
    Matrix J(3, 3);
    J << 0.2984, 0.0, 0.0,
         0.0, -0.0164, 0.0,
         0.1568, -0.0784, -0.28;
    return J;
}

/// Jacobian at u*({1,3}), natural coordinate order. Entry (2,0) is
/// a_31 * u*_3 = 9114/39475.
inline Matrix flagship_jacobian_13() {
    Matrix J(3, 3);
    J << -0.23622545915136162, 0.018898036732108929, -0.11102596580113996,
          0.0, 0.15538315389487017, 0.0,
          0.230880303989867, -0.1154401519949335, -0.41228625712476252;
    return J;
}

/// Eigenvalues of the member block at {1,3}: a conjugate pair.
inline constexpr double kBlock13Re = -0.32425585813806206;
inline constexpr double kBlock13Im = 0.13373241039171507;

/// Quasidominance weights pi = C^{-1} 1 (exact: 207200/69771, 78925/23257,
/// 252100/69771) and the induced symmetrized eigenvalue bound.
inline Vector flagship_pi() {
    Vector pi(3);
    pi << 2.9697152111908958, 3.3936019263017587, 3.613249057631394;
    return pi;
}

inline constexpr double kFlagshipLambdaMax = -3.8474482728628789;

// Dissipativity constants for the weighted sum W = sum pi_i u_i.
inline constexpr double kDissipC = 0.43;
inline constexpr double kDissipD = 0.057611518266748458;
inline constexpr double kDissipThreshold = 14.927570490645526;

/// Residual hyperplane data: all 12 planes for the flagship matrix, keyed by
/// (community, invading species); none are skipped.
struct PlaneEntry {
    Community community;
    int species;  // 0-based
    Vector normal;
    bool side;    // side condition holds at the flagship b
    double distance;
};

inline std::vector<PlaneEntry> flagship_planes() {
    const auto c = [](std::initializer_list<int> m) { return Community::of(m); };
    const auto v = [](double a, double b2, double d) {
        Vector x(3);
        x << a, b2, d;
        return x;
    };
    return {
        {Community::empty(), 0, v(1, 0, 0), true, 0.43},
        {Community::empty(), 1, v(0, 1, 0), true, 0.05},
        {Community::empty(), 2, v(0, 0, 1), true, 0.28},
        {c({0}), 1, v(0.66, 1, 0), true, 0.19513167925413136},
        {c({0}), 2, v(0.56, 0, 1), true, 0.45440113310661417},
        {c({1}), 0, v(1, 0.08, 0), false, 0.42464330865638927},
        {c({1}), 2, v(0, -0.28, 1), false, 0.28311142179596943},
        {c({2}), 0, v(1, 0, -0.47), true, 0.27005907260215012},
        {c({2}), 1, v(0, 1, 0.12), true, 0.01628318015118552},
        {c({0, 1}), 2, v(0.39611486486486486, -0.2483108108108108, 1), true,
         0.41919614272170236},
        {c({0, 2}), 1, v(0.57568081063964538, 1, -0.15056998100063332), true,
         0.13353091232878528},
        {c({1, 2}), 0, v(1, 0.20472136222910217, -0.44543343653250772), false,
         0.26492167754357027},
    };
}

/// Distance from the flagship b to the nearest residual hyperplane; the
/// restricted and unrestricted minima coincide here, both attained at
/// community {3}, species 2.
inline constexpr double kMinResidualDistance = 0.01628318015118552;

/// Smallest |r_i(I)| over the flagship rate table.
inline constexpr double kMinAbsRate = 0.0164;

/// First-order expansion coefficient of the heteroclinic seed for the
/// {3} -> {1,3} connection: x = 196/723.
inline constexpr double kSeedCoefficient = 0.27109266943291838;

// ---------------------------------------------------------------------------
// Secondary fixtures.
// ---------------------------------------------------------------------------

/// Same interaction matrix, growth vector tuned so that r_1({2}) = 0 exactly
/// (b_1 = -a_12 * b_2): a nonhyperbolic boundary case.
inline lvig::LVSystem nonhyperbolic_fixture() {
    Vector b(3);
    b << -0.08, 1.0, -1.0;
    return lvig::make_system(flagship_A(), b, "nonhyperbolic");
}

/// Diagonal-dominance fails but a diagonal Lyapunov scaling exists
/// (H = diag(1, 1, 10) works); used for duplicate-target bookkeeping. Its
/// assembly map sends {2,3} -> {3} and {1,2,3} -> {1,3}, so several
/// single-attractor transitions collapse onto one edge.
inline lvig::LVSystem multiplicity_fixture() {
    Matrix A(3, 3);
    A << -1.0, 0.0, 0.0,
          0.0, -1.0, -2.0,
          0.0, -0.1, -1.0;
    Vector b(3);
    b << 1.0, 1.0, 1.0;
    return lvig::make_system_asserted(A, b, "multiplicity");
}

/// Symmetric two-species system with energy values
/// V({}) = 0, V({1}) = V({2}) = -1/2, V({1,2}) = -10/9.
inline lvig::LVSystem symmetric_fixture() {
    Matrix A(2, 2);
    A << -1.0, 0.1,
          0.1, -1.0;
    Vector b(2);
    b << 1.0, 1.0;
    return lvig::make_system(A, b, "symmetric");
}

/// Restriction of the flagship system to species {1,3}: a planar system in
/// which the corresponding connection is transversal.
inline lvig::LVSystem restricted_fixture() {
    Matrix A(2, 2);
    A << -1.0, -0.47,
          0.56, -1.0;
    Vector b(2);
    b << 0.43, 0.28;
    return lvig::make_system(A, b, "restricted");
}

/// Stable but not D-stable: eigenvalues -1/2 +- i sqrt(3)/2; scaling by
/// diag(1,3) moves them to 1/2 +- i sqrt(11)/2.
inline Matrix stable_not_dstable() {
    Matrix A(2, 2);
    A << -2.0, -3.0,
          1.0, 1.0;
    return A;
}

/// D-stable but admitting no diagonal Lyapunov scaling.
inline Matrix dstable_not_vl() {
    Matrix A(3, 3);
    A << -1.0, 0.0, 50.0,
         -1.0, -1.0, 0.0,
         -1.0, -1.0, -1.0;
    return A;
}

}  // namespace oracle
