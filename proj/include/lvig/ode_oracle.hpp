#pragma once

/// @file ode_oracle.hpp
/// @brief Trajectory integration and dynamical verification: heteroclinic
///        edge checks, invariant-manifold dimensions, the transversality
///        obstruction, and the symmetric-case Lyapunov function.
///
/// The right-hand side u_i' = u_i (b_i + (Au)_i) vanishes identically on each
/// coordinate face, and the integrator below preserves exact zeros
/// structurally: every Runge-Kutta stage multiplies by the current,
/// exactly-zero coordinate, so faces are invariant to the bit, not merely to
/// tolerance.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lvig/attractor_graphs.hpp"
#include "lvig/community.hpp"
#include "lvig/equilibria.hpp"
#include "lvig/errors.hpp"
#include "lvig/matrix_analysis.hpp"
#include "lvig/types.hpp"

namespace lvig {

struct IntegratorOptions {
    double rtol = 1e-8;
    double atol = 1e-10;
    /// Hard stop: |u| exceeding this is classified as divergence.
    double divergence_bound = 1e12;
    /// Early stop after this many consecutive accepted steps with
    /// |u'|_inf < 10*atol.
    int stall_window = 50;
    /// Attempted (accepted + rejected) step budget before giving up.
    std::size_t max_steps = 5'000'000;
    /// Store every accepted state (true) or only the endpoints (false).
    bool record_states = true;
};

enum class LimitKind { ConvergedTo, Undecided, Diverged };

struct Classification {
    LimitKind kind = LimitKind::Undecided;
    std::optional<Equilibrium> equilibrium;  ///< set when kind == ConvergedTo
};

struct Trajectory {
    std::vector<double> times;   ///< strictly increasing, starts at 0
    std::vector<Vector> states;  ///< same length as times
    Classification terminal;
    bool stalled = false;        ///< early stop on sustained |u'| ~ 0
    Vector final_derivative;     ///< u'(t_end)
    IntegratorOptions options;   ///< options the run actually used

    double final_time() const { return times.back(); }
    const Vector& final_state() const { return states.back(); }
};

namespace detail {

inline Vector lv_rhs(const LVSystem& sys, const Vector& u) {
    return u.cwiseProduct(sys.b + sys.A * u);
}

}  // namespace detail

/// Integrates the system with the adaptive embedded Dormand-Prince 4(5)
/// scheme. Coordinates within atol of zero whose dynamics point toward or
/// below zero are clamped to exactly 0 (the face is invariant there);
/// coordinates exactly 0 stay 0 through every stage by construction.
///
/// @throws PreconditionFailed on u0 < 0, t_max <= 0, or bad tolerances.
/// @throws StiffnessError on step underflow or step-budget exhaustion.
inline Trajectory integrate(const LVSystem& sys, const Vector& u0, double t_max,
                            IntegratorOptions options = {}) {
    require_finite(u0, "u0");
    if (u0.size() != sys.b.size())
        throw PreconditionFailed("integrate: u0 dimension mismatch");
    for (Eigen::Index i = 0; i < u0.size(); ++i)
        if (u0[i] < 0.0)
            throw PreconditionFailed("integrate requires u0 >= 0 componentwise");
    if (!(t_max > 0)) throw PreconditionFailed("integrate requires t_max > 0");
    if (!(options.rtol > 0) || !(options.atol > 0))
        throw PreconditionFailed("integrate requires positive tolerances");

    // Dormand-Prince 4(5) tableau (FSAL).
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                            a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // y5 - y4 coefficients (error estimator), k7 = f(y5).
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    Trajectory traj;
    traj.options = options;
    double t = 0.0;
    Vector y = u0;
    traj.times.push_back(t);
    traj.states.push_back(y);

    Vector k1 = detail::lv_rhs(sys, y);

    // Initial step from the standard magnitude heuristic.
    double h;
    {
        const double d0 = y.norm();
        const double d1 = k1.norm();
        h = (d0 > 1e-8 && d1 > 1e-8) ? 0.01 * d0 / d1 : 1e-6;
        h = std::min(h, t_max);
    }

    int stall_count = 0;
    std::size_t attempts = 0;
    bool diverged = false;

    while (t < t_max) {
        if (++attempts > options.max_steps)
            throw StiffnessError("integrate: step budget exhausted at t = " +
                                 std::to_string(t));
        if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, t))
            throw StiffnessError("integrate: step size underflow at t = " +
                                 std::to_string(t));
        h = std::min(h, t_max - t);

        const Vector k2 = detail::lv_rhs(sys, y + h * (a21 * k1));
        const Vector k3 = detail::lv_rhs(sys, y + h * (a31 * k1 + a32 * k2));
        const Vector k4 = detail::lv_rhs(sys, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        const Vector k5 =
            detail::lv_rhs(sys, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const Vector k6 = detail::lv_rhs(
            sys, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const Vector y5 =
            y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const Vector k7 = detail::lv_rhs(sys, y5);
        const Vector err =
            h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double errnorm = 0.0;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            const double sc =
                options.atol +
                options.rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
            const double q = err[i] / sc;
            errnorm += q * q;
        }
        errnorm = std::sqrt(errnorm / static_cast<double>(y.size()));

        if (errnorm <= 1.0) {  // accept
            t += h;
            y = y5;
            k1 = k7;  // FSAL

            // Clamp near-zero coordinates whose dynamics exit the cone.
            bool clamped = false;
            const Vector rates = sys.b + sys.A * y;
            for (Eigen::Index i = 0; i < y.size(); ++i) {
                if (y[i] != 0.0 && std::abs(y[i]) < options.atol &&
                    (y[i] < 0.0 || rates[i] < 0.0)) {
                    y[i] = 0.0;
                    clamped = true;
                }
            }
            if (clamped) k1 = detail::lv_rhs(sys, y);

            if (options.record_states) {
                traj.times.push_back(t);
                traj.states.push_back(y);
            }

            if (y.cwiseAbs().maxCoeff() > options.divergence_bound) {
                diverged = true;
                break;
            }
            if (k1.cwiseAbs().maxCoeff() < 10.0 * options.atol) {
                if (++stall_count >= options.stall_window) {
                    traj.stalled = true;
                    break;
                }
            } else {
                stall_count = 0;
            }
        }

        const double factor =
            errnorm == 0.0
                ? 5.0
                : std::clamp(0.9 * std::pow(errnorm, -0.2), 0.2, 5.0);
        h *= factor;
    }

    if (!options.record_states || traj.times.back() != t) {
        traj.times.push_back(t);
        traj.states.push_back(y);
    }
    traj.final_derivative = detail::lv_rhs(sys, y);
    traj.terminal.kind = diverged ? LimitKind::Diverged : LimitKind::Undecided;
    return traj;
}

/// Convenience overload matching (rtol, atol) call sites.
inline Trajectory integrate(const LVSystem& sys, const Vector& u0, double t_max,
                            double rtol, double atol) {
    IntegratorOptions options;
    options.rtol = rtol;
    options.atol = atol;
    return integrate(sys, u0, t_max, options);
}

/// Classifies the endpoint of a trajectory against the catalog: ConvergedTo
/// the unique equilibrium within Euclidean distance tol of the final state,
/// provided the final derivative is at stall level; Undecided otherwise;
/// Diverged passes through.
///
/// @throws AmbiguousCatalog when two catalog equilibria lie within 2*tol of
///         each other (no unique nearest equilibrium can exist).
inline Classification classify_limit(const Trajectory& traj,
                                     const EquilibriumCatalog& catalog, double tol) {
    if (!(tol > 0)) throw PreconditionFailed("classify_limit requires tol > 0");
    for (std::size_t a = 0; a < catalog.equilibria.size(); ++a)
        for (std::size_t b = a + 1; b < catalog.equilibria.size(); ++b)
            if ((catalog.equilibria[a].u_star - catalog.equilibria[b].u_star).norm() <
                2.0 * tol)
                throw AmbiguousCatalog(
                    "equilibria " + to_string(catalog.equilibria[a].community) +
                    " and " + to_string(catalog.equilibria[b].community) +
                    " are closer than 2*tol = " + std::to_string(2.0 * tol));

    Classification cls;
    if (traj.terminal.kind == LimitKind::Diverged) {
        cls.kind = LimitKind::Diverged;
        return cls;
    }
    if (traj.final_derivative.cwiseAbs().maxCoeff() >= 10.0 * traj.options.atol)
        return cls;  // still moving: Undecided
    for (const Equilibrium& eq : catalog.equilibria) {
        if ((traj.final_state() - eq.u_star).norm() < tol) {
            cls.kind = LimitKind::ConvergedTo;
            cls.equilibrium = eq;
            return cls;
        }
    }
    return cls;
}

/// Builds the first-order unstable-manifold seed u* + eps*v at the
/// equilibrium of community I toward the invaders target \ I: for each
/// invading species i with rate r_i > 0, v solves the member-block resolvent
/// system (B11 - r_i Id) x = -B12 e_i and carries 1 in coordinate i, so the
/// perturbation is tangent to the corresponding unstable eigenvector.
/// Coordinates outside I and the invaders stay exactly zero. Any coordinate
/// pushed below zero is clamped to 0 and *clamped is set.
///
/// @throws NotAnUnstableDirection when no species invades (target inside I)
///         or some targeted invader has a nonpositive rate.
/// @throws InternalConsistencyError when the resolvent is singular, which
///         contradicts a valid VL certificate (rate equal to a member-block
///         eigenvalue).
inline Vector unstable_seed(const LVSystem& sys, const Equilibrium& eq,
                            Community target, double eps,
                            bool* clamped = nullptr) {
    if (!(eps > 0)) throw PreconditionFailed("unstable_seed requires eps > 0");
    if (clamped) *clamped = false;
    const Community I = eq.community;
    const Community invaders = target.minus(I);
    if (invaders.is_empty())
        throw NotAnUnstableDirection("target " + to_string(target) +
                                     " adds no species to " + to_string(I));

    const Linearization lin = linearize(sys, eq);
    const auto mem = I.members();
    const int k = static_cast<int>(mem.size());

    // Outsider-block position of each species.
    std::vector<int> outsider_pos(static_cast<std::size_t>(sys.n()), -1);
    {
        int l = 0;
        for (int i = 0; i < sys.n(); ++i)
            if (!I.contains(i)) outsider_pos[static_cast<std::size_t>(i)] = l++;
    }

    Vector v = Vector::Zero(sys.n());
    for (int i : invaders.members()) {
        const int l = outsider_pos[static_cast<std::size_t>(i)];
        const double r = lin.B22[l];
        if (!(r > 0.0))
            throw NotAnUnstableDirection(
                "species " + std::to_string(i + 1) + " has invasion rate " +
                std::to_string(r) + " <= 0 at " + to_string(I));
        if (k > 0) {
            const Matrix resolvent = lin.B11 - r * Matrix::Identity(k, k);
            Eigen::FullPivLU<Matrix> lu(resolvent);
            if (!lu.isInvertible())
                throw InternalConsistencyError(
                    "rate " + std::to_string(r) +
                    " coincides with a member-block eigenvalue at " + to_string(I));
            const Vector x = lu.solve(Vector(-lin.B12.col(l)));
            for (int j = 0; j < k; ++j) v[mem[static_cast<std::size_t>(j)]] += x[j];
        }
        v[i] += 1.0;
    }

    Vector seed = eq.u_star + eps * v;
    for (Eigen::Index i = 0; i < seed.size(); ++i) {
        if (seed[i] < 0.0) {
            seed[i] = 0.0;
            if (clamped) *clamped = true;
        }
    }
    return seed;
}

/// Verifies the heteroclinic edge I1 -> I2 by seeding just off I1's
/// equilibrium along the unstable directions of the invaders I2 \ I1 and
/// integrating (the seed lies in the face spanned by I1 and I2, which is
/// exactly invariant). Returns true when the trajectory converges to I2's
/// equilibrium and false when it converges elsewhere. On an Undecided
/// endpoint the seed magnitude is halved and the run retried (the theory
/// guarantees the connection only for sufficiently small eps).
///
/// @throws VerificationInconclusive when every retry stays Undecided or the
///         trajectory diverges.
/// @throws NotAnUnstableDirection when the edge fails its rate precondition.
inline bool verify_edge(const LVSystem& sys, const EquilibriumCatalog& catalog,
                        Community I1, Community I2, double eps = 1e-4,
                        double t_max = 1e4, double tol = 1e-4,
                        IntegratorOptions options = {}) {
    const Equilibrium& eq1 = catalog.at(I1);
    const Equilibrium& eq2 = catalog.at(I2);
    options.record_states = false;

    constexpr int kMaxHalvings = 8;
    double e = eps;
    for (int attempt = 0; attempt <= kMaxHalvings; ++attempt, e *= 0.5) {
        const Vector seed = unstable_seed(sys, eq1, I2, e);
        const Trajectory traj = integrate(sys, seed, t_max, options);
        const Classification cls = classify_limit(traj, catalog, tol);
        if (cls.kind == LimitKind::ConvergedTo)
            return cls.equilibrium->community == eq2.community;
        if (cls.kind == LimitKind::Diverged)
            throw VerificationInconclusive(
                "trajectory for edge " + to_string(I1) + " -> " + to_string(I2) +
                " diverged (assumptions violated?)");
    }
    throw VerificationInconclusive("edge " + to_string(I1) + " -> " + to_string(I2) +
                                   " undecided after " +
                                   std::to_string(kMaxHalvings + 1) + " attempts");
}

/// Dimensions of the invariant manifolds at an equilibrium, from the signs of
/// the real parts of the full linearization spectrum.
struct ManifoldDimensions {
    int unstable = 0;
    int stable = 0;
    int center = 0;
};

inline ManifoldDimensions manifold_dimensions(const LVSystem& sys,
                                              const Equilibrium& eq,
                                              double tol = 1e-9) {
    if (!(tol > 0)) throw PreconditionFailed("manifold_dimensions requires tol > 0");
    const Linearization lin = linearize(sys, eq);
    ManifoldDimensions dims;
    for (const Complex& ev : spectrum(lin.full_B)) {
        if (ev.real() > tol)
            ++dims.unstable;
        else if (ev.real() < -tol)
            ++dims.stable;
        else
            ++dims.center;
    }
    return dims;
}

/// Necessary-condition test for transversality of a connection I1 -> I2:
/// returns true (obstructed) iff dim W^u(I1) + dim W^s(I2) < n + 1, in which
/// case the unstable and stable manifolds cannot intersect transversally and
/// an actual connection rules out the Morse-Smale property.
///
/// @throws PreconditionFailed when either equilibrium has a center direction.
inline bool transversality_obstruction(const LVSystem& sys,
                                       const EquilibriumCatalog& catalog,
                                       Community I1, Community I2,
                                       double tol = 1e-9) {
    const ManifoldDimensions d1 = manifold_dimensions(sys, catalog.at(I1), tol);
    const ManifoldDimensions d2 = manifold_dimensions(sys, catalog.at(I2), tol);
    if (d1.center != 0 || d2.center != 0)
        throw PreconditionFailed("transversality test requires hyperbolic equilibria");
    return d1.unstable + d2.stable < sys.n() + 1;
}

namespace detail {

inline void require_symmetric(const Matrix& A) {
    for (Eigen::Index r = 0; r < A.rows(); ++r)
        for (Eigen::Index c = r + 1; c < A.cols(); ++c)
            if (std::abs(A(r, c) - A(c, r)) > 1e-12)
                throw NotSymmetric("interaction matrix is not symmetric at (" +
                                   std::to_string(r + 1) + "," +
                                   std::to_string(c + 1) + ")");
}

}  // namespace detail

/// Energy function for symmetric interaction matrices:
/// V(u) = -sum_i b_i u_i - 1/2 sum_ij a_ij u_i u_j. Strictly decreasing along
/// nonconstant trajectories; at an equilibrium V(u*) = -1/2 u*.b.
/// @throws NotSymmetric unless A is symmetric within 1e-12 entrywise.
inline double macarthur_V(const LVSystem& sys, const Vector& u) {
    detail::require_symmetric(sys.A);
    return -sys.b.dot(u) - 0.5 * u.dot(sys.A * u);
}

/// Time derivative of macarthur_V along the flow:
/// dV/dt = -sum_i (b_i + (Au)_i)^2 u_i, nonpositive on the nonnegative cone.
inline double macarthur_dissipation(const LVSystem& sys, const Vector& u) {
    detail::require_symmetric(sys.A);
    const Vector r = sys.b + sys.A * u;
    double s = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) s += r[i] * r[i] * u[i];
    return -s;
}

/// Checks the energy ordering along every edge of a graph built for a
/// symmetric system: V at the source equilibrium must exceed V at the target
/// equilibrium by more than 1e-12.
inline bool symmetric_edge_monotonicity(const LVSystem& sys, const AttractorGraph& g) {
    detail::require_symmetric(sys.A);
    for (const GraphEdge& e : g.edges) {
        const double vs = macarthur_V(sys, g.node_equilibrium(e.source).u_star);
        const double vt = macarthur_V(sys, g.node_equilibrium(e.target).u_star);
        if (!(vs > vt + 1e-12)) return false;
    }
    return true;
}

/// Dissipativity constants from the VL certificate: with W(u) = sum h_i u_i,
/// every trajectory satisfies dW/dt <= c W - d W^2, so W is strictly
/// decreasing whenever W > threshold = 2c/d and the ball {W <= threshold}
/// absorbs every orbit.
struct DissipativityBound {
    Vector h;
    double c = 0.0;         ///< max_i |b_i|
    double d = 0.0;         ///< -lambda_max(HA + A^T H) / (2 |h|^2)
    double threshold = 0.0; ///< 2c/d
};

/// @throws PreconditionFailed when the certificate carries no weight vector
///         or the weighted quadratic form is not negative definite.
inline DissipativityBound dissipativity_bound(const LVSystem& sys) {
    if (!sys.vl_certificate.certified_vl() || !sys.vl_certificate.h)
        throw PreconditionFailed(
            "dissipativity_bound requires a VL certificate with weights");
    DissipativityBound bound;
    bound.h = *sys.vl_certificate.h;
    const double lambda = weighted_symmetric_lambda_max(sys.A, bound.h);
    if (!(lambda < 0))
        throw PreconditionFailed("certificate weights do not witness stability");
    bound.c = sys.b.cwiseAbs().maxCoeff();
    bound.d = -lambda / (2.0 * bound.h.squaredNorm());
    bound.threshold = 2.0 * bound.c / bound.d;
    return bound;
}

/// CSV dump of a trajectory: header t,u_1..u_n then one row per stored state.
inline std::string trajectory_to_csv(const Trajectory& traj) {
    std::ostringstream os;
    const Eigen::Index n = traj.states.empty() ? 0 : traj.states.front().size();
    os << "t";
    for (Eigen::Index i = 1; i <= n; ++i) os << ",u_" << i;
    os << "\n";
    os.precision(12);
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        os << traj.times[k];
        for (Eigen::Index i = 0; i < n; ++i) os << "," << traj.states[k][i];
        os << "\n";
    }
    return os.str();
}

}  // namespace lvig
