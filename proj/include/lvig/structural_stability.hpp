#pragma once

/// @file structural_stability.hpp
/// @brief Perturbation stability of the invasion scheme, cone probing for the
///        growth-rate vector, and the residual nonhyperbolicity hyperplanes.
///
/// The invasion scheme of a hyperbolic VL-stable system is locally constant
/// in (A, b). This module measures that robustness empirically (random ball
/// perturbations plus radius bisection), tests membership of alternative b
/// vectors in the cone that preserves the scheme, and builds the arrangement
/// of hyperplanes in b-space on which some invasion rate degenerates to zero.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "lvig/community.hpp"
#include "lvig/equilibria.hpp"
#include "lvig/errors.hpp"
#include "lvig/parallel.hpp"
#include "lvig/rng.hpp"
#include "lvig/types.hpp"

namespace lvig {

/// True iff both schemes cover the same admissible communities and agree
/// sign-for-sign on every invasion rate. Numeric rate values may differ.
inline bool scheme_equal(const InvasionScheme& s1, const InvasionScheme& s2) {
    if (s1.n != s2.n || s1.rows.size() != s2.rows.size()) return false;
    for (std::size_t k = 0; k < s1.rows.size(); ++k) {
        if (!(s1.rows[k].eq.community == s2.rows[k].eq.community)) return false;
        if (s1.rows[k].signs != s2.rows[k].signs) return false;
    }
    return true;
}

namespace detail {

/// Human-readable description of the first (canonical-order) discrepancy
/// between two schemes, or absent when they are equal.
inline std::optional<std::string> first_scheme_divergence(const InvasionScheme& ref,
                                                          const InvasionScheme& other) {
    std::size_t i = 0, j = 0;
    const auto sign_char = [](int s) { return s > 0 ? '+' : (s < 0 ? '-' : '0'); };
    while (i < ref.rows.size() || j < other.rows.size()) {
        if (i == ref.rows.size())
            return "community " + to_string(other.rows[j].eq.community) +
                   " admissible only after perturbation";
        if (j == other.rows.size())
            return "community " + to_string(ref.rows[i].eq.community) +
                   " lost admissibility";
        const Community a = ref.rows[i].eq.community;
        const Community b = other.rows[j].eq.community;
        if (canonical_less(a, b))
            return "community " + to_string(a) + " lost admissibility";
        if (canonical_less(b, a))
            return "community " + to_string(b) + " admissible only after perturbation";
        for (std::size_t s = 0; s < ref.rows[i].signs.size(); ++s)
            if (ref.rows[i].signs[s] != other.rows[j].signs[s])
                return std::string("at ") + to_string(a) + ": species " +
                       std::to_string(s + 1) + " rate sign " +
                       sign_char(ref.rows[i].signs[s]) + " became " +
                       sign_char(other.rows[j].signs[s]);
        ++i;
        ++j;
    }
    return std::nullopt;
}

/// Rebuilds the invasion scheme of (A, b) from scratch (certificates are not
/// needed for enumeration or rates).
inline InvasionScheme scheme_of(const Matrix& A, const Vector& b, double sign_tol,
                                double positivity_tol) {
    LVSystem sys{A, b, VLCertificate::user_asserted(), ""};
    EquilibriumCatalog catalog = enumerate_admissible(sys, positivity_tol);
    return invasion_scheme(sys, catalog, sign_tol);
}

}  // namespace detail

/// One perturbed sample that changed the scheme.
struct SweepFailure {
    std::size_t trial = 0;
    Matrix A;                ///< perturbed interaction matrix
    Vector b;                ///< perturbed growth-rate vector
    std::string divergence;  ///< first divergent scheme entry, human-readable
};

/// Outcome of a perturbation sweep.
struct StabilityReport {
    double epsilon_star = 0.0;  ///< largest verified all-pass radius
    double radius = 0.0;        ///< requested sweep radius
    std::size_t trials = 0;
    bool untested = false;  ///< true when trials == 0 (vacuous epsilon_star)
    std::vector<SweepFailure> failures;  ///< failures at the requested radius
    InvasionScheme scheme_ref;           ///< baseline scheme being preserved

    bool all_passed() const { return failures.empty(); }
};

/// Samples (A', b') uniformly from B(A, radius) x B(b, radius) (independent
/// Euclidean balls, Frobenius metric on A) and checks that each perturbed
/// system reproduces the baseline invasion scheme sign-for-sign, including
/// the admissible community set. When some trial fails at the requested
/// radius, the largest all-pass radius is located by 12 bisection steps on
/// [0, radius], rescaling the same unit-ball directions. Trials are
/// independent (per-trial RNG substreams) and run under parallel_for, so the
/// report is identical for any thread count.
///
/// @throws PreconditionFailed when the base system lacks a VL certificate or
///         has a nonhyperbolic equilibrium.
inline StabilityReport perturbation_sweep(const LVSystem& sys, double radius,
                                          std::size_t trials, std::uint64_t seed,
                                          double sign_tol = 1e-9,
                                          double positivity_tol = 1e-9) {
    if (!(radius > 0)) throw PreconditionFailed("perturbation_sweep requires radius > 0");
    if (!sys.vl_certificate.certified_vl())
        throw PreconditionFailed("perturbation_sweep requires a VL certificate");

    StabilityReport report;
    report.radius = radius;
    report.trials = trials;
    {
        EquilibriumCatalog catalog = enumerate_admissible(sys, positivity_tol);
        report.scheme_ref = invasion_scheme(sys, catalog, sign_tol);
    }
    if (!report.scheme_ref.all_hyperbolic())
        throw PreconditionFailed(
            "perturbation_sweep requires every admissible equilibrium hyperbolic");

    if (trials == 0) {  // explicitly vacuous: nothing was tested
        report.epsilon_star = radius;
        report.untested = true;
        return report;
    }

    const int n = sys.n();
    constexpr std::uint64_t kSweepStream = 0x51EE9;
    // Fixed unit-ball directions per trial; a sample at radius rho is the
    // direction scaled by rho, so bisection reuses the same directions.
    std::vector<Vector> dA(trials), db(trials);
    for (std::size_t k = 0; k < trials; ++k) {
        Rng rng = Rng::substream(seed, kSweepStream, k);
        dA[k] = rng.ball(n * n, 1.0);
        db[k] = rng.ball(n, 1.0);
    }

    const auto run_trial = [&](std::size_t k, double rho) -> std::optional<std::string> {
        Matrix Ap = sys.A;
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) Ap(r, c) += rho * dA[k][r * n + c];
        const Vector bp = sys.b + rho * db[k];
        const InvasionScheme perturbed =
            detail::scheme_of(Ap, bp, sign_tol, positivity_tol);
        return detail::first_scheme_divergence(report.scheme_ref, perturbed);
    };

    std::vector<std::optional<std::string>> outcome(trials);
    parallel_for(trials, [&](std::size_t k) { outcome[k] = run_trial(k, radius); });
    for (std::size_t k = 0; k < trials; ++k) {
        if (!outcome[k]) continue;
        SweepFailure f;
        f.trial = k;
        f.divergence = *outcome[k];
        f.A = sys.A;
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) f.A(r, c) += radius * dA[k][r * n + c];
        f.b = sys.b + radius * db[k];
        report.failures.push_back(std::move(f));
    }

    if (report.failures.empty()) {
        report.epsilon_star = radius;
        return report;
    }

    // Largest all-pass radius along the sampled directions, 12 bisection steps.
    double lo = 0.0, hi = radius;
    for (int step = 0; step < 12; ++step) {
        const double mid = 0.5 * (lo + hi);
        std::vector<char> pass(trials, 1);
        parallel_for(trials, [&](std::size_t k) {
            pass[k] = run_trial(k, mid).has_value() ? 0 : 1;
        });
        const bool all = std::all_of(pass.begin(), pass.end(),
                                     [](char c) { return c == 1; });
        if (all)
            lo = mid;
        else
            hi = mid;
    }
    report.epsilon_star = lo;
    return report;
}

/// True iff the system (A_ref, b) keeps every admissible equilibrium
/// hyperbolic and reproduces the reference invasion scheme sign-for-sign.
inline bool cone_membership(const LVSystem& sys_ref, const InvasionScheme& ref_scheme,
                            const Vector& b, double sign_tol = 1e-9,
                            double positivity_tol = 1e-9) {
    if (b.size() != sys_ref.b.size())
        throw PreconditionFailed("cone_membership: dimension mismatch");
    require_finite(b, "b");
    const InvasionScheme candidate =
        detail::scheme_of(sys_ref.A, b, sign_tol, positivity_tol);
    return candidate.all_hyperbolic() && scheme_equal(ref_scheme, candidate);
}

/// Overload computing the reference scheme from sys_ref itself.
inline bool cone_membership(const LVSystem& sys_ref, const Vector& b,
                            double sign_tol = 1e-9, double positivity_tol = 1e-9) {
    const InvasionScheme ref =
        detail::scheme_of(sys_ref.A, sys_ref.b, sign_tol, positivity_tol);
    return cone_membership(sys_ref, ref, b, sign_tol, positivity_tol);
}

/// Checks that every convex combination lambda*b_ref + (1-lambda)*b2 stays in
/// the scheme-preserving cone. The cone is convex, so a false return under a
/// valid precondition is a numerical red flag, not an expected outcome.
///
/// @throws PreconditionFailed when b2 itself is not in the cone.
inline bool convexity_probe(const LVSystem& sys_ref, const Vector& b2,
                            const std::vector<double>& lambdas,
                            double sign_tol = 1e-9, double positivity_tol = 1e-9) {
    const InvasionScheme ref =
        detail::scheme_of(sys_ref.A, sys_ref.b, sign_tol, positivity_tol);
    if (!cone_membership(sys_ref, ref, b2, sign_tol, positivity_tol))
        throw PreconditionFailed("convexity_probe requires b2 inside the cone");
    for (double lambda : lambdas) {
        if (lambda < 0.0 || lambda > 1.0)
            throw PreconditionFailed("convexity_probe lambdas must lie in [0, 1]");
        const Vector bl = lambda * sys_ref.b + (1.0 - lambda) * b2;
        if (!cone_membership(sys_ref, ref, bl, sign_tol, positivity_tol)) return false;
    }
    return true;
}

/// A hyperplane { b : normal . b = 0 } in growth-rate space on which the
/// invasion rate of `species` against community `community` vanishes.
struct Hyperplane {
    Community community;
    int species = 0;     ///< 0-based index, not in community
    Vector normal;       ///< coefficient vector of the rate as a functional of b
    double offset = 0.0; ///< always 0: the rate is linear in b
};

/// The residual arrangement plus the communities skipped because their
/// restricted interaction matrix was numerically singular.
struct HyperplaneArrangement {
    std::vector<Hyperplane> planes;    ///< by (community, species), canonical
    std::vector<Community> skipped;    ///< singular A(I)
};

/// Builds the hyperplane for every pair (I, i not in I) over all subsets I.
/// The invasion rate r_i(I) as a functional of b is
///   r_i(I)(b) = b_i - sum_{k in I} ( sum_{j in I} a_ij (A(I)^-1)_jk ) b_k,
/// so normal = e_i - sum_k (...) e_k; for I = {} it degenerates to e_i.
inline HyperplaneArrangement residual_hyperplanes(const Matrix& A) {
    require_finite(A, "A");
    if (A.rows() != A.cols()) throw PreconditionFailed("A must be square");
    const int n = static_cast<int>(A.rows());
    if (n > kMaxSpecies) throw PreconditionFailed("n <= 24 supported");

    HyperplaneArrangement arr;
    for (Community I : enumerate_subsets(n)) {
        if (I.size() == static_cast<std::size_t>(n)) continue;  // no outsiders
        Matrix inv;
        if (!I.is_empty()) {
            Eigen::FullPivLU<Matrix> lu(principal_submatrix(A, I));
            if (!lu.isInvertible()) {
                arr.skipped.push_back(I);
                continue;
            }
            inv = lu.inverse();
        }
        const auto idx = I.members();
        for (int i = 0; i < n; ++i) {
            if (I.contains(i)) continue;
            Hyperplane h;
            h.community = I;
            h.species = i;
            h.normal = Vector::Zero(n);
            h.normal[i] = 1.0;
            for (std::size_t kc = 0; kc < idx.size(); ++kc) {
                double coeff = 0.0;
                for (std::size_t jc = 0; jc < idx.size(); ++jc)
                    coeff += A(i, idx[jc]) * inv(static_cast<Eigen::Index>(jc),
                                                 static_cast<Eigen::Index>(kc));
                h.normal[idx[kc]] = -coeff;
            }
            arr.planes.push_back(std::move(h));
        }
    }
    return arr;
}

/// Side condition of a hyperplane at a given b: the community's restricted
/// equilibrium u*(I) = -A(I)^-1 b(I) is strictly positive (I admissible), so
/// crossing the plane genuinely destroys hyperbolicity of a realized
/// equilibrium. Vacuously true for I = {}.
inline bool side_condition_holds(const Matrix& A, const Hyperplane& h, const Vector& b,
                                 double positivity_tol = 1e-9) {
    if (h.community.is_empty()) return true;
    const Matrix AI = principal_submatrix(A, h.community);
    const auto idx = h.community.members();
    Vector bI(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k)
        bI[static_cast<Eigen::Index>(k)] = b[idx[k]];
    const Vector u = Eigen::FullPivLU<Matrix>(AI).solve(-bI);
    for (Eigen::Index k = 0; k < u.size(); ++k)
        if (!(u[k] > positivity_tol)) return false;
    return true;
}

/// Euclidean distances from b to the residual arrangement.
struct ResidualDistance {
    /// Over planes whose side condition holds at b (infinity if none).
    double restricted = std::numeric_limits<double>::infinity();
    /// Over all planes — a conservative lower bound for the arrangement.
    double unrestricted = std::numeric_limits<double>::infinity();
    std::optional<Hyperplane> restricted_argmin;
    std::optional<Hyperplane> unrestricted_argmin;
};

/// Point-to-plane distances |normal . b| / |normal| minimized over the
/// arrangement of sys.A, both restricted to side-condition-active planes and
/// unrestricted.
inline ResidualDistance distance_to_residual(const LVSystem& sys,
                                             double positivity_tol = 1e-9) {
    const HyperplaneArrangement arr = residual_hyperplanes(sys.A);
    ResidualDistance out;
    for (const Hyperplane& h : arr.planes) {
        const double d = std::abs(h.normal.dot(sys.b)) / h.normal.norm();
        if (d < out.unrestricted) {
            out.unrestricted = d;
            out.unrestricted_argmin = h;
        }
        if (side_condition_holds(sys.A, h, sys.b, positivity_tol) &&
            d < out.restricted) {
            out.restricted = d;
            out.restricted_argmin = h;
        }
    }
    return out;
}

/// JSON serialization of a stability report (deterministic field order).
inline std::string report_to_json(const StabilityReport& report) {
    nlohmann::ordered_json j;
    j["epsilon_star"] = report.epsilon_star;
    j["radius"] = report.radius;
    j["trials"] = report.trials;
    j["untested"] = report.untested;
    j["failure_count"] = report.failures.size();
    j["failures"] = nlohmann::ordered_json::array();
    for (const SweepFailure& f : report.failures) {
        nlohmann::ordered_json jf;
        jf["trial"] = f.trial;
        jf["divergence"] = f.divergence;
        jf["A"] = nlohmann::ordered_json::array();
        for (Eigen::Index r = 0; r < f.A.rows(); ++r) {
            nlohmann::ordered_json row = nlohmann::ordered_json::array();
            for (Eigen::Index c = 0; c < f.A.cols(); ++c) row.push_back(f.A(r, c));
            jf["A"].push_back(std::move(row));
        }
        jf["b"] = nlohmann::ordered_json::array();
        for (Eigen::Index i = 0; i < f.b.size(); ++i) jf["b"].push_back(f.b[i]);
        j["failures"].push_back(std::move(jf));
    }
    j["scheme"] = nlohmann::ordered_json::array();
    for (const InvasionScheme::Row& row : report.scheme_ref.rows) {
        nlohmann::ordered_json jr;
        nlohmann::ordered_json community = nlohmann::ordered_json::array();
        for (int i : row.eq.community.members()) community.push_back(i + 1);
        jr["community"] = std::move(community);
        jr["signs"] = row.signs;
        j["scheme"].push_back(std::move(jr));
    }
    return j.dump(2) + "\n";
}

/// CSV dump of a hyperplane arrangement: community (members joined by ';'),
/// 1-based species, then the normal coefficients.
inline std::string hyperplanes_to_csv(const HyperplaneArrangement& arr, int n) {
    std::ostringstream os;
    os << "community,species";
    for (int i = 1; i <= n; ++i) os << ",normal_" << i;
    os << "\n";
    os.precision(17);
    for (const Hyperplane& h : arr.planes) {
        std::string community;
        for (int i : h.community.members()) {
            if (!community.empty()) community += ';';
            community += std::to_string(i + 1);
        }
        os << "\"{" << community << "}\"," << (h.species + 1);
        for (Eigen::Index k = 0; k < h.normal.size(); ++k) os << "," << h.normal[k];
        os << "\n";
    }
    return os.str();
}

}  // namespace lvig
