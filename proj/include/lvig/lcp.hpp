#pragma once

/// @file lcp.hpp
/// @brief Linear complementarity solver by exhaustive support enumeration.
///
/// Solves LCP(B, c): find x >= 0 with w = Bx + c >= 0 and xᵀw = 0. For
/// interaction matrices B = -A with A VL-stable the solution is unique and is
/// the globally asymptotically stable stationary point (GASS) of the
/// dynamics. Enumeration is exact, deterministic, and doubles as the
/// uniqueness monitor the theory demands: the scan continues after the first
/// solution and reports a second distinct one as an error.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lvig/community.hpp"
#include "lvig/errors.hpp"
#include "lvig/matrix_analysis.hpp"
#include "lvig/types.hpp"

namespace lvig {

/// Solution of LCP(B, c).
struct LCPSolution {
    enum class Path { SupportEnumeration };

    Vector x;             ///< nonnegative solution vector
    Community support;    ///< indices with x_i > 0
    Vector slack;         ///< w = Bx + c
    Path solver_path = Path::SupportEnumeration;
    /// Supports skipped because B(S) was numerically singular. Nonempty is
    /// diagnostic: principal submatrices of -A are nonsingular when A is
    /// VL-stable.
    std::vector<Community> degenerate_supports;
};

/// Solves LCP(B, c) by support enumeration.
///
/// Supports are visited in canonical order (cardinality ascending, then
/// lexicographic), so the result is deterministic. For each support S the
/// linear system B(S) x_S = -c(S) is solved; a candidate is accepted when
/// x_S > tol componentwise and the outside slack satisfies w_i >= -tol.
///
/// @throws NoSolution if no complementary feasible support exists.
/// @throws MultipleSolutions if two distinct solutions are found (supports
///         yielding the same x within tol are collapsed, not counted twice).
/// @throws PreconditionFailed for n > 24 or tol <= 0.
inline LCPSolution solve_lcp(const Matrix& B, const Vector& c, double tol = 1e-9) {
    if (!(tol > 0)) throw PreconditionFailed("solve_lcp requires tol > 0");
    require_finite(B, "LCP matrix");
    require_finite(c, "LCP vector");
    const int n = static_cast<int>(B.rows());
    if (n > kMaxSpecies)
        throw PreconditionFailed("support enumeration budget capped at n <= " +
                                 std::to_string(kMaxSpecies));
    if (B.cols() != n || c.size() != n)
        throw PreconditionFailed("LCP dimensions disagree");

    LCPSolution result;
    bool found = false;

    for (Community S : enumerate_subsets(n)) {
        Vector x = Vector::Zero(n);
        if (!S.is_empty()) {
            const Matrix BS = principal_submatrix(B, S);
            const auto idx = S.members();
            Vector cS(static_cast<Eigen::Index>(idx.size()));
            for (std::size_t k = 0; k < idx.size(); ++k)
                cS[static_cast<Eigen::Index>(k)] = c[idx[k]];
            Eigen::FullPivLU<Matrix> lu(BS);
            if (!lu.isInvertible()) {
                result.degenerate_supports.push_back(S);
                continue;
            }
            const Vector xS = lu.solve(-cS);
            bool positive = true;
            for (Eigen::Index k = 0; k < xS.size(); ++k)
                if (!(xS[k] > tol)) { positive = false; break; }
            if (!positive) continue;
            for (std::size_t k = 0; k < idx.size(); ++k)
                x[idx[k]] = xS[static_cast<Eigen::Index>(k)];
        }
        const Vector w = B * x + c;
        bool feasible = true;
        for (int i = 0; i < n; ++i) {
            if (S.contains(i)) continue;
            if (w[i] < -tol) { feasible = false; break; }
        }
        if (!feasible) continue;

        if (!found) {
            result.x = x;
            result.support = S;
            result.slack = w;
            found = true;
        } else {
            // A second complementary feasible support. Distinct x means the
            // uniqueness guarantee is violated (B is outside the class
            // induced by VL-stable A).
            const double scale = 1.0 + result.x.lpNorm<Eigen::Infinity>();
            if ((x - result.x).lpNorm<Eigen::Infinity>() > tol * scale) {
                throw MultipleSolutions(
                    "LCP has multiple solutions: supports " +
                        to_string(result.support) + " and " + to_string(S),
                    std::vector<double>(result.x.data(), result.x.data() + n),
                    std::vector<double>(x.data(), x.data() + n));
            }
        }
    }
    if (!found) throw NoSolution("LCP has no complementary feasible support");
    return result;
}

/// The globally asymptotically stable stationary point of the system
/// (A, b): the unique solution of LCP(-A, -b) under a VL certificate.
///
/// @param cert must certify VL-stability (a UserAsserted certificate is
///        accepted as an explicit caller override).
/// @throws PreconditionFailed without an accepting certificate.
/// @throws VLAssumptionViolated when the LCP solve contradicts uniqueness or
///         solvability — evidence that the certified assumption is false.
inline Equilibrium gass(const Matrix& A, const Vector& b,
                        const VLCertificate& cert, double tol = 1e-9) {
    if (!cert.certified_vl())
        throw PreconditionFailed(
            "gass requires a CertifiedVL (or UserAsserted) certificate");
    try {
        LCPSolution sol = solve_lcp(-A, -b, tol);
        Equilibrium eq;
        eq.community = sol.support;
        eq.u_star = sol.x;
        eq.admissible = true;
        eq.is_gass = true;
        return eq;
    } catch (const NoSolution& e) {
        throw VLAssumptionViolated(std::string("GASS computation failed: ") + e.what());
    } catch (const MultipleSolutions& e) {
        throw VLAssumptionViolated(std::string("GASS computation failed: ") + e.what());
    }
}

}  // namespace lvig
