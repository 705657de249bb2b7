#pragma once

/// @file matrix_analysis.hpp
/// @brief Stability hierarchy of interaction matrices and VL certificates.
///
/// Classifies matrices within the chain
///     Volterra-Lyapunov stable  ⊂  D-stable  ⊂  stable,
/// where A is VL-stable when some positive diagonal H makes HA + AᵀH negative
/// definite. VL-stability is the precondition every downstream module relies
/// on, so certificates are explicit values (weights + verified lambda_max)
/// rather than bare booleans.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "lvig/community.hpp"
#include "lvig/errors.hpp"
#include "lvig/rng.hpp"
#include "lvig/types.hpp"

namespace lvig {

/// Outcome of a VL-stability certification attempt. `Unknown` is an honest
/// "could not decide", never a silent failure.
enum class VLVerdict { CertifiedVL, CertifiedNotStable, Unknown };

/// How a certificate was produced.
enum class VLMethod { Quasidominance, ConvexSearch, UserAsserted };

inline const char* to_string(VLVerdict v) {
    switch (v) {
        case VLVerdict::CertifiedVL: return "CertifiedVL";
        case VLVerdict::CertifiedNotStable: return "CertifiedNotStable";
        default: return "Unknown";
    }
}

inline const char* to_string(VLMethod m) {
    switch (m) {
        case VLMethod::Quasidominance: return "Quasidominance";
        case VLMethod::ConvexSearch: return "ConvexSearch";
        default: return "UserAsserted";
    }
}

/// Certificate of (non-)membership in the VL-stable class.
///
/// Invariants: verdict == CertifiedVL implies h is present with all h_i > 0
/// and lambda_max < 0; verdict == CertifiedNotStable implies the spectrum of
/// A itself touches the closed right half-plane.
struct VLCertificate {
    VLVerdict verdict = VLVerdict::Unknown;
    std::optional<Vector> h;
    std::optional<double> lambda_max;
    VLMethod method = VLMethod::ConvexSearch;

    /// Caller-supplied claim that A is VL-stable, accepted without proof.
    /// Downstream checks can still expose a false assertion.
    static VLCertificate user_asserted() {
        VLCertificate c;
        c.verdict = VLVerdict::CertifiedVL;
        c.method = VLMethod::UserAsserted;
        return c;
    }

    bool certified_vl() const { return verdict == VLVerdict::CertifiedVL; }
};

/// Returns A(J): rows and columns restricted to J in ascending index order.
/// @throws InvalidCommunity if J is empty or exceeds the dimension of A.
inline Matrix principal_submatrix(const Matrix& A, Community J) {
    if (J.is_empty()) throw InvalidCommunity("principal submatrix of {} requested");
    const auto idx = J.members();
    if (idx.back() >= A.rows())
        throw InvalidCommunity("community " + to_string(J) +
                               " exceeds matrix dimension " +
                               std::to_string(A.rows()));
    Matrix S(idx.size(), idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r)
        for (std::size_t c = 0; c < idx.size(); ++c)
            S(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                A(idx[r], idx[c]);
    return S;
}

/// All eigenvalues of M with multiplicity, sorted by real part descending,
/// ties by imaginary part descending (conjugate pairs list +i beta first).
/// @throws NumericalDomainError on non-finite entries.
inline std::vector<Complex> spectrum(const Matrix& M) {
    require_finite(M, "matrix");
    if (M.rows() != M.cols())
        throw PreconditionFailed("spectrum requires a square matrix");
    if (M.rows() == 0) return {};
    Eigen::EigenSolver<Matrix> solver(M, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw NumericalDomainError("eigenvalue iteration failed to converge");
    std::vector<Complex> eigs(static_cast<std::size_t>(M.rows()));
    for (Eigen::Index i = 0; i < M.rows(); ++i) eigs[static_cast<std::size_t>(i)] = solver.eigenvalues()[i];
    std::sort(eigs.begin(), eigs.end(), [](const Complex& a, const Complex& b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
    return eigs;
}

/// True iff every eigenvalue satisfies Re < -tol (axis-touching counts as
/// not stable; conservative by design).
inline bool is_stable(const Matrix& M, double tol = 1e-9) {
    if (!(tol > 0)) throw PreconditionFailed("is_stable requires tol > 0");
    for (const Complex& z : spectrum(M))
        if (z.real() >= -tol) return false;
    return true;
}

/// Largest eigenvalue modulus.
inline double spectral_radius(const Matrix& M) {
    double rho = 0.0;
    for (const Complex& z : spectrum(M)) rho = std::max(rho, std::abs(z));
    return rho;
}

/// Largest eigenvalue of the symmetric part HA + AᵀH for H = diag(h).
inline double weighted_symmetric_lambda_max(const Matrix& A, const Vector& h) {
    const Matrix M = h.asDiagonal() * A + A.transpose() * h.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Matrix> solver(M, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().maxCoeff();
}

/// Row negative-diagonal quasidominance weights.
///
/// Finds pi > 0 with -pi_i a_ii - sum_{j != i} pi_j |a_ij| > 0 for all i, or
/// returns nullopt. Algorithm: comparison matrix C (C_ii = -a_ii,
/// C_ij = -|a_ij|); quasidominance holds iff C is a nonsingular M-matrix,
/// tested via rho(sI - C) < s with s = max_i(-a_ii); then pi = C^{-1} 1 > 0
/// and the defining inequalities are re-checked numerically before returning.
inline std::optional<Vector> quasidominance_weights(const Matrix& A) {
    require_finite(A, "matrix");
    const Eigen::Index n = A.rows();
    if (n == 0) return std::nullopt;
    for (Eigen::Index i = 0; i < n; ++i)
        if (A(i, i) >= 0.0) return std::nullopt;

    Matrix C(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            C(i, j) = (i == j) ? -A(i, i) : -std::abs(A(i, j));

    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) s = std::max(s, -A(i, i));
    const Matrix B = s * Matrix::Identity(n, n) - C;  // entrywise nonnegative
    if (spectral_radius(B) >= s) return std::nullopt;

    // C is a nonsingular M-matrix; C^{-1} is entrywise nonnegative, so
    // pi = C^{-1} 1 is positive and C pi = 1 gives margin exactly 1 per row
    // in exact arithmetic. Re-verify in floating point to honor the contract.
    Vector pi = C.partialPivLu().solve(Vector::Ones(n));
    for (Eigen::Index i = 0; i < n; ++i)
        if (!(pi[i] > 0.0)) return std::nullopt;
    Vector margin = C * pi;
    for (Eigen::Index i = 0; i < n; ++i)
        if (!(margin[i] > 0.0)) return std::nullopt;
    return pi;
}

namespace detail {

/// Projection onto the simplex {h_i >= floor, sum h_i = 1} (Euclidean).
/// Assumes n * floor < 1.
inline Vector project_to_simplex(Vector h, double floor) {
    const Eigen::Index n = h.size();
    // Shift so the constraint becomes the standard simplex of mass 1 - n*floor.
    const double mass = 1.0 - floor * static_cast<double>(n);
    Vector y = h - Vector::Constant(n, floor);
    // Sort descending, find the threshold tau (standard simplex projection).
    std::vector<double> u(y.data(), y.data() + n);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double cumsum = 0.0;
    double tau = 0.0;
    int k = 0;
    for (int i = 0; i < static_cast<int>(u.size()); ++i) {
        cumsum += u[static_cast<std::size_t>(i)];
        const double t = (cumsum - mass) / static_cast<double>(i + 1);
        if (u[static_cast<std::size_t>(i)] - t > 0.0) {
            tau = t;
            k = i + 1;
        }
    }
    if (k == 0) tau = (cumsum - mass) / static_cast<double>(n);
    for (Eigen::Index i = 0; i < n; ++i)
        y[i] = std::max(y[i] - tau, 0.0) + floor;
    return y;
}

}  // namespace detail

/// Three-stage VL-stability decision.
///
/// 1. Quasidominance: if weights pi exist, verify lambda_max for H = diag(pi)
///    directly; a verified negative value certifies VL.
/// 2. Convex search: minimize f(h) = lambda_max(diag(h)A + Aᵀdiag(h)) over
///    the simplex {h_i >= 1e-6, sum h = 1} by projected subgradient (f is
///    convex: the matrix argument is linear in h and lambda_max is convex);
///    any point with f < -tol certifies VL.
/// 3. Fallback: if A itself is not stable, VL is impossible
///    (CertifiedNotStable); otherwise Unknown — exhausting max_iters is an
///    honest inconclusive, not an error.
inline VLCertificate certify_vl_stability(const Matrix& A, double tol = 1e-9,
                                          int max_iters = 2000) {
    if (!(tol > 0)) throw PreconditionFailed("certify_vl_stability requires tol > 0");
    require_finite(A, "matrix");
    const Eigen::Index n = A.rows();
    VLCertificate cert;

    if (n == 0) return cert;

    // Stage 1: quasidominance weights, directly verified.
    if (auto pi = quasidominance_weights(A)) {
        const double lm = weighted_symmetric_lambda_max(A, *pi);
        if (lm < -tol) {
            cert.verdict = VLVerdict::CertifiedVL;
            cert.h = *pi;
            cert.lambda_max = lm;
            cert.method = VLMethod::Quasidominance;
            return cert;
        }
        // Quasidominant matrices are VL-stable, but diag(pi) itself need not
        // witness it (row dominance does not bound the columns); fall through
        // to the convex search.
    }

    // Stage 2: projected subgradient on the simplex.
    const double floor = 1e-6;
    if (floor * static_cast<double>(n) < 1.0) {
        Vector h = Vector::Constant(n, 1.0 / static_cast<double>(n));
        Vector best_h = h;
        double best_f = std::numeric_limits<double>::infinity();
        for (int k = 0; k < max_iters; ++k) {
            const Matrix M = h.asDiagonal() * A + A.transpose() * h.asDiagonal();
            Eigen::SelfAdjointEigenSolver<Matrix> solver(M);
            const double f = solver.eigenvalues().maxCoeff();
            if (f < best_f) {
                best_f = f;
                best_h = h;
                if (best_f < -tol) break;  // witness found
            }
            // Subgradient of lambda_max at h: g_i = 2 v_i (A v)_i for a unit
            // top eigenvector v.
            Eigen::Index top;
            solver.eigenvalues().maxCoeff(&top);
            const Vector v = solver.eigenvectors().col(top);
            const Vector Av = A * v;
            Vector g(n);
            for (Eigen::Index i = 0; i < n; ++i) g[i] = 2.0 * v[i] * Av[i];
            const double gn = g.norm();
            if (gn == 0.0) break;
            const double step = 0.5 / (gn * std::sqrt(static_cast<double>(k + 1)));
            h = detail::project_to_simplex(h - step * g, floor);
        }
        if (best_f < -tol) {
            // Re-verify at the reported point (defensive; solver round-off).
            const double lm = weighted_symmetric_lambda_max(A, best_h);
            if (lm < -tol) {
                cert.verdict = VLVerdict::CertifiedVL;
                cert.h = best_h;
                cert.lambda_max = lm;
                cert.method = VLMethod::ConvexSearch;
                return cert;
            }
        }
    }

    // Stage 3: contrapositive of "VL implies stable".
    if (!is_stable(A, tol)) {
        cert.verdict = VLVerdict::CertifiedNotStable;
        cert.method = VLMethod::ConvexSearch;
        return cert;
    }
    cert.verdict = VLVerdict::Unknown;
    return cert;
}

/// Randomized D-stability falsifier: samples positive diagonal matrices D
/// with log-uniform entries in [1e-3, 1e3] and returns the first witness for
/// which DA is not stable. `nullopt` means "no witness found", which does NOT
/// certify D-stability (the test is one-sided by design).
inline std::optional<Matrix> d_stability_falsifier(const Matrix& A, int samples,
                                                   std::uint64_t seed) {
    if (samples < 1) throw PreconditionFailed("d_stability_falsifier requires samples >= 1");
    require_finite(A, "matrix");
    const Eigen::Index n = A.rows();
    for (int k = 0; k < samples; ++k) {
        Rng rng = Rng::substream(seed, 0xD5, static_cast<std::uint64_t>(k));
        Vector d(n);
        for (Eigen::Index i = 0; i < n; ++i) d[i] = rng.log_uniform(1e-3, 1e3);
        const Matrix DA = d.asDiagonal() * A;
        if (!is_stable(DA)) return Matrix(d.asDiagonal());
    }
    return std::nullopt;
}

}  // namespace lvig
