#pragma once

/// @file equilibria.hpp
/// @brief Admissible communities, equilibria, linearizations, invasion rates.
///
/// For the dynamics u_i' = u_i (b_i + sum_j a_ij u_j), a community I is
/// admissible when the restricted linear system A(I) v = -b(I) has a strictly
/// positive solution; that v (padded with zeros) is the equilibrium supported
/// on I. The linearization at such an equilibrium is block-triangular in the
/// members-first variable ordering, with the diagonal outsider block carrying
/// the invasion rates r_i(I) = b_i + sum_{j in I} a_ij u*_j.

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lvig/community.hpp"
#include "lvig/errors.hpp"
#include "lvig/matrix_analysis.hpp"
#include "lvig/types.hpp"

namespace lvig {

/// A Lotka-Volterra system together with its VL-stability certificate.
struct LVSystem {
    Matrix A;
    Vector b;
    VLCertificate vl_certificate;
    std::string name;

    int n() const { return static_cast<int>(A.rows()); }
};

/// Builds a system and runs the three-stage VL certification on A.
inline LVSystem make_system(Matrix A, Vector b, std::string name = "",
                            double stability_tol = 1e-9, int max_iters = 2000) {
    require_finite(A, "A");
    require_finite(b, "b");
    if (A.rows() != A.cols() || A.rows() != b.size())
        throw PreconditionFailed("system dimensions disagree");
    if (A.rows() > kMaxSpecies)
        throw PreconditionFailed("n <= 24 supported");
    LVSystem sys{std::move(A), std::move(b), VLCertificate{}, std::move(name)};
    sys.vl_certificate = certify_vl_stability(sys.A, stability_tol, max_iters);
    return sys;
}

/// Builds a system whose VL-stability is asserted by the caller (no search).
inline LVSystem make_system_asserted(Matrix A, Vector b, std::string name = "") {
    require_finite(A, "A");
    require_finite(b, "b");
    if (A.rows() != A.cols() || A.rows() != b.size())
        throw PreconditionFailed("system dimensions disagree");
    if (A.rows() > kMaxSpecies)
        throw PreconditionFailed("n <= 24 supported");
    return LVSystem{std::move(A), std::move(b), VLCertificate::user_asserted(),
                    std::move(name)};
}

/// Every admissible equilibrium of a system, in canonical community order,
/// plus diagnostics about the subsets that were not admissible for numerical
/// reasons.
struct EquilibriumCatalog {
    int n = 0;
    std::vector<Equilibrium> equilibria;  ///< canonical order; [0] is {}
    /// Subsets J whose restricted matrix A(J) was numerically singular.
    std::vector<Community> degenerate_subsets;
    /// (J, species) pairs whose solution was positive but within the
    /// positivity tolerance — boundary cases encoding near-nonhyperbolicity.
    std::vector<std::pair<Community, int>> boundary_cases;

    int degenerate_count() const {
        return static_cast<int>(degenerate_subsets.size());
    }

    bool is_admissible(Community I) const { return index_.count(I.bits()) > 0; }

    const Equilibrium* find(Community I) const {
        auto it = index_.find(I.bits());
        return it == index_.end() ? nullptr : &equilibria[it->second];
    }

    /// @throws InvalidCommunity when I is not admissible.
    const Equilibrium& at(Community I) const {
        if (const Equilibrium* eq = find(I)) return *eq;
        throw InvalidCommunity("community " + to_string(I) + " is not admissible");
    }

    Equilibrium& at(Community I) {
        auto it = index_.find(I.bits());
        if (it == index_.end())
            throw InvalidCommunity("community " + to_string(I) + " is not admissible");
        return equilibria[it->second];
    }

    void add(Equilibrium eq) {
        index_.emplace(eq.community.bits(), equilibria.size());
        equilibria.push_back(std::move(eq));
    }

private:
    std::unordered_map<std::uint32_t, std::size_t> index_;
};

/// Enumerates all admissible communities by solving the 2^n restricted linear
/// systems. The empty community (u* = 0) is always admissible. Singular A(J)
/// are recorded, not thrown.
inline EquilibriumCatalog enumerate_admissible(const LVSystem& sys,
                                               double positivity_tol = 1e-9) {
    if (!(positivity_tol > 0))
        throw PreconditionFailed("enumerate_admissible requires tol > 0");
    const int n = sys.n();
    EquilibriumCatalog catalog;
    catalog.n = n;

    for (Community J : enumerate_subsets(n)) {
        if (J.is_empty()) {
            catalog.add(Equilibrium{J, Vector::Zero(n), true, true, false});
            continue;
        }
        const Matrix AJ = principal_submatrix(sys.A, J);
        const auto idx = J.members();
        Vector bJ(static_cast<Eigen::Index>(idx.size()));
        for (std::size_t k = 0; k < idx.size(); ++k)
            bJ[static_cast<Eigen::Index>(k)] = sys.b[idx[k]];
        Eigen::FullPivLU<Matrix> lu(AJ);
        if (!lu.isInvertible()) {
            catalog.degenerate_subsets.push_back(J);
            continue;
        }
        const Vector v = lu.solve(-bJ);
        bool admissible = true;
        for (Eigen::Index k = 0; k < v.size(); ++k) {
            if (v[k] > positivity_tol) continue;
            admissible = false;
            if (v[k] > 0.0)  // positive but within tolerance: boundary case
                catalog.boundary_cases.emplace_back(J, idx[static_cast<std::size_t>(k)]);
        }
        if (!admissible) continue;
        Vector u = Vector::Zero(n);
        for (std::size_t k = 0; k < idx.size(); ++k)
            u[idx[k]] = v[static_cast<Eigen::Index>(k)];
        catalog.add(Equilibrium{J, std::move(u), true, true, false});
    }
    return catalog;
}

/// Block linearization at an admissible equilibrium, in the members-first
/// variable ordering:
///
///   full_B = [ B11  B12 ]   B11_kl = a_{m_k m_l} u*_{m_k}
///            [  0   B22 ]   B22_l  = b_{o_l} + sum_{j in I} a_{o_l j} u*_j
///
/// so the spectrum is spectrum(B11) together with the B22 diagonal (the
/// invasion rates). `permutation` maps block position -> natural index, and
/// full_B_natural() undoes the reordering to give the plain Jacobian DF(u*).
struct Linearization {
    Community community;
    std::vector<int> permutation;  ///< members ascending, then outsiders
    Matrix B11;
    Matrix B12;
    Vector B22;
    Matrix full_B;  ///< assembled block matrix (block ordering)

    /// Jacobian in the natural variable order.
    Matrix full_B_natural() const {
        const Eigen::Index n = full_B.rows();
        Matrix M(n, n);
        for (Eigen::Index r = 0; r < n; ++r)
            for (Eigen::Index c = 0; c < n; ++c)
                M(permutation[static_cast<std::size_t>(r)],
                  permutation[static_cast<std::size_t>(c)]) = full_B(r, c);
        return M;
    }
};

/// @throws PreconditionFailed when eq is not admissible.
inline Linearization linearize(const LVSystem& sys, const Equilibrium& eq) {
    if (!eq.admissible)
        throw PreconditionFailed("linearize requires an admissible equilibrium");
    const int n = sys.n();
    const auto mem = eq.community.members();
    std::vector<int> out;
    for (int i = 0; i < n; ++i)
        if (!eq.community.contains(i)) out.push_back(i);

    const int k = static_cast<int>(mem.size());
    const int m = static_cast<int>(out.size());

    Linearization lin;
    lin.community = eq.community;
    lin.permutation = mem;
    lin.permutation.insert(lin.permutation.end(), out.begin(), out.end());

    lin.B11.resize(k, k);
    for (int r = 0; r < k; ++r)
        for (int c = 0; c < k; ++c)
            lin.B11(r, c) = sys.A(mem[static_cast<std::size_t>(r)],
                                  mem[static_cast<std::size_t>(c)]) *
                            eq.u_star[mem[static_cast<std::size_t>(r)]];

    lin.B12.resize(k, m);
    for (int r = 0; r < k; ++r)
        for (int c = 0; c < m; ++c)
            lin.B12(r, c) = sys.A(mem[static_cast<std::size_t>(r)],
                                  out[static_cast<std::size_t>(c)]) *
                            eq.u_star[mem[static_cast<std::size_t>(r)]];

    lin.B22.resize(m);
    for (int c = 0; c < m; ++c) {
        const int i = out[static_cast<std::size_t>(c)];
        double r = sys.b[i];
        for (int j : mem) r += sys.A(i, j) * eq.u_star[j];
        lin.B22[c] = r;
    }

    lin.full_B = Matrix::Zero(n, n);
    lin.full_B.topLeftCorner(k, k) = lin.B11;
    lin.full_B.topRightCorner(k, m) = lin.B12;
    lin.full_B.bottomRightCorner(m, m) = Matrix(lin.B22.asDiagonal());
    return lin;
}

/// Invasion rate r_i(I) of species i against the equilibrium of community I.
/// Exactly zero (by construction, no recomputation) for members of I.
/// @throws InvalidCommunity when I is not admissible.
inline double invasion_rate(const LVSystem& sys, const EquilibriumCatalog& catalog,
                            Community I, int i) {
    const Equilibrium& eq = catalog.at(I);
    if (I.contains(i)) return 0.0;
    double r = sys.b[i];
    for (int j : I.members()) r += sys.A(i, j) * eq.u_star[j];
    return r;
}

/// The sign table of all invasion rates over the admissible communities.
/// Rows (one per admissible community, canonical order) carry the equilibrium,
/// the full rate vector, and the signs under the sign tolerance. A row with a
/// zero sign for an outsider species marks the equilibrium nonhyperbolic.
struct InvasionScheme {
    struct Row {
        Equilibrium eq;
        Vector rates;            ///< r_i(I); exactly 0 for members
        std::vector<int> signs;  ///< -1 / 0 / +1 per species; 0 for members
    };

    int n = 0;
    double sign_tol = 1e-9;
    std::vector<Row> rows;  ///< canonical community order

    const Row* find(Community I) const {
        auto it = index_.find(I.bits());
        return it == index_.end() ? nullptr : &rows[it->second];
    }

    const Row& row(Community I) const {
        if (const Row* r = find(I)) return *r;
        throw InvalidCommunity("community " + to_string(I) + " is not admissible");
    }

    /// Sign of r_i(I) under the tolerance; 0 for members of I.
    int sign(Community I, int i) const { return row(I).signs[static_cast<std::size_t>(i)]; }

    double rate(Community I, int i) const { return row(I).rates[i]; }

    bool all_hyperbolic() const {
        for (const Row& r : rows)
            if (!r.eq.hyperbolic) return false;
        return true;
    }

    void add(Row row_in) {
        index_.emplace(row_in.eq.community.bits(), rows.size());
        rows.push_back(std::move(row_in));
    }

private:
    std::unordered_map<std::uint32_t, std::size_t> index_;
};

/// Computes the invasion scheme over an enumerated catalog. Rates within
/// sign_tol of zero are recorded as sign 0 and flag the owning equilibrium
/// nonhyperbolic, both in the scheme row and in the catalog.
inline InvasionScheme invasion_scheme(const LVSystem& sys,
                                      EquilibriumCatalog& catalog,
                                      double sign_tol = 1e-9) {
    if (!(sign_tol > 0))
        throw PreconditionFailed("invasion_scheme requires sign_tol > 0");
    InvasionScheme scheme;
    scheme.n = sys.n();
    scheme.sign_tol = sign_tol;
    for (Equilibrium& eq : catalog.equilibria) {
        InvasionScheme::Row row;
        row.rates = Vector::Zero(sys.n());
        row.signs.assign(static_cast<std::size_t>(sys.n()), 0);
        bool hyperbolic = true;
        for (int i = 0; i < sys.n(); ++i) {
            if (eq.community.contains(i)) continue;
            const double r = invasion_rate(sys, catalog, eq.community, i);
            row.rates[i] = r;
            if (r > sign_tol)
                row.signs[static_cast<std::size_t>(i)] = 1;
            else if (r < -sign_tol)
                row.signs[static_cast<std::size_t>(i)] = -1;
            else
                hyperbolic = false;  // sign 0 for an outsider
        }
        eq.hyperbolic = hyperbolic;
        row.eq = eq;
        scheme.add(std::move(row));
    }
    return scheme;
}

/// Rate-based hyperbolicity verdict per admissible community, cross-checked
/// against the eigenvalues of the assembled block matrix.
///
/// Under a VL certificate the member block B11 is strictly stable, so the
/// equilibrium is hyperbolic exactly when every outsider rate is nonzero.
/// The cross-check matches each rate to the nearest eigenvalue of full_B; a
/// mismatch beyond the multiset bridge (1e-7), or a B11 eigenvalue touching
/// the axis while the certificate claims VL, raises InternalConsistencyError
/// — the latter can only happen when a UserAsserted certificate is false.
///
/// @throws PreconditionFailed without an accepting certificate.
/// @throws InternalConsistencyError as described.
inline std::map<Community, bool, CanonicalLess> hyperbolicity_report(
    const LVSystem& sys, EquilibriumCatalog& catalog, double sign_tol = 1e-9) {
    if (!sys.vl_certificate.certified_vl())
        throw PreconditionFailed(
            "hyperbolicity_report requires a CertifiedVL (or UserAsserted) certificate");
    constexpr double kBridge = 1e-7;  // block-spectrum multiset tolerance

    std::map<Community, bool, CanonicalLess> report;
    for (Equilibrium& eq : catalog.equilibria) {
        const Linearization lin = linearize(sys, eq);
        bool rate_hyperbolic = true;
        for (Eigen::Index l = 0; l < lin.B22.size(); ++l)
            if (std::abs(lin.B22[l]) <= sign_tol) rate_hyperbolic = false;

        // Match every rate to its nearest unused eigenvalue of full_B.
        std::vector<Complex> eigs = spectrum(lin.full_B);
        std::vector<bool> used(eigs.size(), false);
        for (Eigen::Index l = 0; l < lin.B22.size(); ++l) {
            const double r = lin.B22[l];
            double best = std::numeric_limits<double>::infinity();
            std::size_t best_k = 0;
            for (std::size_t k = 0; k < eigs.size(); ++k) {
                if (used[k]) continue;
                const double d = std::abs(eigs[k] - Complex(r, 0.0));
                if (d < best) { best = d; best_k = k; }
            }
            if (best > kBridge)
                throw InternalConsistencyError(
                    "rate " + std::to_string(r) + " at " + to_string(eq.community) +
                    " has no matching eigenvalue (nearest at distance " +
                    std::to_string(best) + ")");
            used[best_k] = true;
        }
        // Leftover eigenvalues belong to B11; under VL they must stay strictly
        // left of the axis. An axis-touching one falsifies the certificate.
        for (std::size_t k = 0; k < eigs.size(); ++k) {
            if (used[k]) continue;
            if (eigs[k].real() >= -sign_tol)
                throw InternalConsistencyError(
                    "member-block eigenvalue with Re = " +
                    std::to_string(eigs[k].real()) + " at " + to_string(eq.community) +
                    " contradicts the VL certificate");
        }
        eq.hyperbolic = rate_hyperbolic;
        report.emplace(eq.community, rate_hyperbolic);
    }
    return report;
}

}  // namespace lvig
