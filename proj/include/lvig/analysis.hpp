#pragma once

/// @file analysis.hpp
/// @brief End-to-end pipeline: certify, enumerate, scheme, graphs, diff.
///
/// This is the programmatic core behind the CLI's analyze/graph commands so
/// that the whole flow is testable without spawning processes. All rendering
/// is deterministic: fixed decimal formats, canonical orderings, no locale
/// dependence.

#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lvig/attractor_graphs.hpp"
#include "lvig/community.hpp"
#include "lvig/equilibria.hpp"
#include "lvig/errors.hpp"
#include "lvig/matrix_analysis.hpp"
#include "lvig/ode_oracle.hpp"
#include "lvig/system_io.hpp"
#include "lvig/types.hpp"

namespace lvig {

struct AnalysisOptions {
    Tolerances tolerances;
    /// Run the trajectory oracle over every merged-graph edge.
    bool verify_edges = false;
    double verify_eps = 1e-4;
    double verify_t_max = 1e4;
    double verify_tol = 1e-4;
    /// Compute the GASS map with parallel workers (same result either way).
    bool parallel = true;
};

/// Verdict for one edge from the trajectory oracle.
struct EdgeVerification {
    Community source;
    Community target;
    enum class Outcome { Verified, Refuted, Inconclusive } outcome;
    std::string detail;  ///< populated for Inconclusive
};

struct AnalysisResult {
    LVSystem sys;
    EquilibriumCatalog catalog;
    InvasionScheme scheme;
    bool certified = false;  ///< accepting VL certificate present

    // Populated only when certified:
    GassMap gass_map;
    AttractorGraph ig;
    AttractorGraph is;
    AttractorGraph merged;
    GraphDiff diff;
    std::optional<Equilibrium> gass;  ///< full-system GASS
    std::vector<EdgeVerification> verifications;

    bool coincide() const { return certified && diff.identical(); }

    bool anomalies() const {
        return catalog.degenerate_count() > 0 ||
               (certified && (!ig.self_edge_anomalies.empty() ||
                              !is.self_edge_anomalies.empty()));
    }

    /// Clean means: certified, graphs coincide, no anomalies, all hyperbolic.
    bool clean() const {
        return certified && coincide() && !anomalies() && scheme.all_hyperbolic();
    }
};

/// Runs the full pipeline. The invasion graph and scheme are always built;
/// the information structure, merged graph, and diff require an accepting
/// certificate (a system failing certification still yields a partial result
/// with certified = false rather than an exception).
inline AnalysisResult run_analysis(LVSystem sys, const AnalysisOptions& options = {}) {
    AnalysisResult res;
    res.sys = std::move(sys);
    res.catalog = enumerate_admissible(res.sys, options.tolerances.positivity);
    res.scheme = invasion_scheme(res.sys, res.catalog, options.tolerances.sign);
    res.ig = build_ig(res.scheme);
    res.certified = res.sys.vl_certificate.certified_vl();
    if (!res.certified) return res;

    res.gass_map = find_gass_map(res.sys, options.tolerances.lcp, options.parallel);
    res.is = build_is(res.sys, res.gass_map, res.scheme);
    res.gass = res.gass_map.at(Community::full(res.sys.n()));
    res.diff = compare_graphs(res.ig, res.is);
    res.merged = merge_graphs(res.ig, res.is);
    res.ig.mark_gass(res.gass->community);
    res.is.mark_gass(res.gass->community);
    res.merged.mark_gass(res.gass->community);
    if (res.catalog.is_admissible(res.gass->community))
        res.catalog.at(res.gass->community).is_gass = true;

    if (options.verify_edges) {
        for (GraphEdge& e : res.merged.edges) {
            EdgeVerification v{e.source, e.target,
                               EdgeVerification::Outcome::Inconclusive, ""};
            try {
                const bool ok =
                    verify_edge(res.sys, res.catalog, e.source, e.target,
                                options.verify_eps, options.verify_t_max,
                                options.verify_tol);
                v.outcome = ok ? EdgeVerification::Outcome::Verified
                               : EdgeVerification::Outcome::Refuted;
                if (ok) e.provenance = EdgeProvenance::OdeVerified;
            } catch (const VerificationInconclusive& ex) {
                v.detail = ex.what();
            } catch (const NotAnUnstableDirection& ex) {
                v.outcome = EdgeVerification::Outcome::Refuted;
                v.detail = ex.what();
            }
            res.verifications.push_back(std::move(v));
        }
    }
    return res;
}

inline AnalysisResult run_analysis(const SystemFile& file,
                                   AnalysisOptions options = {}) {
    options.tolerances = file.tolerances;
    return run_analysis(instantiate(file), options);
}

namespace detail {

inline std::string pad_right(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

}  // namespace detail

/// Renders the human-readable report for the analyze command. Deterministic
/// byte-for-byte for a fixed result.
inline std::string render_analysis(const AnalysisResult& res) {
    std::ostringstream os;
    const int n = res.sys.n();
    os << "system: " << (res.sys.name.empty() ? "(unnamed)" : res.sys.name)
       << "  (n = " << n << ")\n";

    const VLCertificate& cert = res.sys.vl_certificate;
    os << "certificate: " << to_string(cert.verdict) << " via "
       << to_string(cert.method);
    if (cert.lambda_max) {
        std::ostringstream lm;
        lm << std::scientific << std::setprecision(6) << *cert.lambda_max;
        os << " (lambda_max = " << lm.str() << ")";
    }
    os << "\n\n";

    std::size_t name_width = 2;
    for (const Equilibrium& eq : res.catalog.equilibria)
        name_width = std::max(name_width, to_string(eq.community).size());

    os << "admissible communities: " << res.catalog.equilibria.size() << " of "
       << (std::size_t{1} << n) << "\n";
    for (const Equilibrium& eq : res.catalog.equilibria) {
        os << "  " << detail::pad_right(to_string(eq.community), name_width + 2)
           << "u* = " << format_vector(eq.u_star, 6);
        if (!eq.hyperbolic) os << "  [nonhyperbolic]";
        if (eq.is_gass) os << "  [GASS]";
        os << "\n";
    }
    if (res.catalog.degenerate_count() > 0) {
        os << "degenerate subsets (singular restriction):";
        for (const Community& c : res.catalog.degenerate_subsets)
            os << " " << to_string(c);
        os << "\n";
    }
    os << "\n";

    os << "invasion scheme (+/-/0 per species, '.' for members):\n";
    for (const InvasionScheme::Row& row : res.scheme.rows) {
        os << "  " << detail::pad_right(to_string(row.eq.community), name_width + 2);
        for (int i = 0; i < n; ++i) {
            if (row.eq.community.contains(i)) {
                os << " .";
            } else {
                const int s = row.signs[static_cast<std::size_t>(i)];
                os << " " << (s > 0 ? '+' : (s < 0 ? '-' : '0'));
            }
        }
        os << "\n";
    }
    os << "\n";

    if (!res.certified) {
        os << "information structure: skipped (no accepting VL certificate)\n";
        os << "invasion graph edges: " << res.ig.edges.size() << "\n";
        return os.str();
    }

    os << "invasion graph: " << res.ig.edges.size()
       << " edges; information structure: " << res.is.edges.size() << " edges\n";
    if (res.diff.identical()) {
        os << "graph diff: empty (constructions coincide)\n";
    } else {
        os << "graph diff: " << res.diff.only_in_first.size()
           << " edge(s) only in invasion graph, " << res.diff.only_in_second.size()
           << " only in information structure\n";
        for (const GraphEdge& e : res.diff.only_in_first)
            os << "  IG only: " << to_string(e.source) << " -> " << to_string(e.target)
               << "\n";
        for (const GraphEdge& e : res.diff.only_in_second)
            os << "  IS only: " << to_string(e.source) << " -> " << to_string(e.target)
               << "\n";
    }
    const std::size_t anomaly_count =
        res.ig.self_edge_anomalies.size() + res.is.self_edge_anomalies.size();
    if (anomaly_count > 0) os << "self-edge anomalies: " << anomaly_count << "\n";
    if (!res.scheme.all_hyperbolic())
        os << "warning: nonhyperbolic equilibria present (zero invasion rate)\n";

    if (res.gass)
        os << "GASS: " << to_string(res.gass->community) << "  u* = "
           << format_vector(res.gass->u_star, 6) << "\n";

    try {
        const std::vector<Community> order = topological_order(res.merged);
        os << "topological order:";
        for (const Community& c : order) os << " " << to_string(c);
        os << "\n";
    } catch (const NotADAG&) {
        os << "topological order: unavailable (cycle detected)\n";
    }

    if (!res.verifications.empty()) {
        os << "\nedge verification (trajectory oracle):\n";
        for (const EdgeVerification& v : res.verifications) {
            os << "  " << to_string(v.source) << " -> " << to_string(v.target) << ": ";
            switch (v.outcome) {
                case EdgeVerification::Outcome::Verified: os << "verified"; break;
                case EdgeVerification::Outcome::Refuted: os << "refuted"; break;
                default: os << "inconclusive"; break;
            }
            os << "\n";
        }
    }
    return os.str();
}

}  // namespace lvig
