#pragma once

/// @file attractor_graphs.hpp
/// @brief Invasion graph and information structure over the admissible
///        communities, with comparison, ordering, and DOT/JSON round trips.
///
/// Both graphs share the node set (all admissible communities). The invasion
/// graph draws an edge I -> J from rate sign conditions alone; the information
/// structure draws I -> support(GASS(K)) for every augmented community K
/// reachable by adding positive-rate invaders to I. For VL-stable interaction
/// matrices with an all-hyperbolic catalog the two constructions coincide and
/// the shared graph is acyclic.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "lvig/community.hpp"
#include "lvig/equilibria.hpp"
#include "lvig/errors.hpp"
#include "lvig/lcp.hpp"
#include "lvig/parallel.hpp"
#include "lvig/types.hpp"

namespace lvig {

enum class GraphKind { Invasion, Information, Merged };

/// Where an edge came from: invasion-rate sign conditions, a GASS transition,
/// both (after a merge), or direct trajectory verification.
enum class EdgeProvenance { RateConditions, GassTransition, Both, OdeVerified };

inline std::string to_string(GraphKind k) {
    switch (k) {
        case GraphKind::Invasion: return "invasion";
        case GraphKind::Information: return "information";
        default: return "merged";
    }
}

inline std::string to_string(EdgeProvenance p) {
    switch (p) {
        case EdgeProvenance::RateConditions: return "rate-conditions";
        case EdgeProvenance::GassTransition: return "gass-transition";
        case EdgeProvenance::Both: return "both";
        default: return "ode-verified";
    }
}

inline EdgeProvenance provenance_from_string(const std::string& s) {
    if (s == "rate-conditions") return EdgeProvenance::RateConditions;
    if (s == "gass-transition") return EdgeProvenance::GassTransition;
    if (s == "both") return EdgeProvenance::Both;
    if (s == "ode-verified") return EdgeProvenance::OdeVerified;
    throw InvalidInput("unknown edge provenance '" + s + "'");
}

struct GraphEdge {
    Community source;
    Community target;
    /// Number of distinct augmented communities K that induced this edge
    /// (always 1 for invasion-graph edges).
    int multiplicity = 1;
    EdgeProvenance provenance = EdgeProvenance::RateConditions;
};

/// Directed graph over the admissible communities. `nodes` and `node_info`
/// are parallel vectors in canonical order; edges are sorted by
/// (source, target) so traversals and exports are deterministic.
struct AttractorGraph {
    GraphKind kind = GraphKind::Invasion;
    int n = 0;
    std::vector<Community> nodes;        ///< canonical order
    std::vector<Equilibrium> node_info;  ///< parallel to nodes
    std::vector<GraphEdge> edges;        ///< sorted by (source, target)
    /// GASS transitions that mapped an augmented community back onto its own
    /// base I (impossible under VL with a hyperbolic catalog; kept as a
    /// numerical anomaly record instead of an edge).
    std::vector<Community> self_edge_anomalies;

    std::optional<std::size_t> node_index(Community c) const {
        const auto it = std::lower_bound(nodes.begin(), nodes.end(), c, CanonicalLess{});
        if (it == nodes.end() || !(*it == c)) return std::nullopt;
        return static_cast<std::size_t>(it - nodes.begin());
    }

    bool has_node(Community c) const { return node_index(c).has_value(); }

    const Equilibrium& node_equilibrium(Community c) const {
        const auto k = node_index(c);
        if (!k) throw InvalidCommunity("community " + to_string(c) + " is not a node");
        return node_info[*k];
    }

    /// Flags the given node as the globally stable community (for exports).
    void mark_gass(Community c) {
        const auto k = node_index(c);
        if (!k) throw InvalidCommunity("community " + to_string(c) + " is not a node");
        for (Equilibrium& eq : node_info) eq.is_gass = false;
        node_info[*k].is_gass = true;
    }

    GraphEdge* find_edge(Community s, Community t) {
        for (GraphEdge& e : edges)
            if (e.source == s && e.target == t) return &e;
        return nullptr;
    }

    const GraphEdge* find_edge(Community s, Community t) const {
        for (const GraphEdge& e : edges)
            if (e.source == s && e.target == t) return &e;
        return nullptr;
    }

    bool has_edge(Community s, Community t) const { return find_edge(s, t) != nullptr; }

    std::vector<Community> successors(Community s) const {
        std::vector<Community> out;
        for (const GraphEdge& e : edges)
            if (e.source == s) out.push_back(e.target);
        return out;
    }

    void sort_edges() {
        std::sort(edges.begin(), edges.end(), [](const GraphEdge& a, const GraphEdge& b) {
            if (!(a.source == b.source)) return canonical_less(a.source, b.source);
            return canonical_less(a.target, b.target);
        });
    }
};

namespace detail {

inline void sort_nodes_with_info(std::vector<Community>& nodes,
                                 std::vector<Equilibrium>& info) {
    std::vector<std::size_t> order(nodes.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return canonical_less(nodes[a], nodes[b]);
    });
    std::vector<Community> sn(nodes.size());
    std::vector<Equilibrium> si(nodes.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
        sn[k] = nodes[order[k]];
        si[k] = info[order[k]];
    }
    nodes = std::move(sn);
    info = std::move(si);
}

}  // namespace detail

/// Builds the invasion graph from the sign table: edge I -> J (I != J, both
/// admissible) iff every member of J \ I has a strictly positive invasion
/// rate at I and every member of I \ J has a strictly negative invasion rate
/// at J (each condition vacuous over an empty difference set). Signs within
/// tolerance of zero block the edge.
inline AttractorGraph build_ig(const InvasionScheme& scheme) {
    AttractorGraph g;
    g.kind = GraphKind::Invasion;
    g.n = scheme.n;
    for (const InvasionScheme::Row& row : scheme.rows) {
        g.nodes.push_back(row.eq.community);
        g.node_info.push_back(row.eq);
    }
    detail::sort_nodes_with_info(g.nodes, g.node_info);

    for (const InvasionScheme::Row& src : scheme.rows) {
        const Community I = src.eq.community;
        for (const InvasionScheme::Row& dst : scheme.rows) {
            const Community J = dst.eq.community;
            if (I == J) continue;
            bool ok = true;
            for (int i : J.minus(I).members())
                if (src.signs[static_cast<std::size_t>(i)] != 1) { ok = false; break; }
            if (!ok) continue;
            for (int i : I.minus(J).members())
                if (dst.signs[static_cast<std::size_t>(i)] != -1) { ok = false; break; }
            if (!ok) continue;
            g.edges.push_back({I, J, 1, EdgeProvenance::RateConditions});
        }
    }
    g.sort_edges();
    return g;
}

/// Complete map from every community K (all 2^n of them) to the GASS of the
/// subsystem restricted to K, embedded back into n coordinates. The empty
/// community maps to the zero equilibrium.
struct GassMap {
    std::map<Community, Equilibrium, CanonicalLess> entries;

    bool contains(Community K) const { return entries.count(K) > 0; }

    const Equilibrium& at(Community K) const {
        const auto it = entries.find(K);
        if (it == entries.end())
            throw InvalidCommunity("no GASS recorded for " + to_string(K));
        return it->second;
    }
};

namespace detail {

/// Restricts a VL certificate to a subcommunity. A principal submatrix of a
/// VL-stable matrix is VL-stable with the restricted weights, so the
/// certificate transfers directly; an asserted certificate stays asserted.
inline VLCertificate restrict_certificate(const VLCertificate& cert, Community K) {
    if (cert.method == VLMethod::UserAsserted) return VLCertificate::user_asserted();
    VLCertificate sub;
    sub.verdict = cert.verdict;
    sub.method = cert.method;
    if (cert.h) {
        const auto idx = K.members();
        Vector hK(static_cast<Eigen::Index>(idx.size()));
        for (std::size_t k = 0; k < idx.size(); ++k)
            hK[static_cast<Eigen::Index>(k)] = (*cert.h)[idx[k]];
        sub.h = std::move(hK);
    }
    return sub;
}

/// GASS of the subsystem on K, embedded into full coordinates. K = {} yields
/// the zero equilibrium. LCP failures are rethrown with K attached.
inline Equilibrium subsystem_gass(const LVSystem& sys, Community K, double tol) {
    if (K.is_empty())
        return Equilibrium{K, Vector::Zero(sys.n()), true, true, true};
    const Matrix AK = principal_submatrix(sys.A, K);
    const auto idx = K.members();
    Vector bK(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k)
        bK[static_cast<Eigen::Index>(k)] = sys.b[idx[k]];
    Equilibrium local;
    try {
        local = gass(AK, bK, restrict_certificate(sys.vl_certificate, K), tol);
    } catch (const VLAssumptionViolated& e) {
        throw VLAssumptionViolated(
            std::string(e.what()) + " [subsystem " + to_string(K) + "]", K.bits());
    }
    Equilibrium out;
    out.u_star = Vector::Zero(sys.n());
    for (std::size_t k = 0; k < idx.size(); ++k) {
        const Eigen::Index lk = static_cast<Eigen::Index>(k);
        if (local.community.contains(static_cast<int>(k))) {
            out.community = out.community.with(idx[k]);
            out.u_star[idx[k]] = local.u_star[lk];
        }
    }
    out.admissible = true;
    out.hyperbolic = true;
    out.is_gass = true;
    return out;
}

}  // namespace detail

/// Computes the complete 2^n GASS map, bottom-up in canonical (cardinality,
/// lexicographic) order. With parallel = true the per-community solves run
/// under parallel_for into preassigned slots, producing the identical map for
/// any thread count.
///
/// @throws PreconditionFailed without an accepting VL certificate.
/// @throws VLAssumptionViolated (offending community attached) when a
///         subsystem LCP has no solution or several.
inline GassMap find_gass_map(const LVSystem& sys, double tol = 1e-9,
                             bool parallel = false) {
    if (!sys.vl_certificate.certified_vl())
        throw PreconditionFailed("find_gass_map requires a VL certificate");
    const std::vector<Community> all = enumerate_subsets(sys.n());
    std::vector<Equilibrium> results(all.size());
    if (parallel) {
        parallel_for(all.size(), [&](std::size_t k) {
            results[k] = detail::subsystem_gass(sys, all[k], tol);
        });
    } else {
        for (std::size_t k = 0; k < all.size(); ++k)
            results[k] = detail::subsystem_gass(sys, all[k], tol);
    }
    GassMap map;
    for (std::size_t k = 0; k < all.size(); ++k)
        map.entries.emplace(all[k], results[k]);
    return map;
}

/// Builds the information structure: for each admissible community I with
/// invader set J (strictly positive rates), every K with I < K <= I + J
/// contributes the edge I -> support(GASS(K)). Duplicate (I, target) pairs are
/// collapsed with their count recorded as the edge multiplicity; a K whose
/// GASS support equals I itself is discarded and recorded as an anomaly.
inline AttractorGraph build_is([[maybe_unused]] const LVSystem& sys,
                               const GassMap& gass_map,
                               const InvasionScheme& scheme) {
    AttractorGraph g;
    g.kind = GraphKind::Information;
    g.n = scheme.n;
    for (const InvasionScheme::Row& row : scheme.rows) {
        g.nodes.push_back(row.eq.community);
        g.node_info.push_back(row.eq);
    }
    detail::sort_nodes_with_info(g.nodes, g.node_info);

    std::map<std::pair<std::uint32_t, std::uint32_t>, int> counts;
    for (const InvasionScheme::Row& row : scheme.rows) {
        const Community I = row.eq.community;
        Community inv;
        for (int i = 0; i < scheme.n; ++i)
            if (row.signs[static_cast<std::size_t>(i)] == 1) inv = inv.with(i);
        if (inv.is_empty()) continue;
        for_each_strict_extension(I, inv, [&](Community K) {
            const Community target = gass_map.at(K).community;
            if (target == I) {
                g.self_edge_anomalies.push_back(I);
                return;
            }
            if (!g.has_node(target))
                throw InternalConsistencyError(
                    "GASS support " + to_string(target) + " of subsystem " +
                    to_string(K) + " is not in the admissible catalog");
            ++counts[{I.bits(), target.bits()}];
        });
    }
    for (const auto& [key, mult] : counts)
        g.edges.push_back({Community::from_bits(key.first),
                           Community::from_bits(key.second), mult,
                           EdgeProvenance::GassTransition});
    g.sort_edges();
    return g;
}

/// Convenience overload computing the GASS map internally.
inline AttractorGraph build_is(const LVSystem& sys, const InvasionScheme& scheme,
                               double tol = 1e-9, bool parallel = false) {
    const GassMap map = find_gass_map(sys, tol, parallel);
    return build_is(sys, map, scheme);
}

/// Union of two graphs over the same node set, kind Merged. Edges found in
/// both inputs carry provenance Both and the larger multiplicity.
/// @throws PreconditionFailed when the node sets differ.
inline AttractorGraph merge_graphs(const AttractorGraph& a, const AttractorGraph& b) {
    if (a.n != b.n || a.nodes != b.nodes)
        throw PreconditionFailed("merge_graphs requires identical node sets");
    AttractorGraph g;
    g.kind = GraphKind::Merged;
    g.n = a.n;
    g.nodes = a.nodes;
    g.node_info = a.node_info;
    g.self_edge_anomalies = a.self_edge_anomalies;
    g.self_edge_anomalies.insert(g.self_edge_anomalies.end(),
                                 b.self_edge_anomalies.begin(),
                                 b.self_edge_anomalies.end());
    g.edges = a.edges;
    for (const GraphEdge& e : b.edges) {
        if (GraphEdge* have = g.find_edge(e.source, e.target)) {
            have->provenance = EdgeProvenance::Both;
            have->multiplicity = std::max(have->multiplicity, e.multiplicity);
        } else {
            g.edges.push_back(e);
        }
    }
    g.sort_edges();
    return g;
}

/// Edge-set difference between two graphs sharing a node set.
struct GraphDiff {
    std::vector<GraphEdge> only_in_first;
    std::vector<GraphEdge> only_in_second;

    bool identical() const { return only_in_first.empty() && only_in_second.empty(); }
};

/// @throws PreconditionFailed when the node sets differ.
inline GraphDiff compare_graphs(const AttractorGraph& a, const AttractorGraph& b) {
    if (a.n != b.n || a.nodes != b.nodes)
        throw PreconditionFailed("compare_graphs requires identical node sets");
    GraphDiff diff;
    for (const GraphEdge& e : a.edges)
        if (!b.has_edge(e.source, e.target)) diff.only_in_first.push_back(e);
    for (const GraphEdge& e : b.edges)
        if (!a.has_edge(e.source, e.target)) diff.only_in_second.push_back(e);
    return diff;
}

/// Kahn topological order with ties among ready nodes broken canonically
/// (cardinality ascending, then lexicographic membership).
/// @throws NotADAG carrying one witness cycle as community bitmasks.
inline std::vector<Community> topological_order(const AttractorGraph& g) {
    const std::size_t m = g.nodes.size();
    std::map<std::uint32_t, std::size_t> pos;
    for (std::size_t k = 0; k < m; ++k) pos.emplace(g.nodes[k].bits(), k);

    std::vector<int> indegree(m, 0);
    std::vector<std::vector<std::size_t>> succ(m);
    for (const GraphEdge& e : g.edges) {
        const std::size_t s = pos.at(e.source.bits());
        const std::size_t t = pos.at(e.target.bits());
        succ[s].push_back(t);
        ++indegree[t];
    }

    auto cmp = [&](std::size_t a, std::size_t b) {
        return canonical_less(g.nodes[b], g.nodes[a]);  // min-heap on canonical order
    };
    std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(cmp)> ready(cmp);
    for (std::size_t k = 0; k < m; ++k)
        if (indegree[k] == 0) ready.push(k);

    std::vector<Community> order;
    order.reserve(m);
    while (!ready.empty()) {
        const std::size_t s = ready.top();
        ready.pop();
        order.push_back(g.nodes[s]);
        for (std::size_t t : succ[s])
            if (--indegree[t] == 0) ready.push(t);
    }
    if (order.size() == m) return order;

    // Extract a witness cycle from the leftover subgraph by successor walking.
    std::size_t start = 0;
    while (indegree[start] == 0) ++start;
    std::vector<std::size_t> trail;
    std::vector<int> seen_at(m, -1);
    std::size_t cur = start;
    while (seen_at[cur] < 0) {
        seen_at[cur] = static_cast<int>(trail.size());
        trail.push_back(cur);
        for (std::size_t t : succ[cur])
            if (indegree[t] > 0) { cur = t; break; }
    }
    std::vector<std::uint32_t> cycle;
    for (std::size_t k = static_cast<std::size_t>(seen_at[cur]); k < trail.size(); ++k)
        cycle.push_back(g.nodes[trail[k]].bits());
    throw NotADAG("graph contains a cycle", std::move(cycle));
}

namespace detail {

inline nlohmann::ordered_json community_to_json(Community c) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (int i : c.members()) arr.push_back(i + 1);  // 1-based species labels
    return arr;
}

inline Community community_from_json(const nlohmann::json& arr, int n) {
    if (!arr.is_array()) throw InvalidInput("community must be an array");
    Community c;
    for (const auto& v : arr) {
        if (!v.is_number_integer()) throw InvalidInput("species label must be an integer");
        const int label = v.get<int>();
        if (label < 1 || label > n)
            throw InvalidInput("species label " + std::to_string(label) +
                               " out of range 1.." + std::to_string(n));
        c = c.with(label - 1);
    }
    return c;
}

}  // namespace detail

enum class GraphFormat { Dot, Json };

/// Serializes a graph. DOT labels each node with its community and
/// equilibrium abundances (6 decimal places) and double-circles the node
/// flagged as the GASS; JSON uses 1-based member arrays. Output is
/// byte-deterministic for a fixed graph.
inline std::string export_graph(const AttractorGraph& g, GraphFormat format) {
    if (format == GraphFormat::Dot) {
        std::ostringstream os;
        os << "digraph \"" << to_string(g.kind) << "\" {\n  rankdir=BT;\n";
        for (std::size_t k = 0; k < g.nodes.size(); ++k) {
            const Equilibrium& eq = g.node_info[k];
            os << "  \"" << to_string(g.nodes[k]) << "\" [label=\""
               << to_string(g.nodes[k]) << "\\n" << format_vector(eq.u_star, 6);
            if (eq.is_gass) os << "\\nGASS";
            os << "\"";
            if (eq.is_gass) os << ", peripheries=2";
            if (!eq.hyperbolic) os << ", style=dashed";
            os << "];\n";
        }
        for (const GraphEdge& e : g.edges) {
            os << "  \"" << to_string(e.source) << "\" -> \"" << to_string(e.target)
               << "\"";
            std::vector<std::string> attrs;
            if (e.multiplicity > 1)
                attrs.push_back("label=\"x" + std::to_string(e.multiplicity) + "\"");
            if (e.provenance == EdgeProvenance::OdeVerified)
                attrs.push_back("style=bold");
            if (!attrs.empty()) {
                os << " [";
                for (std::size_t k = 0; k < attrs.size(); ++k)
                    os << (k ? ", " : "") << attrs[k];
                os << "]";
            }
            os << ";\n";
        }
        os << "}\n";
        return os.str();
    }

    nlohmann::ordered_json j;
    j["kind"] = to_string(g.kind);
    j["n"] = g.n;
    j["nodes"] = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < g.nodes.size(); ++k) {
        const Equilibrium& eq = g.node_info[k];
        nlohmann::ordered_json jn;
        jn["community"] = detail::community_to_json(g.nodes[k]);
        jn["u_star"] = nlohmann::ordered_json::array();
        for (Eigen::Index i = 0; i < eq.u_star.size(); ++i)
            jn["u_star"].push_back(eq.u_star[i]);
        jn["hyperbolic"] = eq.hyperbolic;
        jn["is_gass"] = eq.is_gass;
        j["nodes"].push_back(std::move(jn));
    }
    j["edges"] = nlohmann::ordered_json::array();
    for (const GraphEdge& e : g.edges) {
        nlohmann::ordered_json je;
        je["src"] = detail::community_to_json(e.source);
        je["dst"] = detail::community_to_json(e.target);
        je["provenance"] = to_string(e.provenance);
        je["multiplicity"] = e.multiplicity;
        j["edges"].push_back(std::move(je));
    }
    j["self_edge_anomalies"] = nlohmann::ordered_json::array();
    for (Community c : g.self_edge_anomalies)
        j["self_edge_anomalies"].push_back(detail::community_to_json(c));
    return j.dump(2) + "\n";
}

/// Parses a JSON graph produced by export_graph.
/// @throws InvalidInput with a field-specific message on malformed documents.
inline AttractorGraph import_graph(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidInput(std::string("graph JSON parse error: ") + e.what());
    }
    if (!j.is_object()) throw InvalidInput("graph document must be an object");
    for (const char* field : {"kind", "n", "nodes", "edges"})
        if (!j.contains(field))
            throw InvalidInput(std::string("graph document missing field '") + field + "'");

    AttractorGraph g;
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "invasion")
        g.kind = GraphKind::Invasion;
    else if (kind == "information")
        g.kind = GraphKind::Information;
    else if (kind == "merged")
        g.kind = GraphKind::Merged;
    else
        throw InvalidInput("unknown graph kind '" + kind + "'");

    if (!j["n"].is_number_integer()) throw InvalidInput("field 'n' must be an integer");
    g.n = j["n"].get<int>();
    if (g.n < 1 || g.n > kMaxSpecies)
        throw InvalidInput("field 'n' out of range 1.." + std::to_string(kMaxSpecies));

    if (!j["nodes"].is_array()) throw InvalidInput("field 'nodes' must be an array");
    for (const auto& jn : j["nodes"]) {
        if (!jn.is_object() || !jn.contains("community"))
            throw InvalidInput("node entry must be an object with a 'community'");
        Equilibrium eq;
        eq.community = detail::community_from_json(jn["community"], g.n);
        eq.u_star = Vector::Zero(g.n);
        if (jn.contains("u_star")) {
            const auto& ju = jn["u_star"];
            if (!ju.is_array() || static_cast<int>(ju.size()) != g.n)
                throw InvalidInput("node 'u_star' must be an array of n numbers");
            for (int i = 0; i < g.n; ++i) {
                if (!ju[static_cast<std::size_t>(i)].is_number())
                    throw InvalidInput("node 'u_star' entries must be numbers");
                eq.u_star[i] = ju[static_cast<std::size_t>(i)].get<double>();
            }
        }
        eq.hyperbolic = jn.value("hyperbolic", true);
        eq.is_gass = jn.value("is_gass", false);
        g.nodes.push_back(eq.community);
        g.node_info.push_back(std::move(eq));
    }
    detail::sort_nodes_with_info(g.nodes, g.node_info);
    for (std::size_t k = 1; k < g.nodes.size(); ++k)
        if (g.nodes[k - 1] == g.nodes[k])
            throw InvalidInput("duplicate node " + to_string(g.nodes[k]));

    if (!j["edges"].is_array()) throw InvalidInput("field 'edges' must be an array");
    for (const auto& je : j["edges"]) {
        if (!je.contains("src") || !je.contains("dst"))
            throw InvalidInput("edge missing 'src' or 'dst'");
        GraphEdge e;
        e.source = detail::community_from_json(je["src"], g.n);
        e.target = detail::community_from_json(je["dst"], g.n);
        if (e.source == e.target)
            throw InvalidInput("self-edge at " + to_string(e.source) + " not allowed");
        e.multiplicity = je.value("multiplicity", 1);
        if (e.multiplicity < 1) throw InvalidInput("edge multiplicity must be >= 1");
        e.provenance = je.contains("provenance")
                           ? provenance_from_string(je["provenance"].get<std::string>())
                           : EdgeProvenance::RateConditions;
        if (!g.has_node(e.source) || !g.has_node(e.target))
            throw InvalidInput("edge endpoint is not a listed node");
        g.edges.push_back(e);
    }
    if (j.contains("self_edge_anomalies"))
        for (const auto& ja : j["self_edge_anomalies"])
            g.self_edge_anomalies.push_back(detail::community_from_json(ja, g.n));
    g.sort_edges();
    return g;
}

/// Structural equality over kind, nodes, payloads, and edges (used by the
/// JSON round-trip identity).
inline bool graphs_identical(const AttractorGraph& a, const AttractorGraph& b) {
    if (a.kind != b.kind || a.n != b.n || a.nodes != b.nodes) return false;
    if (a.node_info.size() != b.node_info.size()) return false;
    for (std::size_t k = 0; k < a.node_info.size(); ++k) {
        const Equilibrium& x = a.node_info[k];
        const Equilibrium& y = b.node_info[k];
        if (!(x.community == y.community) || x.hyperbolic != y.hyperbolic ||
            x.is_gass != y.is_gass || x.u_star.size() != y.u_star.size() ||
            !(x.u_star.array() == y.u_star.array()).all())
            return false;
    }
    if (a.edges.size() != b.edges.size()) return false;
    for (std::size_t k = 0; k < a.edges.size(); ++k) {
        const GraphEdge& x = a.edges[k];
        const GraphEdge& y = b.edges[k];
        if (!(x.source == y.source) || !(x.target == y.target) ||
            x.multiplicity != y.multiplicity || x.provenance != y.provenance)
            return false;
    }
    return true;
}

}  // namespace lvig
