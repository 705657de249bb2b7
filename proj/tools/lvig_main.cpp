/// @file lvig_main.cpp
/// @brief Command-line front end: analyze, graph, stability, simulate.
///
/// Exit codes: 0 clean result, 1 analysis-level warnings or failed
/// assumptions (graph diff, anomalies, nonhyperbolicity, refuted edges),
/// 2 invalid input (unreadable or malformed files, bad vectors, bad flags).

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "lvig/lvig.hpp"

namespace {

using namespace lvig;

struct ToleranceFlags {
    std::optional<double> stability;
    std::optional<double> positivity;
    std::optional<double> sign;
    std::optional<double> lcp;

    void apply(SystemFile& f) const {
        if (stability) f.tolerances.stability = *stability;
        if (positivity) f.tolerances.positivity = *positivity;
        if (sign) f.tolerances.sign = *sign;
        if (lcp) f.tolerances.lcp = *lcp;
    }
};

void add_tolerance_flags(CLI::App* cmd, ToleranceFlags& flags) {
    cmd->add_option("--stability-tol", flags.stability,
                    "Spectral stability tolerance (default 1e-9)");
    cmd->add_option("--positivity-tol", flags.positivity,
                    "Equilibrium positivity tolerance (default 1e-9)");
    cmd->add_option("--sign-tol", flags.sign,
                    "Invasion-rate sign tolerance (default 1e-9)");
    cmd->add_option("--lcp-tol", flags.lcp,
                    "Complementarity tolerance (default 1e-9)");
}

Vector parse_vector_arg(const std::string& text, int n, const std::string& what) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(item, &pos);
            while (pos < item.size() && std::isspace(static_cast<unsigned char>(item[pos])))
                ++pos;
            if (pos != item.size()) throw std::invalid_argument(item);
            values.push_back(v);
        } catch (const std::exception&) {
            throw InvalidInput(what + ": cannot parse '" + item + "' as a number");
        }
    }
    if (static_cast<int>(values.size()) != n)
        throw InvalidInput(what + ": expected " + std::to_string(n) +
                           " comma-separated values, got " +
                           std::to_string(values.size()));
    Vector v(n);
    for (int i = 0; i < n; ++i) {
        if (!std::isfinite(values[static_cast<std::size_t>(i)]))
            throw InvalidInput(what + ": entry " + std::to_string(i + 1) +
                               " is not finite");
        v[i] = values[static_cast<std::size_t>(i)];
    }
    return v;
}

int do_analyze(const std::string& path, const ToleranceFlags& tols, bool assert_vl) {
    SystemFile file = load_system_file(path);
    tols.apply(file);
    if (assert_vl) file.assert_vl = true;
    AnalysisOptions options;
    const AnalysisResult res = run_analysis(file, options);
    std::cout << render_analysis(res);
    return res.clean() ? 0 : 1;
}

int do_graph(const std::string& path, const std::string& format, bool verify,
             const ToleranceFlags& tols, bool assert_vl) {
    SystemFile file = load_system_file(path);
    tols.apply(file);
    if (assert_vl) file.assert_vl = true;
    AnalysisOptions options;
    options.verify_edges = verify;
    const AnalysisResult res = run_analysis(file, options);
    if (!res.certified) {
        std::cerr << "error: no accepting VL certificate; the information "
                     "structure (and merged graph) cannot be built\n";
        return 1;
    }
    std::cout << export_graph(res.merged,
                              format == "dot" ? GraphFormat::Dot : GraphFormat::Json);
    if (verify) {
        for (const EdgeVerification& v : res.verifications)
            if (v.outcome != EdgeVerification::Outcome::Verified) return 1;
    }
    return res.clean() ? 0 : 1;
}

int do_stability(const std::string& path, double radius, std::size_t trials,
                 std::uint64_t seed, bool cones, const std::string& cones_csv,
                 const ToleranceFlags& tols, bool assert_vl) {
    SystemFile file = load_system_file(path);
    tols.apply(file);
    if (assert_vl) file.assert_vl = true;
    const LVSystem sys = instantiate(file);

    StabilityReport report;
    try {
        report = perturbation_sweep(sys, radius, trials, seed, file.tolerances.sign,
                                    file.tolerances.positivity);
    } catch (const PreconditionFailed& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    nlohmann::ordered_json j = nlohmann::ordered_json::parse(report_to_json(report));
    if (cones) {
        const HyperplaneArrangement arr = residual_hyperplanes(sys.A);
        const ResidualDistance dist =
            distance_to_residual(sys, file.tolerances.positivity);
        nlohmann::ordered_json jc;
        jc["hyperplane_count"] = arr.planes.size();
        jc["skipped_singular"] = nlohmann::ordered_json::array();
        for (const Community& c : arr.skipped) {
            nlohmann::ordered_json members = nlohmann::ordered_json::array();
            for (int i : c.members()) members.push_back(i + 1);
            jc["skipped_singular"].push_back(std::move(members));
        }
        jc["distance_restricted"] = dist.restricted;
        jc["distance_unrestricted"] = dist.unrestricted;
        j["cones"] = std::move(jc);
        if (!cones_csv.empty()) {
            std::ofstream out(cones_csv, std::ios::binary);
            if (!out) throw InvalidInput(cones_csv + ": cannot open for writing");
            out << hyperplanes_to_csv(arr, sys.n());
        }
    }
    std::cout << j.dump(2) << "\n";
    return 0;
}

int do_simulate(const std::string& path, const std::string& u0_text, double t_max,
                const std::string& dump_path, double rtol, double atol, double tol,
                const ToleranceFlags& tols, bool assert_vl) {
    SystemFile file = load_system_file(path);
    tols.apply(file);
    if (assert_vl) file.assert_vl = true;
    const LVSystem sys = instantiate(file);

    const Vector u0 = parse_vector_arg(u0_text, sys.n(), "--u0");
    for (Eigen::Index i = 0; i < u0.size(); ++i)
        if (u0[i] < 0.0)
            throw InvalidInput("--u0: entry " + std::to_string(i + 1) +
                               " is negative");

    IntegratorOptions options;
    options.rtol = rtol;
    options.atol = atol;
    options.record_states = !dump_path.empty();
    const Trajectory traj = integrate(sys, u0, t_max, options);
    EquilibriumCatalog catalog = enumerate_admissible(sys, file.tolerances.positivity);
    (void)invasion_scheme(sys, catalog, file.tolerances.sign);
    const Classification cls = classify_limit(traj, catalog, tol);

    if (!dump_path.empty()) {
        std::ofstream out(dump_path, std::ios::binary);
        if (!out) throw InvalidInput(dump_path + ": cannot open for writing");
        out << trajectory_to_csv(traj);
    }

    switch (cls.kind) {
        case LimitKind::ConvergedTo:
            if ((u0 - cls.equilibrium->u_star).norm() < tol)
                std::cout << "equilibrium\n";
            else
                std::cout << "converged: " << to_string(cls.equilibrium->community)
                          << "\n";
            break;
        case LimitKind::Diverged:
            std::cout << "diverged\n";
            break;
        default:
            std::cout << "undecided\n";
            break;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Community assembly analysis for Lotka-Volterra systems: stability "
        "certificates, invasion graphs, information structures, scheme "
        "robustness, and trajectory verification."};
    app.require_subcommand(1);

    std::string path;
    ToleranceFlags tols;
    bool assert_vl = false;

    CLI::App* analyze = app.add_subcommand(
        "analyze", "Certify, enumerate equilibria, build and compare both graphs");
    analyze->add_option("file", path, "System JSON file")->required();
    add_tolerance_flags(analyze, tols);
    analyze->add_flag("--assert-vl", assert_vl,
                      "Trust the interaction matrix as VL-stable without searching");

    std::string format = "dot";
    bool verify = false;
    CLI::App* graph =
        app.add_subcommand("graph", "Emit the merged attractor graph (DOT or JSON)");
    graph->add_option("file", path, "System JSON file")->required();
    graph->add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"dot", "json"}))
        ->capture_default_str();
    graph->add_flag("--verify", verify,
                    "Verify every edge with the trajectory oracle");
    add_tolerance_flags(graph, tols);
    graph->add_flag("--assert-vl", assert_vl,
                    "Trust the interaction matrix as VL-stable without searching");

    double radius = 1.0;
    std::size_t trials = 200;
    std::uint64_t seed = 12345;
    bool cones = false;
    std::string cones_csv;
    CLI::App* stability = app.add_subcommand(
        "stability", "Perturbation sweep of the invasion scheme (JSON report)");
    stability->add_option("file", path, "System JSON file")->required();
    stability->add_option("--radius", radius, "Perturbation ball radius")
        ->capture_default_str();
    stability->add_option("--trials", trials, "Number of sampled perturbations")
        ->capture_default_str();
    stability->add_option("--seed", seed, "RNG seed")->capture_default_str();
    stability->add_flag("--cones", cones,
                        "Include the residual hyperplane arrangement summary");
    stability->add_option("--cones-csv", cones_csv,
                          "Write the hyperplane arrangement as CSV to this path");
    add_tolerance_flags(stability, tols);
    stability->add_flag("--assert-vl", assert_vl,
                        "Trust the interaction matrix as VL-stable without searching");

    std::string u0_text;
    double t_max = 1e4;
    std::string dump_path;
    double rtol = 1e-8, atol = 1e-10, classify_tol = 1e-4;
    CLI::App* simulate =
        app.add_subcommand("simulate", "Integrate from an initial state and classify");
    simulate->add_option("file", path, "System JSON file")->required();
    simulate->add_option("--u0", u0_text, "Initial state, comma-separated")->required();
    simulate->add_option("--tmax", t_max, "Integration horizon")->capture_default_str();
    simulate->add_option("--dump", dump_path, "Write the trajectory CSV to this path");
    simulate->add_option("--rtol", rtol, "Relative tolerance")->capture_default_str();
    simulate->add_option("--atol", atol, "Absolute tolerance")->capture_default_str();
    simulate->add_option("--tol", classify_tol, "Classification distance")
        ->capture_default_str();
    add_tolerance_flags(simulate, tols);
    simulate->add_flag("--assert-vl", assert_vl,
                       "Trust the interaction matrix as VL-stable without searching");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (analyze->parsed()) return do_analyze(path, tols, assert_vl);
        if (graph->parsed()) return do_graph(path, format, verify, tols, assert_vl);
        if (stability->parsed())
            return do_stability(path, radius, trials, seed, cones, cones_csv, tols,
                                assert_vl);
        if (simulate->parsed())
            return do_simulate(path, u0_text, t_max, dump_path, rtol, atol,
                               classify_tol, tols, assert_vl);
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 2;  // no subcommand (unreachable with require_subcommand)
}
