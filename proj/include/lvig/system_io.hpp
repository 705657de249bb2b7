#pragma once

/// @file system_io.hpp
/// @brief JSON system-file loading with field-precise validation.
///
/// Input schema (one JSON object):
///   {
///     "n": 3,                       // required, 1..24
///     "A": [[...], [...], [...]],   // required, n rows of n finite numbers
///     "b": [...],                   // required, n finite numbers
///     "name": "three-species",      // optional
///     "assert_vl": false,           // optional: trust A as VL-stable
///     "tolerances": {               // optional, each field optional
///       "stability": 1e-9, "positivity": 1e-9, "sign": 1e-9, "lcp": 1e-9
///     }
///   }

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "lvig/community.hpp"
#include "lvig/equilibria.hpp"
#include "lvig/errors.hpp"
#include "lvig/types.hpp"

namespace lvig {

/// Parsed, validated system description.
struct SystemFile {
    int n = 0;
    Matrix A;
    Vector b;
    std::string name;
    Tolerances tolerances;
    bool assert_vl = false;
};

namespace detail {

inline double checked_number(const nlohmann::json& v, const std::string& where) {
    if (!v.is_number())
        throw InvalidInput(where + ": expected a number, got " +
                           std::string(v.type_name()));
    const double x = v.get<double>();
    if (!std::isfinite(x))
        throw InvalidInput(where + ": not a finite number");
    return x;
}

}  // namespace detail

/// Parses a system document from text. `origin` (usually a file name) is
/// prefixed to error messages.
/// @throws InvalidInput with a field-precise message on any defect.
inline SystemFile parse_system_file(const std::string& text,
                                    const std::string& origin = "input") {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidInput(origin + ": JSON parse error: " + e.what());
    }
    if (!j.is_object()) throw InvalidInput(origin + ": document must be a JSON object");
    for (const char* field : {"n", "A", "b"})
        if (!j.contains(field))
            throw InvalidInput(origin + ": missing required field '" + field + "'");

    SystemFile f;
    if (!j["n"].is_number_integer())
        throw InvalidInput(origin + ": field 'n' must be an integer");
    f.n = j["n"].get<int>();
    if (f.n < 1 || f.n > kMaxSpecies)
        throw InvalidInput(origin + ": field 'n' = " + std::to_string(f.n) +
                           " out of range 1.." + std::to_string(kMaxSpecies));

    const auto& jA = j["A"];
    if (!jA.is_array() || static_cast<int>(jA.size()) != f.n)
        throw InvalidInput(origin + ": field 'A' must be an array of n = " +
                           std::to_string(f.n) + " rows");
    f.A.resize(f.n, f.n);
    for (int r = 0; r < f.n; ++r) {
        const auto& row = jA[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<int>(row.size()) != f.n)
            throw InvalidInput(origin + ": field 'A' row " + std::to_string(r + 1) +
                               " must hold n = " + std::to_string(f.n) + " numbers");
        for (int c = 0; c < f.n; ++c)
            f.A(r, c) = detail::checked_number(
                row[static_cast<std::size_t>(c)],
                origin + ": A[" + std::to_string(r + 1) + "][" +
                    std::to_string(c + 1) + "]");
    }

    const auto& jb = j["b"];
    if (!jb.is_array() || static_cast<int>(jb.size()) != f.n)
        throw InvalidInput(origin + ": field 'b' must be an array of n = " +
                           std::to_string(f.n) + " numbers");
    f.b.resize(f.n);
    for (int i = 0; i < f.n; ++i)
        f.b[i] = detail::checked_number(jb[static_cast<std::size_t>(i)],
                                        origin + ": b[" + std::to_string(i + 1) + "]");

    if (j.contains("name")) {
        if (!j["name"].is_string())
            throw InvalidInput(origin + ": field 'name' must be a string");
        f.name = j["name"].get<std::string>();
    }
    if (j.contains("assert_vl")) {
        if (!j["assert_vl"].is_boolean())
            throw InvalidInput(origin + ": field 'assert_vl' must be a boolean");
        f.assert_vl = j["assert_vl"].get<bool>();
    }
    if (j.contains("tolerances")) {
        const auto& jt = j["tolerances"];
        if (!jt.is_object())
            throw InvalidInput(origin + ": field 'tolerances' must be an object");
        const auto read_tol = [&](const char* key, double& slot) {
            if (!jt.contains(key)) return;
            const double v =
                detail::checked_number(jt[key], origin + ": tolerances." + key);
            if (!(v > 0))
                throw InvalidInput(origin + ": tolerances." + key +
                                   " must be positive");
            slot = v;
        };
        read_tol("stability", f.tolerances.stability);
        read_tol("positivity", f.tolerances.positivity);
        read_tol("sign", f.tolerances.sign);
        read_tol("lcp", f.tolerances.lcp);
    }
    return f;
}

/// Loads and parses a system file from disk.
/// @throws InvalidInput when the file cannot be read or fails validation.
inline SystemFile load_system_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput(path + ": cannot open file");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_system_file(buffer.str(), path);
}

/// Builds the LVSystem described by a file, certifying A (or trusting the
/// caller's assertion when assert_vl is set).
inline LVSystem instantiate(const SystemFile& f) {
    if (f.assert_vl) return make_system_asserted(f.A, f.b, f.name);
    return make_system(f.A, f.b, f.name, f.tolerances.stability);
}

}  // namespace lvig
