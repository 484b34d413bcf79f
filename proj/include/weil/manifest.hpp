#pragma once

/**
 * @file manifest.hpp
 * @brief JSON manifests describing an algebra, a dimension and structures.
 *
 *   {
 *     "algebra": "R[T]/(T^3)",
 *     "dimension": 2,
 *     "functions": {"H": "(x1^2 + x2^2)/2"},
 *     "poisson": [["0", "1"], ["-1", "0"]],
 *     "symplectic": [["0", "1"], ["-1", "0"]],
 *     "points": [[0.5, -0.25]],
 *     "seed": 7, "tol": 1e-8, "samples": 50
 *   }
 *
 * Matrix entries are expression strings or numbers. Only the strict upper
 * triangle is read; rows may be full, start at the diagonal, or start just
 * right of it. Requires nlohmann/json.
 */

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "weil/weil.hpp"

namespace weil {

class ManifestError : public Error {
    using Error::Error;
};

struct Manifest {
    std::string algebra = "R";
    int dimension = 0;
    std::map<std::string, std::string> functions;
    std::optional<std::vector<std::vector<Expr>>> poisson;
    std::optional<std::vector<std::vector<Expr>>> symplectic;
    std::vector<std::vector<double>> points;
    std::uint64_t seed = 1;
    double tol = 1e-8;
    int samples = 50;

    Expr function(const std::string& name) const {
        auto it = functions.find(name);
        if (it == functions.end()) throw ManifestError("no function named '" + name + "' in manifest");
        return parse(it->second, dimension);
    }
};

namespace detail {

inline Expr matrix_entry(const nlohmann::json& v, int n, const std::string& where) {
    if (v.is_null()) return 0.0;
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        try {
            return parse(v.get<std::string>(), n);
        } catch (const ParseError& e) {
            throw ManifestError(where + ": " + e.what());
        }
    }
    throw ManifestError(where + ": entries must be strings or numbers");
}

/// Full n x n table with the lower triangle rebuilt by skew-symmetry.
inline std::vector<std::vector<Expr>> read_skew_matrix(const nlohmann::json& m, int n, const std::string& field) {
    if (!m.is_array() || static_cast<int>(m.size()) != n)
        throw ManifestError("'" + field + "' must be an array of " + std::to_string(n) + " rows");
    std::vector<std::vector<Expr>> out(static_cast<std::size_t>(n), std::vector<Expr>(static_cast<std::size_t>(n), Expr(0.0)));
    for (int i = 0; i < n; ++i) {
        const auto& row = m[static_cast<std::size_t>(i)];
        if (!row.is_array()) throw ManifestError("'" + field + "' row " + std::to_string(i) + " is not an array");
        const int len = static_cast<int>(row.size());
        int offset = 0;
        if (len == n) offset = 0;
        else if (len == n - i) offset = i;
        else if (len == n - i - 1) offset = i + 1;
        else throw ManifestError("'" + field + "' row " + std::to_string(i) + " has length " + std::to_string(len));
        for (int j = i + 1; j < n; ++j) {
            const Expr e = matrix_entry(row[static_cast<std::size_t>(j - offset)], n,
                                        field + "[" + std::to_string(i) + "][" + std::to_string(j) + "]");
            out[i][j] = e;
            out[j][i] = -e;
        }
    }
    return out;
}

}  // namespace detail

inline Manifest parse_manifest(const nlohmann::json& j) {
    if (!j.is_object()) throw ManifestError("manifest must be a JSON object");
    Manifest m;
    try {
        if (j.contains("algebra")) m.algebra = j.at("algebra").get<std::string>();
        if (!j.contains("dimension")) throw ManifestError("manifest needs 'dimension'");
        m.dimension = j.at("dimension").get<int>();
        if (m.dimension < 1) throw ManifestError("'dimension' must be >= 1");
        if (j.contains("functions"))
            for (const auto& [name, src] : j.at("functions").items()) m.functions.emplace(name, src.get<std::string>());
        if (j.contains("poisson")) m.poisson = detail::read_skew_matrix(j.at("poisson"), m.dimension, "poisson");
        if (j.contains("symplectic"))
            m.symplectic = detail::read_skew_matrix(j.at("symplectic"), m.dimension, "symplectic");
        if (j.contains("points")) m.points = j.at("points").get<std::vector<std::vector<double>>>();
        for (const auto& p : m.points)
            if (static_cast<int>(p.size()) != m.dimension) throw ManifestError("point of the wrong dimension");
        if (j.contains("seed")) m.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("tol")) m.tol = j.at("tol").get<double>();
        if (j.contains("samples")) m.samples = j.at("samples").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw ManifestError(std::string("malformed manifest: ") + e.what());
    }
    for (const auto& [name, src] : m.functions) {
        try {
            parse(src, m.dimension);
        } catch (const ParseError& e) {
            throw ManifestError("function '" + name + "': " + e.what());
        }
    }
    return m;
}

inline Manifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ManifestError("cannot open manifest " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ManifestError(path + ": " + e.what());
    }
    return parse_manifest(j);
}

}  // namespace weil
