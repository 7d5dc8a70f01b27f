#pragma once

#include <bit>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>

#include <json.hpp>

#include "polywave/state.hpp"

namespace polywave {

inline nlohmann::json to_json(const SubsetVector& v) {
    return nlohmann::json{{"n_vertices", v.n_vertices}, {"coeffs", v.coeffs}};
}

inline SubsetVector subset_vector_from_json(const nlohmann::json& j) {
    SubsetVector v(j.at("n_vertices").get<int>());
    const auto& coeffs = j.at("coeffs");
    if (coeffs.size() != v.size())
        throw std::invalid_argument("subset vector: coeffs length must be 2^n_vertices");
    v.coeffs = coeffs.get<std::vector<double>>();
    if (!all_finite(v.coeffs))
        throw std::invalid_argument("subset vector: coefficients must be finite");
    return v;
}

inline SubsetVector load_subset_vector(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open state file: " + path);
    nlohmann::json j;
    in >> j;
    return subset_vector_from_json(j);
}

inline void save_subset_vector(const std::string& path, const SubsetVector& v,
                               std::optional<std::string> manifest_hash = {}) {
    nlohmann::json j = to_json(v);
    if (manifest_hash) j["manifest_hash"] = *manifest_hash;
    std::ofstream out(path);
    if (!out)
        throw std::invalid_argument("cannot write state file: " + path);
    out << j.dump(2) << '\n';
}

/// Shortest-roundtrip decimal form of a double, for CSV cells.
inline std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void write_subset_vector_csv(std::ostream& out, const SubsetVector& v,
                                    std::optional<std::string> manifest_hash = {}) {
    if (manifest_hash) out << "# manifest_hash=" << *manifest_hash << '\n';
    out << "mask,cardinality,coefficient\n";
    for (std::size_t m = 0; m < v.size(); ++m)
        out << m << ',' << std::popcount(m) << ',' << format_double(v.coeffs[m]) << '\n';
}

} // namespace polywave
