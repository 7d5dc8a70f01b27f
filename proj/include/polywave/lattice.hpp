#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "polywave/errors.hpp"

namespace polywave {

/// Bitmask over lattice vertices: bit i set iff vertex i is in the subset.
using SubsetId = std::uint32_t;

/// Hard cap on the vertex count so dense 2^N coefficient arrays stay desk-scale.
inline constexpr int kMaxVertices = 24;

enum class Boundary { open, periodic };

inline const char* to_string(Boundary b) {
    return b == Boundary::open ? "open" : "periodic";
}

/// Finite rectangular lattice in d dimensions with nearest-neighbor adjacency.
/// Vertices are indexed row-major over dims (last dimension varies fastest).
/// Immutable after construction; safe for concurrent reads.
struct Lattice {
    std::vector<int> dims;
    Boundary boundary = Boundary::open;
    int n_vertices = 0;
    std::vector<std::vector<int>> neighbors;     // per vertex, sorted, deduplicated
    std::vector<std::pair<int, int>> edges;      // each edge once, with first < second

    std::size_t n_subsets() const { return std::size_t(1) << n_vertices; }
    SubsetId full_mask() const {
        return static_cast<SubsetId>((std::uint64_t(1) << n_vertices) - 1);
    }
    bool valid_mask(SubsetId s) const { return std::uint64_t(s) < n_subsets(); }
};

inline int cardinality(SubsetId s) { return std::popcount(s); }

inline Lattice build_lattice(const std::vector<int>& dims, Boundary boundary = Boundary::open) {
    if (dims.empty())
        throw std::invalid_argument("lattice: dims must be non-empty");
    long long n = 1;
    for (int d : dims) {
        if (d < 1)
            throw std::invalid_argument("lattice: every side length must be >= 1");
        n *= d;
        if (n > kMaxVertices)
            throw SizeError("lattice: vertex count " + std::to_string(n) +
                            " exceeds cap of " + std::to_string(kMaxVertices));
    }

    Lattice lat;
    lat.dims = dims;
    lat.boundary = boundary;
    lat.n_vertices = static_cast<int>(n);
    lat.neighbors.assign(lat.n_vertices, {});

    const int d = static_cast<int>(dims.size());
    std::vector<int> coord(d, 0);
    auto index_of = [&](const std::vector<int>& x) {
        int idx = 0;
        for (int k = 0; k < d; ++k) idx = idx * dims[k] + x[k];
        return idx;
    };

    for (int v = 0; v < lat.n_vertices; ++v) {
        auto& nb = lat.neighbors[v];
        for (int k = 0; k < d; ++k) {
            for (int step : {-1, +1}) {
                int xk = coord[k] + step;
                if (boundary == Boundary::open) {
                    if (xk < 0 || xk >= dims[k]) continue;
                } else {
                    xk = (xk + dims[k]) % dims[k];
                }
                std::vector<int> y = coord;
                y[k] = xk;
                int w = index_of(y);
                if (w != v) nb.push_back(w);   // side length 1 wraps onto itself
            }
        }
        std::sort(nb.begin(), nb.end());
        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());  // side length 2 wraps twice

        // advance row-major odometer (last dimension fastest)
        for (int k = d - 1; k >= 0; --k) {
            if (++coord[k] < dims[k]) break;
            coord[k] = 0;
        }
    }

    for (int v = 0; v < lat.n_vertices; ++v)
        for (int w : lat.neighbors[v])
            if (w > v) lat.edges.emplace_back(v, w);
    return lat;
}

/// Visits every subset adjacent to s: replace one element i of s by a lattice
/// neighbor j of i that is outside s. Each adjacent subset is produced exactly
/// once since the pair (i, j) is determined by the symmetric difference.
template <typename F>
void for_each_subset_neighbor(const Lattice& lat, SubsetId s, F&& fn) {
    for (int i = 0; i < lat.n_vertices; ++i) {
        if (!((s >> i) & 1u)) continue;
        for (int j : lat.neighbors[i]) {
            if ((s >> j) & 1u) continue;
            fn(static_cast<SubsetId>((s ^ (SubsetId(1) << i)) | (SubsetId(1) << j)));
        }
    }
}

/// All subsets s' with s' ~ s. Same cardinality as s; empty for s = {} and s = V.
inline std::vector<SubsetId> subset_neighbors(const Lattice& lat, SubsetId s) {
    if (!lat.valid_mask(s))
        throw std::invalid_argument("subset_neighbors: mask out of range for lattice");
    std::vector<SubsetId> out;
    for_each_subset_neighbor(lat, s, [&](SubsetId t) { out.push_back(t); });
    return out;
}

} // namespace polywave
