#pragma once

// Deliberately naive reference implementations used by the test suites.
// Nothing here is called from the production paths, and nothing here calls
// them back: equality between the two is what the tests establish.

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "polywave/errors.hpp"
#include "polywave/lattice.hpp"
#include "polywave/polymer.hpp"
#include "polywave/state.hpp"

namespace polywave::oracle {

/// Exact scalar for the rational mini-mode (arbitrary precision, no rounding).
using Rational = boost::multiprecision::cpp_rational;

/// Superset sum by the O(4^N) double loop.
template <typename T>
BasicSubsetVector<T> naive_superset_zeta(const BasicSubsetVector<T>& v) {
    BasicSubsetVector<T> out(v.n_vertices);
    for (std::size_t s = 0; s < v.size(); ++s)
        for (std::size_t t = 0; t < v.size(); ++t)
            if ((t & s) == s) out.coeffs[s] += v.coeffs[t];
    return out;
}

/// Signed superset sum, the inverse of the above. O(4^N).
template <typename T>
BasicSubsetVector<T> naive_superset_mobius(const BasicSubsetVector<T>& c) {
    BasicSubsetVector<T> out(c.n_vertices);
    for (std::size_t s = 0; s < c.size(); ++s)
        for (std::size_t t = 0; t < c.size(); ++t)
            if ((t & s) == s) {
                if (std::popcount(t ^ s) % 2 == 0)
                    out.coeffs[s] += c.coeffs[t];
                else
                    out.coeffs[s] -= c.coeffs[t];
            }
    return out;
}

/// Dense real matrix over an explicit basis enumeration.
struct DenseOperator {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    DenseOperator() = default;
    DenseOperator(int r, int c) : rows(r), cols(c), a(std::size_t(r) * c, 0.0) {}
    double& at(int r, int c) { return a[std::size_t(r) * cols + c]; }
    double at(int r, int c) const { return a[std::size_t(r) * cols + c]; }
};

inline std::vector<double> apply(const DenseOperator& op, const std::vector<double>& v) {
    if (v.size() != std::size_t(op.cols))
        throw std::invalid_argument("dense apply: size mismatch");
    std::vector<double> out(op.rows, 0.0);
    for (int r = 0; r < op.rows; ++r)
        for (int c = 0; c < op.cols; ++c) out[r] += op.at(r, c) * v[c];
    return out;
}

/// Hamiltonian over the full 2^N subset basis, assembled literally from the
/// nearest-neighbor spin interchanges: H = -sum over edges of (I_ij - 1).
/// I_ij maps a basis subset to the one with the memberships of i and j swapped.
inline DenseOperator build_hamiltonian_dense(const Lattice& lat) {
    if (lat.n_vertices > 12)
        throw SizeError("build_hamiltonian_dense: vertex count exceeds cap of 12");
    const int dim = 1 << lat.n_vertices;
    DenseOperator h(dim, dim);
    for (const auto& [i, j] : lat.edges) {
        const SubsetId bi = SubsetId(1) << i;
        const SubsetId bj = SubsetId(1) << j;
        for (int s = 0; s < dim; ++s) {
            const bool has_i = s & bi, has_j = s & bj;
            if (has_i == has_j) continue;      // interchange fixes the state
            const int swapped = s ^ bi ^ bj;
            h.at(swapped, s) -= 1.0;
            h.at(s, s) += 1.0;
        }
    }
    return h;
}

/// Dense matrix of the cardinality r -> s superset-sum map over the
/// ascending-mask sector bases: entry 1 iff the row subset is contained in
/// the column subset (identity for s = r, zero for s > r).
inline DenseOperator dense_T(int n_vertices, int r, int s) {
    const auto rows = sector_masks(n_vertices, s);
    const auto cols = sector_masks(n_vertices, r);
    DenseOperator t(int(rows.size()), int(cols.size()));
    if (s > r) return t;
    for (std::size_t a = 0; a < rows.size(); ++a)
        for (std::size_t b = 0; b < cols.size(); ++b)
            if ((rows[a] & cols[b]) == rows[a]) t.at(int(a), int(b)) = 1.0;
    return t;
}

namespace detail {

template <typename F>
void partitions_rec(const std::vector<int>& elems, std::size_t pos,
                    std::vector<SubsetId>& blocks, F&& fn) {
    if (pos == elems.size()) {
        fn(SetPartition{blocks});
        return;
    }
    const SubsetId bit = SubsetId(1) << elems[pos];
    // restricted-growth order: join an existing block, then open a new one
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        blocks[b] |= bit;
        partitions_rec(elems, pos + 1, blocks, fn);
        blocks[b] ^= bit;
    }
    blocks.push_back(bit);
    partitions_rec(elems, pos + 1, blocks, fn);
    blocks.pop_back();
}

} // namespace detail

/// Visits every set partition of s exactly once (restricted-growth order).
template <typename F>
void for_each_partition(SubsetId s, F&& fn) {
    if (std::popcount(s) > 10)
        throw SizeError("for_each_partition: subset size exceeds cap of 10");
    std::vector<int> elems;
    for (int i = 0; i < 32; ++i)
        if ((s >> i) & 1u) elems.push_back(i);
    std::vector<SubsetId> blocks;
    detail::partitions_rec(elems, 0, blocks, fn);
}

inline std::vector<SetPartition> enumerate_partitions(SubsetId s) {
    std::vector<SetPartition> out;
    for_each_partition(s, [&](const SetPartition& p) { out.push_back(p); });
    return out;
}

/// Solves for the unified polymer weights by literal enumeration:
/// w(S) = c(S) minus the sum over proper partitions of S of the product of
/// the weights of their blocks, in increasing cardinality order.
template <typename T>
std::vector<T> naive_solve_u(const BasicSubsetVector<T>& c) {
    const int N = c.n_vertices;
    if (N > 10)
        throw SizeError("naive_solve_u: vertex count exceeds cap of 10");
    std::vector<T> w(c.size(), T());
    for (int card = 1; card <= N; ++card) {
        for (std::size_t s = 0; s < c.size(); ++s) {
            if (std::popcount(s) != card) continue;
            T correction = T();
            for_each_partition(SubsetId(s), [&](const SetPartition& p) {
                if (!p.proper()) return;
                T prod = w[p.blocks[0]];
                for (std::size_t b = 1; b < p.blocks.size(); ++b) prod *= w[p.blocks[b]];
                correction += prod;
            });
            w[s] = c.coeffs[s] - correction;
        }
    }
    return w;
}

/// Reconstructs the state by the literal tensor-product expansion: sum over
/// partitions of the whole vertex set, singleton blocks contributing
/// (w_i, 1 - w_i) and larger blocks contributing w_B times a sign per
/// excluded site.
template <typename T>
BasicSubsetVector<T> naive_reconstruct_f(int n_vertices, const std::vector<T>& w) {
    if (n_vertices > 10)
        throw SizeError("naive_reconstruct_f: vertex count exceeds cap of 10");
    BasicSubsetVector<T> f(n_vertices);
    const SubsetId full = static_cast<SubsetId>((std::uint64_t(1) << n_vertices) - 1);
    for_each_partition(full, [&](const SetPartition& p) {
        for (std::size_t s = 0; s < f.size(); ++s) {
            T prod = T(1);
            for (SubsetId block : p.blocks) {
                if (std::popcount(block) == 1) {
                    prod *= (s & block) ? w[block] : T(1) - w[block];
                } else {
                    prod *= w[block];
                    if (std::popcount(block & ~SubsetId(s)) % 2 != 0) prod = -prod;
                }
            }
            f.coeffs[s] += prod;
        }
    });
    return f;
}

} // namespace polywave::oracle
