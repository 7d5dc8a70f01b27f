#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "polywave/errors.hpp"
#include "polywave/state.hpp"

namespace polywave {

/// Unit-sum tolerance required of states entering the polymer pipeline.
inline constexpr double kSumTol = 1e-9;

/// Vertex count cap for the O(3^N) fixed-element recurrences.
inline constexpr int kMaxPolymerVertices = 20;

/// Subset size cap for partition counting (Bell-number growth).
inline constexpr int kMaxBellSize = 12;

/// A partition of some subset into disjoint nonempty blocks.
struct SetPartition {
    std::vector<SubsetId> blocks;

    /// True iff the partition has at least two blocks.
    bool proper() const { return blocks.size() >= 2; }
};

/// Solved polymer weights of a state: per-site singleton weights phi_i and,
/// for every subset of cardinality >= 2, the correlation weight u(S)
/// (stored densely over masks; entries at cardinality < 2 are unused zeros).
struct PolymerCoefficients {
    int n_vertices = 0;
    std::vector<double> phi;
    std::vector<double> u;

    /// Unified weight: phi_i for singletons, u(S) otherwise.
    double weight(SubsetId s) const {
        return std::popcount(s) == 1 ? phi[std::countr_zero(s)] : u[s];
    }
};

/// Superset sums of a unit-sum state: c(S) = sum over T >= S of f(T),
/// whose cardinality-r slices are the inputs of the polymer solve.
/// c(empty set) equals the total sum, i.e. 1.
inline SubsetVector compute_c(const SubsetVector& f) {
    if (std::abs(total_sum(f) - 1.0) > kSumTol)
        throw NormalizationError("compute_c: state is not normalized to unit sum");
    return superset_zeta(f);
}

namespace detail {

/// Shared kernel of solve_u / rebuild_c. With x the lowest vertex of S and
/// R = S \ {x}, every partition of S splits uniquely into the block through x
/// and a partition of the rest, so
///     c(S) = sum over T subset of R of  w(T + x) * c(R \ T),
/// where w are the unified weights and c(empty) = 1. Solving for the T = R
/// term gives w(S); running it forward rebuilds c. Total cost O(3^N).
inline double block_sum_excluding_top(const std::vector<double>& w,
                                      const std::vector<double>& c, SubsetId s) {
    const SubsetId x = s & (~s + 1u);   // lowest set bit
    const SubsetId r = s ^ x;
    if (r == 0) return 0.0;
    double acc = 0.0;
    for (SubsetId t = (r - 1) & r;; t = (t - 1) & r) {
        acc += w[t | x] * c[r ^ t];
        if (t == 0) break;
    }
    return acc;
}

} // namespace detail

/// Solves for the unique polymer weights of a superset-sum vector c with
/// c(empty) = 1: the singleton weights are phi_i = c({i}) and larger blocks
/// follow from the fixed-element recurrence in increasing mask order.
inline PolymerCoefficients solve_u(const SubsetVector& c) {
    const int N = c.n_vertices;
    if (N > kMaxPolymerVertices)
        throw SizeError("solve_u: vertex count exceeds cap of " +
                        std::to_string(kMaxPolymerVertices));
    if (std::abs(c.coeffs[0] - 1.0) > kSumTol)
        throw NormalizationError("solve_u: c(empty set) must be 1");

    std::vector<double> w(c.size(), 0.0);
    for (SubsetId s = 1; s < SubsetId(c.size()); ++s)
        w[s] = c.coeffs[s] - detail::block_sum_excluding_top(w, c.coeffs, s);

    PolymerCoefficients p;
    p.n_vertices = N;
    p.phi.resize(N);
    for (int i = 0; i < N; ++i) p.phi[i] = w[SubsetId(1) << i];
    p.u.assign(c.size(), 0.0);
    for (SubsetId s = 0; s < SubsetId(c.size()); ++s)
        if (std::popcount(s) >= 2) p.u[s] = w[s];
    return p;
}

/// Rebuilds the superset-sum vector generated by polymer weights: the inverse
/// direction of solve_u, sharing its recurrence.
inline SubsetVector rebuild_c(const PolymerCoefficients& p) {
    SubsetVector c(p.n_vertices);
    c.coeffs[0] = 1.0;
    std::vector<double> w(c.size(), 0.0);
    for (SubsetId s = 1; s < SubsetId(c.size()); ++s) {
        w[s] = p.weight(s);
        c.coeffs[s] = w[s] + detail::block_sum_excluding_top(w, c.coeffs, s);
    }
    return c;
}

/// Reconstructs the state generated by polymer weights. Production route:
/// rebuild the superset sums from the weights, then invert the zeta transform.
inline SubsetVector reconstruct_f(const PolymerCoefficients& p) {
    return superset_mobius(rebuild_c(p));
}

/// Number of set partitions of s (the Bell number of |s|).
inline std::uint64_t count_partitions(SubsetId s) {
    const int n = std::popcount(s);
    if (n > kMaxBellSize)
        throw SizeError("count_partitions: subset size exceeds cap of " +
                        std::to_string(kMaxBellSize));
    // Bell triangle
    std::vector<std::uint64_t> row{1};
    for (int i = 1; i <= n; ++i) {
        std::vector<std::uint64_t> next(i + 1);
        next[0] = row.back();
        for (int j = 1; j <= i; ++j) next[j] = next[j - 1] + row[j - 1];
        row = std::move(next);
    }
    return row[0];
}

/// Zeroes every polymer weight on blocks larger than k_max; phi unchanged.
inline PolymerCoefficients truncate(const PolymerCoefficients& p, int k_max) {
    if (k_max < 1)
        throw std::invalid_argument("truncate: k_max must be >= 1");
    PolymerCoefficients out = p;
    for (SubsetId s = 0; s < SubsetId(out.u.size()); ++s)
        if (std::popcount(s) > k_max) out.u[s] = 0.0;
    return out;
}

struct TruncationRow {
    int k_max = 0;
    double l1_error = 0.0;
    double linf_error = 0.0;
    double rel_l2_error = 0.0;
};

/// Error of the size-capped reconstructions against the untruncated one,
/// for k_max = 1..k_limit (default: up to the full vertex count, where the
/// truncation is the identity and every error is exactly zero).
inline std::vector<TruncationRow> truncation_table(const PolymerCoefficients& p,
                                                   int k_limit = 0) {
    if (k_limit <= 0) k_limit = p.n_vertices;
    const SubsetVector reference = reconstruct_f(p);
    std::vector<TruncationRow> rows;
    rows.reserve(k_limit);
    for (int k = 1; k <= k_limit; ++k) {
        const SubsetVector fk = reconstruct_f(truncate(p, k));
        rows.push_back({k, l1_diff(fk.coeffs, reference.coeffs),
                        linf_diff(fk.coeffs, reference.coeffs),
                        rel_l2_diff(fk.coeffs, reference.coeffs)});
    }
    return rows;
}

} // namespace polywave
