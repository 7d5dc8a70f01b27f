#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "polywave/errors.hpp"
#include "polywave/lattice.hpp"

namespace polywave {

/// Relative threshold below which a coefficient sum counts as zero and the
/// state is not normalizable.
inline constexpr double kNormEps = 1e-12;

/// Dense coefficient vector indexed by subsets of the vertex set, entry at
/// bitmask m = coefficient of the subset with that mask.
template <typename T>
struct BasicSubsetVector {
    int n_vertices = 0;
    std::vector<T> coeffs;

    BasicSubsetVector() = default;
    explicit BasicSubsetVector(int n) : n_vertices(n) {
        if (n < 0 || n > kMaxVertices)
            throw std::invalid_argument("subset vector: vertex count out of range");
        coeffs.assign(std::size_t(1) << n, T());
    }

    std::size_t size() const { return coeffs.size(); }
    T& operator[](SubsetId s) { return coeffs[s]; }
    const T& operator[](SubsetId s) const { return coeffs[s]; }
};

using SubsetVector = BasicSubsetVector<double>;

/// Coefficients restricted to subsets of one cardinality n, stored over the
/// ascending-mask enumeration of that sector's basis.
struct SectorVector {
    int n_vertices = 0;
    int n = 0;
    std::vector<double> entries;
};

inline std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * std::uint64_t(n - k + i) / std::uint64_t(i);
    return r;
}

/// Masks of all cardinality-n subsets of an N-vertex set, ascending.
inline std::vector<SubsetId> sector_masks(int n_vertices, int n) {
    std::vector<SubsetId> masks;
    masks.reserve(binomial(n_vertices, n));
    const std::size_t total = std::size_t(1) << n_vertices;
    for (std::size_t m = 0; m < total; ++m)
        if (std::popcount(m) == n) masks.push_back(static_cast<SubsetId>(m));
    return masks;
}

inline SectorVector sector_project(const SubsetVector& v, int n) {
    if (n < 0 || n > v.n_vertices)
        throw std::invalid_argument("sector_project: cardinality out of range");
    SectorVector out{v.n_vertices, n, {}};
    out.entries.reserve(binomial(v.n_vertices, n));
    for (std::size_t m = 0; m < v.size(); ++m)
        if (std::popcount(m) == n) out.entries.push_back(v.coeffs[m]);
    return out;
}

/// Embeds a sector back into the full subset-indexed vector (zero elsewhere).
/// Summing the embeddings of all sectors reproduces the original vector.
inline SubsetVector sector_embed(const SectorVector& g) {
    SubsetVector out(g.n_vertices);
    std::size_t k = 0;
    for (std::size_t m = 0; m < out.size(); ++m)
        if (std::popcount(m) == g.n) out.coeffs[m] = g.entries[k++];
    if (k != g.entries.size())
        throw std::invalid_argument("sector_embed: entry count does not match sector size");
    return out;
}

inline double total_sum(const SubsetVector& v) {
    double s = 0.0;
    for (double x : v.coeffs) s += x;
    return s;
}

inline SubsetVector normalize(const SubsetVector& v, double eps = kNormEps) {
    const double s = total_sum(v);
    if (std::abs(s) <= eps)
        throw NormalizationError("normalize: coefficient sum is zero (|sum| <= " +
                                 std::to_string(eps) + ")");
    SubsetVector out = v;
    for (double& x : out.coeffs) x /= s;
    return out;
}

/// Superset sum (fast zeta transform on the subset lattice):
/// out(S) = sum over T >= S of v(T). In-place sweep, O(N 2^N).
inline SubsetVector superset_zeta(SubsetVector v) {
    auto& f = v.coeffs;
    for (int d = 0; d < v.n_vertices; ++d) {
        const std::size_t bit = std::size_t(1) << d;
        for (std::size_t s = 0; s < f.size(); ++s)
            if (!(s & bit)) f[s] += f[s | bit];
    }
    return v;
}

/// Inverse of the superset sum (fast Moebius transform):
/// out(S) = sum over T >= S of (-1)^{|T \ S|} c(T). O(N 2^N).
inline SubsetVector superset_mobius(SubsetVector c) {
    auto& f = c.coeffs;
    for (int d = 0; d < c.n_vertices; ++d) {
        const std::size_t bit = std::size_t(1) << d;
        for (std::size_t s = 0; s < f.size(); ++s)
            if (!(s & bit)) f[s] -= f[s | bit];
    }
    return c;
}

// --- small vector metrics shared by tests, reports and the CLI ---

inline double linf_norm(const std::vector<double>& a) {
    double m = 0.0;
    for (double x : a) m = std::max(m, std::abs(x));
    return m;
}

inline double linf_diff(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("linf_diff: size mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double l1_diff(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("l1_diff: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s;
}

/// ||a - b||_2 / ||b||_2, with the convention 0/0 = 0.
inline double rel_l2_diff(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("rel_l2_diff: size mismatch");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += b[i] * b[i];
    }
    if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::sqrt(num / den);
}

inline bool all_finite(const std::vector<double>& a) {
    for (double x : a)
        if (!std::isfinite(x)) return false;
    return true;
}

} // namespace polywave
