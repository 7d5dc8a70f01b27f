#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "polywave/dynamics.hpp"
#include "polywave/lattice.hpp"
#include "polywave/state.hpp"

namespace polywave {

/// Sector-to-sector map: source cardinality r, target cardinality s.
struct IntertwinerSpec {
    int r = 0;
    int s = 0;
};

/// Applies the superset-sum sector map: for s < r the output at S (|S| = s)
/// is the sum of g over all supersets of S of cardinality r; for s = r the
/// identity; for s > r zero. Matrix-free via one zeta sweep, O(N 2^N).
inline SectorVector apply_T(const IntertwinerSpec& spec, const SectorVector& g) {
    const int N = g.n_vertices;
    if (spec.r < 0 || spec.r > N || spec.s < 0 || spec.s > N)
        throw std::invalid_argument("apply_T: cardinalities out of range");
    if (g.n != spec.r)
        throw std::invalid_argument("apply_T: input lives in the wrong sector");
    if (spec.s == spec.r) return g;
    if (spec.s > spec.r) {
        SectorVector zero{N, spec.s, {}};
        zero.entries.assign(binomial(N, spec.s), 0.0);
        return zero;
    }
    const SubsetVector summed = superset_zeta(sector_embed(g));
    return sector_project(summed, spec.s);
}

/// Residual of an identity together with the magnitude of the values compared;
/// pass/fail thresholds are taken relative to max(1, scale).
struct Residual {
    double value = 0.0;   // max-abs difference between the two sides
    double scale = 1.0;   // max-abs of the quantities compared

    double relative() const { return value / (scale < 1.0 ? 1.0 : scale); }
};

/// Checks T^{s,k} T^{r,s} = C(r-k, s-k) T^{r,k} on a given sector-r vector
/// (requires r > s > k >= 0). Returns the max-abs deviation.
inline Residual check_composition(int r, int s, int k, const SectorVector& g) {
    if (!(r > s && s > k && k >= 0))
        throw std::invalid_argument("check_composition: need r > s > k >= 0");
    if (g.n != r)
        throw std::invalid_argument("check_composition: input lives in the wrong sector");
    const SectorVector lhs = apply_T({s, k}, apply_T({r, s}, g));
    SectorVector rhs = apply_T({r, k}, g);
    const double factor = double(binomial(r - k, s - k));
    for (double& x : rhs.entries) x *= factor;
    Residual res;
    res.value = linf_diff(lhs.entries, rhs.entries);
    res.scale = std::max(linf_norm(lhs.entries), linf_norm(rhs.entries));
    return res;
}

/// Checks that the sector map commutes with the Hamiltonian:
/// T^{r,s} H g = H T^{r,s} g as sector-s vectors. Returns the max-abs deviation.
inline Residual check_intertwining(const Lattice& lat, int r, int s, const SectorVector& g) {
    if (g.n != r || g.n_vertices != lat.n_vertices)
        throw std::invalid_argument("check_intertwining: input lives in the wrong sector");
    const IntertwinerSpec spec{r, s};
    const SectorVector lhs =
        apply_T(spec, sector_project(apply_hamiltonian(lat, sector_embed(g)), r));
    const SectorVector rhs =
        sector_project(apply_hamiltonian(lat, sector_embed(apply_T(spec, g))), s);
    Residual res;
    res.value = linf_diff(lhs.entries, rhs.entries);
    res.scale = std::max(linf_norm(lhs.entries), linf_norm(rhs.entries));
    return res;
}

/// Time-domain variant: evolving then mapping equals mapping then evolving.
inline Residual check_intertwining_time(const Lattice& lat, int r, int s,
                                        const SectorVector& g, double t,
                                        Method method = Method::exact_expm,
                                        double dt = 1e-3) {
    if (g.n != r || g.n_vertices != lat.n_vertices)
        throw std::invalid_argument("check_intertwining_time: input lives in the wrong sector");
    const IntertwinerSpec spec{r, s};
    const SectorVector lhs =
        apply_T(spec, sector_project(evolve_to(lat, sector_embed(g), t, method, dt), r));
    const SectorVector rhs =
        sector_project(evolve_to(lat, sector_embed(apply_T(spec, g)), t, method, dt), s);
    Residual res;
    res.value = linf_diff(lhs.entries, rhs.entries);
    res.scale = std::max(linf_norm(lhs.entries), linf_norm(rhs.entries));
    return res;
}

/// The two terms of the one-step-down commutation argument, evaluated at a
/// fixed set s of cardinality r-1 for a sector-r vector f. Writing
/// g(s) = sum over i outside s of f(s + i), the time derivative of g at s
/// splits into
///   i1: moves inside s     (element a of s replaced by b outside s, b != i)
///   i2: moves of i itself  (i replaced by a lattice neighbor j outside s + i)
/// i1 equals the heat right-hand side of g at s, and i2 cancels pairwise to 0.
struct SplitTerms {
    double i1 = 0.0;
    double i2 = 0.0;
};

inline SplitTerms check_descent_split(const Lattice& lat, SubsetId s, const SectorVector& f) {
    if (!lat.valid_mask(s))
        throw std::invalid_argument("check_descent_split: mask out of range");
    if (f.n_vertices != lat.n_vertices || cardinality(s) != f.n - 1)
        throw std::invalid_argument("check_descent_split: need |s| = r - 1 for a sector-r input");

    const SubsetVector full = sector_embed(f);
    const int N = lat.n_vertices;
    SplitTerms out;

    for (int i = 0; i < N; ++i) {
        if ((s >> i) & 1u) continue;
        const SubsetId si = s | (SubsetId(1) << i);

        // moves that stay inside s: a in s replaced by b outside s, b != i
        for (int a = 0; a < N; ++a) {
            if (!((s >> a) & 1u)) continue;
            for (int b : lat.neighbors[a]) {
                if (((s >> b) & 1u) || b == i) continue;
                const SubsetId moved = (s ^ (SubsetId(1) << a)) | (SubsetId(1) << b);
                out.i1 += full.coeffs[moved | (SubsetId(1) << i)] - full.coeffs[si];
            }
        }

        // moves of the added element itself: i -> j with j outside s + i
        for (int j : lat.neighbors[i]) {
            if ((s >> j) & 1u) continue;
            out.i2 += full.coeffs[s | (SubsetId(1) << j)] - full.coeffs[si];
        }
    }
    return out;
}

} // namespace polywave
