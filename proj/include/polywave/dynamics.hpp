#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "polywave/lattice.hpp"
#include "polywave/state.hpp"

namespace polywave {

/// Largest vertex count for which the dense per-sector eigendecomposition
/// is allowed.
inline constexpr int kMaxExactVertices = 12;

enum class Method { exact_expm, rk4 };

inline const char* to_string(Method m) {
    return m == Method::exact_expm ? "exact_expm" : "rk4";
}

struct EvolutionConfig {
    double t_final = 0.0;
    Method method = Method::exact_expm;
    double dt = 1e-3;                   // fixed step for rk4
    std::vector<double> record_times;   // defaults to {t_final} when empty
};

/// d/dt coefficients of the subset heat flow:
/// out(S) = sum over S' ~ S of (f(S') - f(S)).
/// Accumulated edge by edge so every pairwise flow enters antisymmetrically.
inline void heat_rhs_into(const Lattice& lat, const std::vector<double>& f,
                          std::vector<double>& out) {
    if (f.size() != lat.n_subsets())
        throw std::invalid_argument("heat_rhs: vector size does not match lattice");
    out.assign(f.size(), 0.0);
    for (const auto& [i, j] : lat.edges) {
        const std::size_t bi = std::size_t(1) << i;
        const std::size_t bj = std::size_t(1) << j;
        for (std::size_t s = 0; s < f.size(); ++s) {
            if ((s & bi) && !(s & bj)) {
                const std::size_t t = s ^ bi ^ bj;   // the partner subset
                const double flow = f[t] - f[s];
                out[s] += flow;
                out[t] -= flow;
            }
        }
    }
}

inline SubsetVector heat_rhs(const Lattice& lat, const SubsetVector& f) {
    SubsetVector out(lat.n_vertices);
    heat_rhs_into(lat, f.coeffs, out.coeffs);
    return out;
}

/// Hamiltonian action in the subset basis: (Hf)(S) = -heat_rhs(f)(S).
/// Positive semidefinite on each fixed-cardinality sector.
inline SubsetVector apply_hamiltonian(const Lattice& lat, const SubsetVector& f) {
    SubsetVector out = heat_rhs(lat, f);
    for (double& x : out.coeffs) x = -x;
    return out;
}

/// Dense matrix of H restricted to the cardinality-n sector, over the
/// ascending-mask sector basis. This is the graph Laplacian of the
/// subset-adjacency graph on that sector: symmetric, zero row sums.
inline Eigen::MatrixXd sector_hamiltonian(const Lattice& lat, int n) {
    const auto masks = sector_masks(lat.n_vertices, n);
    const auto rank_of = [&](SubsetId m) {
        return std::size_t(std::lower_bound(masks.begin(), masks.end(), m) - masks.begin());
    };
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(ptrdiff_t(masks.size()), ptrdiff_t(masks.size()));
    for (std::size_t a = 0; a < masks.size(); ++a) {
        for_each_subset_neighbor(lat, masks[a], [&](SubsetId m) {
            M(a, a) += 1.0;
            M(a, rank_of(m)) -= 1.0;
        });
    }
    return M;
}

namespace detail {

inline void rk4_step(const Lattice& lat, std::vector<double>& f, double h,
                     std::vector<double>& k1, std::vector<double>& k2,
                     std::vector<double>& k3, std::vector<double>& k4,
                     std::vector<double>& tmp) {
    const std::size_t n = f.size();
    heat_rhs_into(lat, f, k1);
    tmp.resize(n);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = f[i] + 0.5 * h * k1[i];
    heat_rhs_into(lat, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = f[i] + 0.5 * h * k2[i];
    heat_rhs_into(lat, tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = f[i] + h * k3[i];
    heat_rhs_into(lat, tmp, k4);
    for (std::size_t i = 0; i < n; ++i)
        f[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

} // namespace detail

/// Evolves f0 under the subset heat flow and returns the state at each
/// record time (in the order requested). exact_expm diagonalizes H sector by
/// sector; rk4 takes fixed steps of cfg.dt plus one shorter landing step per
/// record time. Either way the flow never mixes cardinalities.
inline std::vector<std::pair<double, SubsetVector>>
evolve(const Lattice& lat, const SubsetVector& f0, const EvolutionConfig& cfg) {
    if (f0.n_vertices != lat.n_vertices)
        throw std::invalid_argument("evolve: state size does not match lattice");
    if (cfg.t_final < 0.0)
        throw std::invalid_argument("evolve: t_final must be nonnegative");

    std::vector<double> times = cfg.record_times;
    if (times.empty()) times.push_back(cfg.t_final);
    for (double t : times)
        if (t < 0.0 || t > cfg.t_final)
            throw std::invalid_argument("evolve: record times must lie in [0, t_final]");

    const int N = lat.n_vertices;
    std::vector<std::pair<double, SubsetVector>> out;
    out.reserve(times.size());

    if (cfg.method == Method::exact_expm) {
        if (N > kMaxExactVertices)
            throw SizeError("evolve: exact_expm supports at most " +
                            std::to_string(kMaxExactVertices) + " vertices");
        for (double t : times) out.emplace_back(t, SubsetVector(N));

        for (int n = 0; n <= N; ++n) {
            const auto masks = sector_masks(N, n);
            Eigen::MatrixXd M = sector_hamiltonian(lat, n);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
            Eigen::VectorXd v(ptrdiff_t(masks.size()));
            for (std::size_t a = 0; a < masks.size(); ++a) v(a) = f0.coeffs[masks[a]];
            const Eigen::VectorXd w = es.eigenvectors().transpose() * v;
            for (std::size_t k = 0; k < times.size(); ++k) {
                Eigen::VectorXd damped = w;
                for (ptrdiff_t e = 0; e < damped.size(); ++e)
                    damped(e) *= std::exp(-es.eigenvalues()(e) * times[k]);
                const Eigen::VectorXd slice = es.eigenvectors() * damped;
                for (std::size_t a = 0; a < masks.size(); ++a)
                    out[k].second.coeffs[masks[a]] = slice(a);
            }
        }
        return out;
    }

    // rk4
    if (cfg.dt <= 0.0)
        throw std::invalid_argument("evolve: dt must be positive");

    std::vector<std::size_t> order(times.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });

    out.assign(times.size(), {0.0, SubsetVector(N)});
    std::vector<double> f = f0.coeffs;
    std::vector<double> k1, k2, k3, k4, tmp;
    double t_cur = 0.0;
    for (std::size_t idx : order) {
        const double target = times[idx];
        double delta = target - t_cur;
        const auto steps = static_cast<std::size_t>(delta / cfg.dt);
        for (std::size_t s = 0; s < steps; ++s)
            detail::rk4_step(lat, f, cfg.dt, k1, k2, k3, k4, tmp);
        const double rem = delta - double(steps) * cfg.dt;
        if (rem > 1e-13)
            detail::rk4_step(lat, f, rem, k1, k2, k3, k4, tmp);
        t_cur = target;
        out[idx].first = target;
        out[idx].second.coeffs = f;
    }
    return out;
}

/// Convenience wrapper: the state at one time.
inline SubsetVector evolve_to(const Lattice& lat, const SubsetVector& f0, double t,
                              Method method = Method::exact_expm, double dt = 1e-3) {
    EvolutionConfig cfg;
    cfg.t_final = t;
    cfg.method = method;
    cfg.dt = dt;
    cfg.record_times = {t};
    return std::move(evolve(lat, f0, cfg).front().second);
}

} // namespace polywave
