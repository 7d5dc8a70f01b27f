#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "polywave/dynamics.hpp"
#include "polywave/errors.hpp"
#include "polywave/intertwiners.hpp"
#include "polywave/io.hpp"
#include "polywave/lattice.hpp"
#include "polywave/polymer.hpp"
#include "polywave/state.hpp"
#include "polywave/version.hpp"

namespace polywave {

struct CliOptions {
    std::string command;
    std::string dims = "2";
    std::string boundary = "open";
    std::string init = "single:0";
    std::uint64_t seed = 0;
    double t = 0.0;
    double dt = 1e-3;
    std::string method = "exact";
    std::vector<double> record;          // extra record times (evolve)
    std::vector<std::uint64_t> watch;    // coefficient masks tracked in summary.csv
    int kmax = 0;                        // 0 = sweep up to N (truncate)
    int trials = 20;                     // verify
    std::string out_dir = ".";
    std::string format = "json";         // json | csv snapshots
    bool long_format = false;            // extra long-format truncation table
};

inline std::vector<int> parse_dims(const std::string& text) {
    std::vector<int> dims;
    std::string part;
    std::stringstream ss(text);
    while (std::getline(ss, part, 'x')) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(part, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("dims: cannot parse '" + text + "'");
        }
        if (used != part.size() || v < 1)
            throw std::invalid_argument("dims: cannot parse '" + text + "'");
        dims.push_back(v);
    }
    if (dims.empty())
        throw std::invalid_argument("dims: cannot parse '" + text + "'");
    return dims;
}

inline Boundary parse_boundary(const std::string& text) {
    if (text == "open") return Boundary::open;
    if (text == "periodic") return Boundary::periodic;
    throw std::invalid_argument("boundary: expected open|periodic, got '" + text + "'");
}

inline Method parse_method(const std::string& text) {
    if (text == "exact" || text == "exact_expm") return Method::exact_expm;
    if (text == "rk4") return Method::rk4;
    throw std::invalid_argument("method: expected exact|rk4, got '" + text + "'");
}

/// Seeded generator with a platform-independent uniform double.
struct Rng {
    std::mt19937_64 eng;
    explicit Rng(std::uint64_t seed) : eng(seed) {}
    double uniform01() { return double(eng() >> 11) * 0x1.0p-53; }
    double symmetric() { return 2.0 * uniform01() - 1.0; }
};

inline SubsetVector random_nonneg_state(Rng& rng, int n_vertices) {
    SubsetVector v(n_vertices);
    for (double& x : v.coeffs) x = rng.uniform01();
    return normalize(v);
}

inline SectorVector random_sector_state(Rng& rng, int n_vertices, int r) {
    SectorVector g{n_vertices, r, {}};
    g.entries.resize(binomial(n_vertices, r));
    for (double& x : g.entries) x = rng.symmetric();
    return g;
}

/// Initial-state grammar: single:<vertex> | set:<mask> | product:<p0,p1,...>
/// | random (seeded, nonnegative, unit sum) | file:<path>.
inline SubsetVector initial_state(const Lattice& lat, const std::string& descriptor,
                                  std::uint64_t seed) {
    const int N = lat.n_vertices;
    if (descriptor == "random") {
        Rng rng(seed);
        return random_nonneg_state(rng, N);
    }
    const auto colon = descriptor.find(':');
    const std::string kind = descriptor.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : descriptor.substr(colon + 1);
    if (kind == "single") {
        const int v = std::stoi(arg);
        if (v < 0 || v >= N)
            throw std::invalid_argument("init single: vertex out of range");
        SubsetVector f(N);
        f.coeffs[SubsetId(1) << v] = 1.0;
        return f;
    }
    if (kind == "set") {
        const std::uint64_t m = std::stoull(arg);
        if (m >= lat.n_subsets())
            throw std::invalid_argument("init set: mask out of range");
        SubsetVector f(N);
        f.coeffs[m] = 1.0;
        return f;
    }
    if (kind == "product") {
        std::vector<double> p;
        std::string part;
        std::stringstream ss(arg);
        while (std::getline(ss, part, ',')) p.push_back(std::stod(part));
        if (int(p.size()) != N)
            throw std::invalid_argument("init product: expected one probability per vertex");
        for (double x : p)
            if (!(x >= 0.0 && x <= 1.0))
                throw std::invalid_argument("init product: probabilities must lie in [0,1]");
        SubsetVector f(N);
        for (std::size_t m = 0; m < f.size(); ++m) {
            double val = 1.0;
            for (int i = 0; i < N; ++i) val *= (m >> i) & 1u ? p[i] : 1.0 - p[i];
            f.coeffs[m] = val;
        }
        return f;
    }
    if (kind == "file") {
        SubsetVector f = load_subset_vector(arg);
        if (f.n_vertices != N)
            throw std::invalid_argument("init file: state size does not match lattice");
        return f;
    }
    throw std::invalid_argument("init: unknown state descriptor '" + descriptor + "'");
}

inline std::string fnv1a64_hex(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// Everything needed to replay a run, plus the hash that output files embed.
/// The hash covers only the reproducibility-relevant core (not timings).
struct RunManifest {
    nlohmann::json core;
    std::string hash;
};

inline RunManifest make_manifest(const CliOptions& o) {
    nlohmann::json core{
        {"tool", "polywave"},
        {"version", kVersion},
        {"command", o.command},
        {"lattice", {{"dims", o.dims}, {"boundary", o.boundary}}},
        {"init", o.init},
        {"seed", o.seed},
        {"evolution",
         {{"t", o.t}, {"dt", o.dt}, {"method", o.method}, {"record", o.record}}},
        {"kmax", o.kmax},
        {"trials", o.trials},
        {"format", o.format},
    };
    return RunManifest{core, fnv1a64_hex(core.dump())};
}

inline void write_manifest(const std::filesystem::path& dir, const RunManifest& m,
                           const std::vector<std::string>& outputs, double wall_ms) {
    nlohmann::json j = m.core;
    j["manifest_hash"] = m.hash;
    j["outputs"] = outputs;
    j["timings"] = {{"wall_ms", wall_ms}};
    std::ofstream out(dir / "run_manifest.json");
    out << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Identity battery (verify)
// ---------------------------------------------------------------------------

struct IdentityResult {
    std::string identity;
    std::string lattice;
    std::string sizes;
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

inline std::string dims_string(const Lattice& lat) {
    std::string s;
    for (std::size_t i = 0; i < lat.dims.size(); ++i) {
        if (i) s += 'x';
        s += std::to_string(lat.dims[i]);
    }
    s += ' ';
    s += to_string(lat.boundary);
    return s;
}

/// Runs every algebraic identity the library is built around on random data
/// and reports one worst-case residual per identity.
inline std::vector<IdentityResult> run_identity_battery(const Lattice& lat,
                                                        std::uint64_t seed, int trials) {
    const int N = lat.n_vertices;
    const std::string lat_str = dims_string(lat);
    Rng rng(seed);
    std::vector<IdentityResult> results;

    auto add = [&](const std::string& name, const std::string& sizes, double residual,
                   double tol) {
        results.push_back({name, lat_str, sizes, residual, tol, residual <= tol});
    };

    // sector map composition
    double worst = 0.0;
    for (int r = 0; r <= N; ++r)
        for (int s = 0; s < r; ++s)
            for (int k = 0; k < s; ++k)
                for (int trial = 0; trial < trials; ++trial) {
                    const auto g = random_sector_state(rng, N, r);
                    worst = std::max(worst, check_composition(r, s, k, g).relative());
                }
    add("composition", "all r>s>k, " + std::to_string(trials) + " trials", worst, 1e-12);

    // commutation with the Hamiltonian
    worst = 0.0;
    for (int r = 0; r <= N; ++r)
        for (int s = 0; s <= r; ++s)
            for (int trial = 0; trial < trials; ++trial) {
                const auto g = random_sector_state(rng, N, r);
                worst = std::max(worst, check_intertwining(lat, r, s, g).relative());
            }
    add("intertwining", "all 0<=s<=r<=" + std::to_string(N), worst, 1e-12);

    // descent split: the inside-moves term matches the heat rhs of the
    // mapped-down state, and the self-moves term cancels to zero
    double worst_i1 = 0.0, worst_i2 = 0.0;
    for (int r = 1; r <= N; ++r) {
        const auto masks = sector_masks(N, r - 1);
        for (int trial = 0; trial < std::max(trials, 2); ++trial) {
            const auto f = random_sector_state(rng, N, r);
            const SubsetId s = masks[std::size_t(rng.uniform01() * double(masks.size())) %
                                     masks.size()];
            const SplitTerms split = check_descent_split(lat, s, f);
            const SubsetVector g = sector_embed(apply_T({r, r - 1}, f));
            const double reference = heat_rhs(lat, g).coeffs[s];
            const double scale = std::max(1.0, std::abs(reference));
            worst_i1 = std::max(worst_i1, std::abs(split.i1 - reference) / scale);
            worst_i2 = std::max(worst_i2, std::abs(split.i2) / scale);
        }
    }
    add("descent_split_inside_moves", "r=1.." + std::to_string(N), worst_i1, 1e-12);
    add("descent_split_self_moves", "r=1.." + std::to_string(N), worst_i2, 1e-12);

    // superset-sum / inverse roundtrip
    worst = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
        SubsetVector v(N);
        for (double& x : v.coeffs) x = rng.symmetric();
        const SubsetVector z = superset_zeta(v);
        const double scale = std::max(1.0, linf_norm(z.coeffs));
        worst = std::max(worst,
                         linf_diff(superset_mobius(z).coeffs, v.coeffs) / scale);
        worst = std::max(worst, linf_diff(superset_zeta(superset_mobius(v)).coeffs,
                                          v.coeffs) / scale);
    }
    add("zeta_mobius_roundtrip", std::to_string(trials) + " trials", worst, 1e-12);

    // unit-sum conservation under evolution
    {
        const SubsetVector f0 = random_nonneg_state(rng, N);
        const double t = 2.0;
        double drift_rk4 = std::abs(total_sum(evolve_to(lat, f0, t, Method::rk4)) - 1.0);
        add("unit_sum_conservation_rk4", "t=2", drift_rk4, 1e-9);
        if (N <= kMaxExactVertices) {
            double drift_exact =
                std::abs(total_sum(evolve_to(lat, f0, t, Method::exact_expm)) - 1.0);
            add("unit_sum_conservation_exact", "t=2", drift_exact, 1e-12);
        }
    }

    // polymer roundtrip
    if (N <= 16) {
        const int n_states = N <= 12 ? trials : 2;
        worst = 0.0;
        for (int trial = 0; trial < n_states; ++trial) {
            const SubsetVector f = random_nonneg_state(rng, N);
            const SubsetVector back = reconstruct_f(solve_u(compute_c(f)));
            worst = std::max(worst, linf_diff(back.coeffs, f.coeffs) /
                                        std::max(1e-300, linf_norm(f.coeffs)));
        }
        add("polymer_roundtrip", std::to_string(n_states) + " states", worst, 1e-10);
    }

    // superset sums evolve like states: both orders agree
    if (N <= kMaxExactVertices) {
        const SubsetVector f0 = random_nonneg_state(rng, N);
        const double t = 1.0;
        const SubsetVector a = compute_c(evolve_to(lat, f0, t));
        const SubsetVector b = evolve_to(lat, compute_c(f0), t);
        add("superset_sums_follow_heat_flow", "t=1", linf_diff(a.coeffs, b.coeffs), 1e-8);
    }

    return results;
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

namespace detail {

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                         start)
            .count();
    }
};

inline std::ofstream open_output(const std::filesystem::path& p) {
    std::ofstream out(p);
    if (!out)
        throw std::invalid_argument("cannot write output file: " + p.string());
    return out;
}

} // namespace detail

inline int cmd_evolve(const CliOptions& o) {
    detail::Timer timer;
    const Lattice lat = build_lattice(parse_dims(o.dims), parse_boundary(o.boundary));
    const SubsetVector f0 = initial_state(lat, o.init, o.seed);

    EvolutionConfig cfg;
    cfg.t_final = o.t;
    cfg.method = parse_method(o.method);
    cfg.dt = o.dt;
    std::set<double> times(o.record.begin(), o.record.end());
    times.insert(o.t);
    cfg.record_times.assign(times.begin(), times.end());

    const auto snapshots = evolve(lat, f0, cfg);

    const std::filesystem::path dir(o.out_dir);
    std::filesystem::create_directories(dir);
    const RunManifest manifest = make_manifest(o);
    std::vector<std::string> outputs;

    const double sum0 = total_sum(f0);
    for (std::size_t k = 0; k < snapshots.size(); ++k) {
        char name[64];
        std::snprintf(name, sizeof name, "snapshot_%03zu.%s", k,
                      o.format == "csv" ? "csv" : "json");
        const auto path = dir / name;
        if (o.format == "csv") {
            auto out = detail::open_output(path);
            out << "# time=" << format_double(snapshots[k].first) << '\n';
            write_subset_vector_csv(out, snapshots[k].second, manifest.hash);
        } else {
            nlohmann::json j = to_json(snapshots[k].second);
            j["time"] = snapshots[k].first;
            j["manifest_hash"] = manifest.hash;
            auto out = detail::open_output(path);
            out << j.dump(2) << '\n';
        }
        outputs.push_back(name);
    }

    {
        auto out = detail::open_output(dir / "summary.csv");
        out << "# manifest_hash=" << manifest.hash << '\n';
        out << "time,total_sum,drift";
        for (auto m : o.watch) out << ",coeff_" << m;
        out << '\n';
        for (const auto& [t, state] : snapshots) {
            const double sum = total_sum(state);
            out << format_double(t) << ',' << format_double(sum) << ','
                << format_double(sum - sum0);
            for (auto m : o.watch) {
                if (m >= state.size())
                    throw std::invalid_argument("watch: mask out of range");
                out << ',' << format_double(state.coeffs[m]);
            }
            out << '\n';
        }
        outputs.push_back("summary.csv");
    }

    write_manifest(dir, manifest, outputs, timer.ms());
    const double drift = total_sum(snapshots.back().second) - sum0;
    std::cout << "evolved dims=" << o.dims << " to t=" << format_double(o.t)
              << " (method=" << o.method << "), total_sum drift=" << format_double(drift)
              << '\n';
    return 0;
}

inline int cmd_decompose(const CliOptions& o) {
    detail::Timer timer;
    const Lattice lat = build_lattice(parse_dims(o.dims), parse_boundary(o.boundary));
    SubsetVector f = initial_state(lat, o.init, o.seed);
    if (o.t > 0.0) f = evolve_to(lat, f, o.t, parse_method(o.method), o.dt);
    f = normalize(f);

    const SubsetVector c = compute_c(f);
    const PolymerCoefficients p = solve_u(c);
    const SubsetVector back = reconstruct_f(p);
    const double residual = linf_diff(back.coeffs, f.coeffs);
    const double residual_rel = residual / std::max(1e-300, linf_norm(f.coeffs));

    const std::filesystem::path dir(o.out_dir);
    std::filesystem::create_directories(dir);
    const RunManifest manifest = make_manifest(o);

    {
        auto out = detail::open_output(dir / "phi.csv");
        out << "# manifest_hash=" << manifest.hash << '\n';
        out << "vertex,phi\n";
        for (int i = 0; i < p.n_vertices; ++i)
            out << i << ',' << format_double(p.phi[i]) << '\n';
    }
    double max_abs_u = 0.0;
    {
        auto out = detail::open_output(dir / "u.csv");
        out << "# manifest_hash=" << manifest.hash << '\n';
        out << "mask,cardinality,value\n";
        for (SubsetId s = 0; s < SubsetId(p.u.size()); ++s) {
            const int card = cardinality(s);
            if (card < 2) continue;
            out << s << ',' << card << ',' << format_double(p.u[s]) << '\n';
            max_abs_u = std::max(max_abs_u, std::abs(p.u[s]));
        }
    }
    {
        nlohmann::json j{{"n_vertices", p.n_vertices},
                         {"roundtrip_residual_linf", residual},
                         {"roundtrip_residual_rel", residual_rel},
                         {"max_abs_u", max_abs_u},
                         {"manifest_hash", manifest.hash}};
        auto out = detail::open_output(dir / "decompose_report.json");
        out << j.dump(2) << '\n';
    }
    write_manifest(dir, manifest, {"phi.csv", "u.csv", "decompose_report.json"}, timer.ms());
    std::cout << "decomposed dims=" << o.dims << ": max|u|=" << format_double(max_abs_u)
              << ", roundtrip residual=" << format_double(residual_rel) << '\n';
    return 0;
}

inline int cmd_verify(const CliOptions& o) {
    detail::Timer timer;
    const Lattice lat = build_lattice(parse_dims(o.dims), parse_boundary(o.boundary));
    const auto results = run_identity_battery(lat, o.seed, o.trials);

    const std::filesystem::path dir(o.out_dir);
    std::filesystem::create_directories(dir);
    const RunManifest manifest = make_manifest(o);

    bool all_pass = true;
    nlohmann::json report = nlohmann::json::array();
    for (const auto& r : results) {
        all_pass = all_pass && r.pass;
        report.push_back({{"identity", r.identity},
                          {"lattice", r.lattice},
                          {"sizes", r.sizes},
                          {"residual", r.residual},
                          {"tolerance", r.tolerance},
                          {"pass", r.pass}});
        std::cout << (r.pass ? "pass  " : "FAIL  ") << r.identity << " (" << r.sizes
                  << "): residual=" << format_double(r.residual) << '\n';
    }
    {
        nlohmann::json j{{"lattice", dims_string(lat)},
                         {"identities", report},
                         {"all_pass", all_pass},
                         {"manifest_hash", manifest.hash}};
        auto out = detail::open_output(dir / "verify_report.json");
        out << j.dump(2) << '\n';
    }
    write_manifest(dir, manifest, {"verify_report.json"}, timer.ms());
    return all_pass ? 0 : 1;
}

inline int cmd_truncate(const CliOptions& o) {
    detail::Timer timer;
    const Lattice lat = build_lattice(parse_dims(o.dims), parse_boundary(o.boundary));
    SubsetVector f = initial_state(lat, o.init, o.seed);
    if (o.t > 0.0) f = evolve_to(lat, f, o.t, parse_method(o.method), o.dt);
    f = normalize(f);

    const PolymerCoefficients p = solve_u(compute_c(f));
    const auto rows = truncation_table(p, o.kmax);

    const std::filesystem::path dir(o.out_dir);
    std::filesystem::create_directories(dir);
    const RunManifest manifest = make_manifest(o);
    std::vector<std::string> outputs{"truncation.csv"};

    {
        auto out = detail::open_output(dir / "truncation.csv");
        out << "# manifest_hash=" << manifest.hash << '\n';
        out << "k_max,l1_error,linf_error,rel_l2_error\n";
        for (const auto& r : rows)
            out << r.k_max << ',' << format_double(r.l1_error) << ','
                << format_double(r.linf_error) << ',' << format_double(r.rel_l2_error)
                << '\n';
    }
    if (o.long_format) {
        auto out = detail::open_output(dir / "truncation_long.csv");
        out << "# manifest_hash=" << manifest.hash << '\n';
        out << "k_max,metric,value\n";
        for (const auto& r : rows) {
            out << r.k_max << ",l1," << format_double(r.l1_error) << '\n';
            out << r.k_max << ",linf," << format_double(r.linf_error) << '\n';
            out << r.k_max << ",rel_l2," << format_double(r.rel_l2_error) << '\n';
        }
        outputs.push_back("truncation_long.csv");
    }
    write_manifest(dir, manifest, outputs, timer.ms());
    std::cout << "truncation sweep dims=" << o.dims << " t=" << format_double(o.t) << ": "
              << rows.size() << " rows\n";
    return 0;
}

/// Dispatch plus the exit-code contract: 0 success, 1 failed verification,
/// 2 argument errors, 3 size-cap violations, 4 degenerate normalization.
inline int run_command(const CliOptions& o) {
    try {
        if (o.command == "evolve") return cmd_evolve(o);
        if (o.command == "decompose") return cmd_decompose(o);
        if (o.command == "verify") return cmd_verify(o);
        if (o.command == "truncate") return cmd_truncate(o);
        throw std::invalid_argument("unknown command '" + o.command + "'");
    } catch (const NormalizationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const SizeError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

} // namespace polywave
