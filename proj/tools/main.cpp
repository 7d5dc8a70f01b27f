#include <CLI11.hpp>

#include "polywave/run.hpp"
#include "polywave/version.hpp"

namespace {

void add_lattice_flags(CLI::App* cmd, polywave::CliOptions& o) {
    cmd->add_option("--dims", o.dims, "lattice side lengths, e.g. 4 or 3x2 or 2x2x2");
    cmd->add_option("--boundary", o.boundary, "open|periodic")
        ->check(CLI::IsMember({"open", "periodic"}));
    cmd->add_option("--out", o.out_dir, "output directory");
}

void add_state_flags(CLI::App* cmd, polywave::CliOptions& o) {
    cmd->add_option("--init", o.init,
                    "initial state: single:<v> | set:<mask> | product:<p0,p1,...> | "
                    "random | file:<path>");
    cmd->add_option("--seed", o.seed, "seed for random initial states");
}

void add_evolution_flags(CLI::App* cmd, polywave::CliOptions& o) {
    cmd->add_option("--t", o.t, "evolution time");
    cmd->add_option("--dt", o.dt, "rk4 step size");
    cmd->add_option("--method", o.method, "exact|rk4")
        ->check(CLI::IsMember({"exact", "exact_expm", "rk4"}));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"polywave: subset heat flow and polymer decomposition on "
                 "finite rectangular lattices"};
    app.set_version_flag("--version", polywave::kVersion);
    app.require_subcommand(1);

    polywave::CliOptions o;

    auto* evolve = app.add_subcommand(
        "evolve", "evolve a state under the subset heat flow and write snapshots");
    add_lattice_flags(evolve, o);
    add_state_flags(evolve, o);
    add_evolution_flags(evolve, o);
    evolve->add_option("--record", o.record, "extra record times besides --t");
    evolve->add_option("--watch", o.watch, "coefficient masks tracked in summary.csv");
    evolve->add_option("--format", o.format, "snapshot format")
        ->check(CLI::IsMember({"json", "csv"}));

    auto* decompose = app.add_subcommand(
        "decompose", "solve for the polymer weights of a (possibly evolved) state");
    add_lattice_flags(decompose, o);
    add_state_flags(decompose, o);
    add_evolution_flags(decompose, o);

    auto* verify = app.add_subcommand(
        "verify", "run the identity battery on random states and report residuals");
    add_lattice_flags(verify, o);
    verify->add_option("--seed", o.seed, "seed for random states");
    verify->add_option("--trials", o.trials, "random states per identity")
        ->check(CLI::PositiveNumber);

    auto* truncate = app.add_subcommand(
        "truncate", "sweep the polymer size cutoff and report reconstruction errors");
    add_lattice_flags(truncate, o);
    add_state_flags(truncate, o);
    add_evolution_flags(truncate, o);
    truncate->add_option("--kmax", o.kmax, "largest cutoff to report (default: all)");
    truncate->add_flag("--long", o.long_format, "also write a long-format table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;   // argument errors exit 2
    }

    o.command = app.get_subcommands().front()->get_name();
    return polywave::run_command(o);
}
