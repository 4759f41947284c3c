// Command-line driver: simulations, the five verification experiments and
// snapshot inspection. Exit codes: 0 ok, 2 config or hypothesis error,
// 3 divergence, 4 check failed, 1 anything else (I/O, format).
#include <cstdio>
#include <filesystem>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "caos/errors.hpp"
#include "caos/experiments.hpp"
#include "caos/io.hpp"
#include "caos/simulation.hpp"

namespace fs = std::filesystem;
using namespace caos;

namespace {

struct Options {
    std::string config;
    std::string out = ".";
    double snapshots = 0.0;
    bool quiet = false;
    std::string snapshot_path;
};

RunConfig config_of(const Options& o) {
    if (o.config.empty()) {
        RunConfig c;
        c.validate();
        return c;
    }
    return load_config(o.config);
}

void emit(const Options& o, const std::string& name, const std::string& text) {
    write_text(fs::path(o.out) / (name + ".txt"), text);
    if (!o.quiet) std::fputs(text.c_str(), stdout);
}

int run_command(const std::string& cmd, const Options& o) {
    if (cmd == "inspect-snapshot") {
        const State s = read_snapshot(o.snapshot_path);
        const PhysParams params = o.config.empty() ? PhysParams{} : load_config(o.config).phys;
        const EnergyReport r = energy_report(s, params);
        fmt::print("t = {:.17g}\ngrid = {} x {}\n", s.t, s.grid().ny, s.grid().nz);
        fmt::print("l2 = theta {:.17g}, q {:.17g}, T {:.17g}, S {:.17g}\n", r.l2_theta, r.l2_q, r.l2_T, r.l2_S);
        fmt::print("h1 = theta {:.17g}, q {:.17g}, T {:.17g}, S {:.17g}\n", r.h1_theta, r.h1_q, r.h1_T, r.h1_S);
        fmt::print("trace_T = {:.17g}\nE = {:.17g}\n", r.trace_T, r.E);
        return 0;
    }

    const RunConfig cfg = config_of(o);
    if (cmd == "run") {
        RunOptions ro;
        if (o.snapshots > 0.0) {
            ro.snapshot_dir = fs::path(o.out) / "snapshots";
            ro.snapshot_cadence = o.snapshots;
        } else if (cfg.snapshot_cadence > 0.0) {
            ro.snapshot_dir = fs::path(o.out) / "snapshots";
        }
        const Trajectory tr = run_simulation(cfg, ro);
        write_csv(tr.reports, fs::path(o.out) / "series.csv");
        if (!o.quiet)
            fmt::print("steps = {}\ndt = {:.17g}\ncfl_violations = {}\nsnapshots = {}\nfinal_E = {:.17g}\n",
                       tr.steps, tr.dt, tr.cfl_violations, tr.snapshots.size(), tr.reports.back().E);
        return 0;
    }
    if (cmd == "convergence") {
        const auto r = exp_convergence(cfg);
        emit(o, "convergence", r.to_text());
        return r.failed ? 4 : 0;
    }
    if (cmd == "stability") {
        const auto r = exp_stability(cfg);
        emit(o, "stability", r.to_text());
        return r.passed ? 0 : 4;
    }
    if (cmd == "dissipativity") {
        const auto r = exp_dissipativity(cfg);
        for (std::size_t k = 0; k < r.runs.size(); ++k)
            write_csv(r.runs[k].series, fs::path(o.out) / fmt::format("dissipativity_run{}.csv", k));
        emit(o, "dissipativity", r.to_text());
        return r.passed() ? 0 : 4;
    }
    if (cmd == "contraction") {
        const auto r = exp_contraction(cfg);
        write_text(fs::path(o.out) / "contraction.csv", r.series_csv());
        emit(o, "contraction", r.to_text());
        return r.passed() ? 0 : 4;
    }
    if (cmd == "periodic") {
        const auto r = exp_periodic_response(cfg);
        emit(o, "periodic", r.to_text());
        return r.passed ? 0 : 4;
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"caos: coupled atmosphere-ocean simulations and verification experiments"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "run configuration file")->check(CLI::ExistingFile);
        sub->add_option("--out", o.out, "output directory")->capture_default_str();
        sub->add_flag("--quiet", o.quiet, "no report on stdout");
    };
    auto* run = app.add_subcommand("run", "integrate one configuration, write series.csv");
    add_common(run);
    run->add_option("--snapshots", o.snapshots, "snapshot cadence in time units (0: none)");
    for (const char* name : {"convergence", "stability", "dissipativity", "contraction", "periodic"})
        add_common(app.add_subcommand(name, fmt::format("{} experiment", name)));
    auto* inspect = app.add_subcommand("inspect-snapshot", "print the norms of a snapshot file");
    inspect->add_option("path", o.snapshot_path, "snapshot file")->required();
    inspect->add_option("--config", o.config, "configuration supplying Pr and Ra")->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const std::string cmd = app.get_subcommands().front()->get_name();
    try {
        return run_command(cmd, o);
    } catch (const ConfigError& e) {
        fmt::print(stderr, "configuration error: {}\n", e.what());
        return 2;
    } catch (const HypothesisError& e) {
        fmt::print(stderr, "refused: {}\n", e.what());
        return 2;
    } catch (const DivergenceError& e) {
        fmt::print(stderr, "diverged: {}\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    }
}
