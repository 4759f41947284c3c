#include "caos/simulation.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "caos/errors.hpp"
#include "caos/io.hpp"

namespace caos {

long whole_steps(double interval, double dt, const char* what) {
    const double r = interval / dt;
    const double n = std::round(r);
    if (n < 1.0 || std::abs(r - n) > 1e-9 * std::max(1.0, r))
        throw ConfigError(fmt::format("{} ({:.17g}) is not a whole number of steps of {:.17g}", what, interval, dt));
    return static_cast<long>(n);
}

double choose_dt(const RunConfig& cfg, std::span<const State> initial) {
    double dt = cfg.step.dt;
    if (dt <= 0.0) {
        dt = std::numeric_limits<double>::infinity();
        for (const State& s0 : initial) {
            State s = s0;
            PoissonSolver solver(s.grid(), cfg.poisson);
            solver.solve(s.q, s.psi);
            dt = std::min(dt, stable_dt(s, cfg.step));
        }
        if (!std::isfinite(dt)) {
            StepConfig c = cfg.step;
            dt = c.dt_max > 0.0 ? c.dt_max : 0.25 * std::min(1.0 / cfg.ny, 1.0 / cfg.nz);
        }
    }
    const double per = std::ceil(cfg.cadence / dt * (1.0 - 1e-12));
    return cfg.cadence / std::max(1.0, per);
}

Integrator make_integrator(const RunConfig& cfg, const Grid& grid, ForcingSpec forcing, double dt,
                           std::shared_ptr<const MmsSources> mms) {
    StepConfig step = cfg.step;
    step.dt = dt;
    return Integrator(grid, cfg.phys, make_profiles(cfg, grid), std::move(forcing), step, cfg.poisson,
                      std::move(mms));
}

void march(Integrator& integrator, State& state, long steps_per_sample, long samples, const Observer& observe) {
    if (observe) observe(state);
    for (long k = 0; k < samples; ++k) {
        for (long n = 0; n < steps_per_sample; ++n) integrator.step(state);
        if (observe) observe(state);
    }
}

Trajectory run_simulation(const RunConfig& cfg, const RunOptions& options) {
    cfg.validate();
    const Grid grid = make_grid(cfg.ny, cfg.nz);
    const Profiles profiles = make_profiles(cfg, grid);
    const auto report = validate_profiles(profiles);
    if (!report.gamma_in_range || !report.compatibility) {
        std::string why;
        for (const auto& f : report.failures())
            if (f.find("zero-mean") == std::string::npos) why += (why.empty() ? "" : "; ") + f;
        throw HypothesisError("well-posedness hypothesis failed: " + why);
    }

    State state = make_initial_state(cfg.initial, grid);
    Trajectory out;
    out.dt = choose_dt(cfg, std::span<const State>(&state, 1));
    Integrator integrator = make_integrator(cfg, grid, make_forcing(cfg, grid), out.dt);
    integrator.initialize(state);

    const long per_sample = whole_steps(cfg.cadence, out.dt, "time.cadence");
    const long samples = whole_steps(cfg.duration, cfg.cadence, "time.duration");
    const double snap = options.snapshot_cadence > 0.0 ? options.snapshot_cadence : cfg.snapshot_cadence;
    const long snap_every = snap > 0.0 && !options.snapshot_dir.empty()
                                ? whole_steps(snap, cfg.cadence, "snapshot cadence")
                                : 0;
    long index = 0;
    march(integrator, state, per_sample, samples, [&](const State& s) {
        out.reports.push_back(energy_report(s, cfg.phys));
        if (snap_every > 0 && index % snap_every == 0) {
            auto path = options.snapshot_dir / fmt::format("snapshot_{:06d}.caos", index);
            write_snapshot(s, path);
            out.snapshots.push_back(std::move(path));
        }
        ++index;
    });
    out.steps = integrator.steps_taken();
    out.cfl_violations = integrator.cfl_violations();
    out.final_state = std::move(state);
    return out;
}

}  // namespace caos
