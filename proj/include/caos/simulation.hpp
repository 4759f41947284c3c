#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "caos/config.hpp"
#include "caos/diagnostics.hpp"

namespace caos {

/// Number of steps of size dt in `interval`; throws ConfigError unless the
/// interval is a whole multiple of dt (relative slack 1e-9).
long whole_steps(double interval, double dt, const char* what);

/// The configured dt, or else the advective bound of the most demanding of
/// `initial` (psi is recomputed from q first). Either way the result is
/// shortened so that the output cadence is a whole number of steps.
double choose_dt(const RunConfig& cfg, std::span<const State> initial);

Integrator make_integrator(const RunConfig& cfg, const Grid& grid, ForcingSpec forcing, double dt,
                           std::shared_ptr<const MmsSources> mms = nullptr);

using Observer = std::function<void(const State&)>;

/// Calls `observe` on the current state, then `samples` times more, each
/// after `steps_per_sample` steps.
void march(Integrator& integrator, State& state, long steps_per_sample, long samples, const Observer& observe);

struct RunOptions {
    std::filesystem::path snapshot_dir;  // empty: no snapshots
    double snapshot_cadence = 0.0;       // overrides the config when > 0
};

struct Trajectory {
    std::vector<EnergyReport> reports;
    std::vector<std::filesystem::path> snapshots;
    State final_state;
    double dt = 0.0;
    long steps = 0;
    long cfl_violations = 0;
};

/// Integrates the configured initial condition from t = 0 to the duration.
/// Refuses inputs outside the well-posedness hypotheses (gamma in [0, 1],
/// compatible profiles) with HypothesisError.
Trajectory run_simulation(const RunConfig& cfg, const RunOptions& options = {});

}  // namespace caos
