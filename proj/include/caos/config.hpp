#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "caos/forcing.hpp"
#include "caos/model.hpp"

namespace caos {

enum class InitialPreset { zero, smooth, random_smooth, theta_decay, mms };

const char* to_string(InitialPreset p);
InitialPreset parse_initial_preset(const std::string& s);

struct InitialCondition {
    InitialPreset preset = InitialPreset::smooth;
    double amplitude = 1.0;
    std::uint64_t seed = 1;
};

/// One atmospheric forcing mode: (mean + amplitude cos(pi y)) cos(omega t + phase).
struct ForcingModeParams {
    double mean = 0.0;
    double amplitude = 0.0;
    double omega = 0.0;
    double phase = 0.0;
};

struct RunConfig {
    int ny = 32;
    int nz = 32;
    PhysParams phys{1.0, 10.0, 0.0};
    ProfileParams profiles{0.5, 0.0, 0.05, 0.0, 0.05, 0.05};
    ForcingKind forcing_kind = ForcingKind::constant;
    std::vector<ForcingModeParams> forcing_modes;
    StepConfig step;
    PoissonOptions poisson;
    InitialCondition initial;
    double duration = 10.0;
    double cadence = 0.1;
    double snapshot_cadence = 0.0;  // 0 disables snapshots

    // [stability]
    double perturbation_amplitude = 0.05;  // amplitude of the cos(pi y) direction
    double stability_horizon = 5.0;
    // [contraction]
    InitialCondition second_initial{InitialPreset::random_smooth, 1.0, 2};
    double fit_discard = 0.2;
    double small_data_limit = 5.0;
    // [periodic]
    double test_period = 1.0;  // trial period when the forcing is constant
    int transient_periods = 10;
    double transient_rates = 5.0;
    int period_phases = 16;
    double quasi_horizon = 7.0;
    int quasi_levels = 3;
    int quasi_samples = 32;
    // [dissipativity]
    std::vector<double> ic_amplitudes{1.0, 3.1622776601683795, 10.0};
    double trace_constant = 2.0;
    // [convergence]
    std::vector<int> convergence_grids{16, 32, 64};
    double convergence_time = 1.0;
    double convergence_courant = 0.1;  // dt = courant / n

    /// Throws ConfigError naming the violated invariant.
    void validate() const;
};

/// Parses flat `key = value` text with [section] headers. Unknown keys and
/// malformed lines throw ConfigError mentioning the line number.
RunConfig parse_config(const std::string& text, const std::string& origin = "<config>");
RunConfig load_config(const std::filesystem::path& path);

Profiles make_profiles(const RunConfig& cfg, const Grid& grid);
ForcingSpec make_forcing(const RunConfig& cfg, const Grid& grid);
/// Forcing with every mode profile scaled by s and an extra constant mode
/// s * perturbation_amplitude * cos(pi y) appended.
ForcingSpec make_perturbed_forcing(const RunConfig& cfg, const Grid& grid, double s);

/// Initial state on `grid` with ghosts filled. q is sampled from psi with
/// the analytic Laplacian, S is given zero mean.
State make_initial_state(const InitialCondition& ic, const Grid& grid);

}  // namespace caos
