#include "caos/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "caos/errors.hpp"

namespace caos {

const char* to_string(InitialPreset p) {
    switch (p) {
        case InitialPreset::zero: return "zero";
        case InitialPreset::smooth: return "smooth";
        case InitialPreset::random_smooth: return "random_smooth";
        case InitialPreset::theta_decay: return "theta_decay";
        case InitialPreset::mms: return "mms";
    }
    return "?";
}

InitialPreset parse_initial_preset(const std::string& s) {
    for (auto p : {InitialPreset::zero, InitialPreset::smooth, InitialPreset::random_smooth,
                   InitialPreset::theta_decay, InitialPreset::mms})
        if (s == to_string(p)) return p;
    throw ConfigError("unknown initial-condition preset '" + s + "'");
}

void RunConfig::validate() const {
    auto need = [](bool ok, const std::string& what) {
        if (!ok) throw ConfigError("invalid configuration: " + what);
    };
    need(ny >= kMinCells && nz >= kMinCells, "grid.ny and grid.nz must be >= " + std::to_string(kMinCells));
    phys.validate();
    need(profiles.gamma0 >= 0.0 && profiles.gamma0 <= 1.0,
         "profiles.gamma0 must lie in [0, 1], got " + std::to_string(profiles.gamma0));
    step.validate();
    need(duration > 0.0, "time.duration must be > 0");
    need(cadence > 0.0, "time.cadence must be > 0");
    need(snapshot_cadence >= 0.0, "output.snapshot_cadence must be >= 0");
    need(initial.amplitude >= 0.0 && second_initial.amplitude >= 0.0, "initial amplitudes must be >= 0");
    need(stability_horizon > 0.0, "stability.horizon must be > 0");
    need(fit_discard >= 0.0 && fit_discard < 1.0, "contraction.fit_discard must lie in [0, 1)");
    need(small_data_limit > 0.0, "contraction.small_data_limit must be > 0");
    need(test_period > 0.0, "periodic.test_period must be > 0");
    need(transient_periods >= 0 && transient_rates >= 0.0, "periodic transient lengths must be >= 0");
    need(period_phases >= 1 && quasi_samples >= 1, "periodic sample counts must be >= 1");
    need(quasi_horizon > 0.0 && quasi_levels >= 1, "periodic.quasi_horizon > 0 and quasi_levels >= 1");
    need(ic_amplitudes.size() >= 3, "dissipativity.ic_amplitudes needs at least three entries");
    need(trace_constant > 0.0, "dissipativity.trace_constant must be > 0");
    need(convergence_grids.size() >= 2, "convergence.grids needs at least two resolutions");
    for (int n : convergence_grids) need(n >= kMinCells, "convergence.grids entries must be >= 8");
    need(convergence_time > 0.0 && convergence_courant > 0.0, "convergence time and courant must be > 0");
    for (const auto& m : forcing_modes)
        need(std::isfinite(m.mean) && std::isfinite(m.amplitude) && std::isfinite(m.phase),
             "forcing mode coefficients must be finite");
    // Checks ForcingSpec invariants (kind versus frequencies).
    make_forcing(*this, make_grid(kMinCells, kMinCells));
}

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double to_real(const std::string& v) {
    double x = 0.0;
    const auto* end = v.data() + v.size();
    auto [p, ec] = std::from_chars(v.data(), end, x);
    if (ec != std::errc() || p != end) throw ConfigError("expected a number, got '" + v + "'");
    return x;
}

long long to_integer(const std::string& v) {
    long long x = 0;
    const auto* end = v.data() + v.size();
    auto [p, ec] = std::from_chars(v.data(), end, x);
    if (ec != std::errc() || p != end) throw ConfigError("expected an integer, got '" + v + "'");
    return x;
}

bool to_bool(const std::string& v) {
    if (v == "on" || v == "true" || v == "yes" || v == "1") return true;
    if (v == "off" || v == "false" || v == "no" || v == "0") return false;
    throw ConfigError("expected on or off, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

std::vector<double> to_reals(const std::string& v) {
    std::vector<double> out;
    for (const auto& s : split_list(v)) out.push_back(to_real(s));
    return out;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> t;
        auto real = [&](const std::string& key, double RunConfig::*m) {
            t[key] = [m](RunConfig& c, const std::string& v) { c.*m = to_real(v); };
        };
        auto integer = [&](const std::string& key, int RunConfig::*m) {
            t[key] = [m](RunConfig& c, const std::string& v) { c.*m = static_cast<int>(to_integer(v)); };
        };
        integer("grid.ny", &RunConfig::ny);
        integer("grid.nz", &RunConfig::nz);
        t["physics.Pr"] = [](RunConfig& c, const std::string& v) { c.phys.Pr = to_real(v); };
        t["physics.Ra"] = [](RunConfig& c, const std::string& v) { c.phys.Ra = to_real(v); };
        t["physics.a"] = [](RunConfig& c, const std::string& v) { c.phys.a = to_real(v); };
        t["profiles.gamma0"] = [](RunConfig& c, const std::string& v) { c.profiles.gamma0 = to_real(v); };
        t["profiles.Aa"] = [](RunConfig& c, const std::string& v) { c.profiles.Aa = to_real(v); };
        t["profiles.Ba"] = [](RunConfig& c, const std::string& v) { c.profiles.Ba = to_real(v); };
        t["profiles.Ao"] = [](RunConfig& c, const std::string& v) { c.profiles.Ao = to_real(v); };
        t["profiles.Bo"] = [](RunConfig& c, const std::string& v) { c.profiles.Bo = to_real(v); };
        t["profiles.F0"] = [](RunConfig& c, const std::string& v) { c.profiles.F0 = to_real(v); };

        t["forcing.kind"] = [](RunConfig& c, const std::string& v) { c.forcing_kind = parse_forcing_kind(v); };
        auto mode_list = [&](const std::string& key, double ForcingModeParams::*m) {
            t[key] = [m](RunConfig& c, const std::string& v) {
                const auto xs = to_reals(v);
                if (!c.forcing_modes.empty() && c.forcing_modes.size() != xs.size())
                    throw ConfigError("forcing lists must have equal lengths, expected " +
                                      std::to_string(c.forcing_modes.size()) + " entries");
                c.forcing_modes.resize(xs.size());
                for (std::size_t k = 0; k < xs.size(); ++k) c.forcing_modes[k].*m = xs[k];
            };
        };
        mode_list("forcing.means", &ForcingModeParams::mean);
        mode_list("forcing.amplitudes", &ForcingModeParams::amplitude);
        mode_list("forcing.omegas", &ForcingModeParams::omega);
        mode_list("forcing.phases", &ForcingModeParams::phase);

        t["time.dt"] = [](RunConfig& c, const std::string& v) { c.step.dt = to_real(v); };
        t["time.scheme"] = [](RunConfig& c, const std::string& v) {
            if (v == "crank_nicolson") c.step.diffusion_scheme = DiffusionScheme::crank_nicolson;
            else if (v == "backward_euler") c.step.diffusion_scheme = DiffusionScheme::backward_euler;
            else throw ConfigError("unknown diffusion scheme '" + v + "'");
        };
        t["time.cfl_safety"] = [](RunConfig& c, const std::string& v) { c.step.cfl_safety = to_real(v); };
        t["time.dt_max"] = [](RunConfig& c, const std::string& v) { c.step.dt_max = to_real(v); };
        t["time.salinity_projection"] = [](RunConfig& c, const std::string& v) {
            c.step.salinity_projection = to_bool(v);
        };
        real("time.duration", &RunConfig::duration);
        real("time.cadence", &RunConfig::cadence);
        real("output.snapshot_cadence", &RunConfig::snapshot_cadence);

        t["poisson.method"] = [](RunConfig& c, const std::string& v) {
            if (v == "transform") c.poisson.method = PoissonMethod::transform;
            else if (v == "conjugate_gradient") c.poisson.method = PoissonMethod::conjugate_gradient;
            else throw ConfigError("unknown Poisson method '" + v + "'");
        };
        t["poisson.tolerance"] = [](RunConfig& c, const std::string& v) { c.poisson.tolerance = to_real(v); };
        t["poisson.max_iterations"] = [](RunConfig& c, const std::string& v) {
            c.poisson.max_iterations = static_cast<int>(to_integer(v));
        };

        auto ic = [&](const std::string& prefix, InitialCondition RunConfig::*m) {
            t[prefix + "preset"] = [m](RunConfig& c, const std::string& v) { (c.*m).preset = parse_initial_preset(v); };
            t[prefix + "amplitude"] = [m](RunConfig& c, const std::string& v) { (c.*m).amplitude = to_real(v); };
            t[prefix + "seed"] = [m](RunConfig& c, const std::string& v) {
                const auto s = to_integer(v);
                if (s < 0) throw ConfigError("seed must be >= 0");
                (c.*m).seed = static_cast<std::uint64_t>(s);
            };
        };
        ic("initial.", &RunConfig::initial);
        ic("contraction.second_", &RunConfig::second_initial);

        real("stability.perturbation_amplitude", &RunConfig::perturbation_amplitude);
        real("stability.horizon", &RunConfig::stability_horizon);
        real("contraction.fit_discard", &RunConfig::fit_discard);
        real("contraction.small_data_limit", &RunConfig::small_data_limit);
        real("periodic.test_period", &RunConfig::test_period);
        integer("periodic.transient_periods", &RunConfig::transient_periods);
        real("periodic.transient_rates", &RunConfig::transient_rates);
        integer("periodic.phases", &RunConfig::period_phases);
        real("periodic.quasi_horizon", &RunConfig::quasi_horizon);
        integer("periodic.quasi_levels", &RunConfig::quasi_levels);
        integer("periodic.quasi_samples", &RunConfig::quasi_samples);
        t["dissipativity.ic_amplitudes"] = [](RunConfig& c, const std::string& v) { c.ic_amplitudes = to_reals(v); };
        real("dissipativity.trace_constant", &RunConfig::trace_constant);
        t["convergence.grids"] = [](RunConfig& c, const std::string& v) {
            c.convergence_grids.clear();
            for (const auto& s : split_list(v)) c.convergence_grids.push_back(static_cast<int>(to_integer(s)));
        };
        real("convergence.time", &RunConfig::convergence_time);
        real("convergence.courant", &RunConfig::convergence_courant);
        return t;
    }();
    return table;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& origin) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto where = origin + ":" + std::to_string(line) + ": ";
        std::string s = raw;
        if (const auto hash = s.find_first_of("#;"); hash != std::string::npos) s.erase(hash);
        s = trim(s);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']' || s.size() < 3) throw ConfigError(where + "malformed section header '" + s + "'");
            section = trim(s.substr(1, s.size() - 2));
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value', got '" + s + "'");
        const auto key = trim(s.substr(0, eq));
        const auto value = trim(s.substr(eq + 1));
        if (key.empty() || value.empty()) throw ConfigError(where + "empty key or value");
        const auto full = section.empty() ? key : section + "." + key;
        const auto it = setters().find(full);
        if (it == setters().end()) throw ConfigError(where + "unknown key '" + full + "'");
        try {
            it->second(cfg, value);
        } catch (const ConfigError& e) {
            throw ConfigError(where + full + ": " + e.what());
        }
    }
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.string());
}

Profiles make_profiles(const RunConfig& cfg, const Grid& grid) { return default_profiles(cfg.profiles, grid); }

namespace {

ForcingMode make_mode(const Grid& grid, const ForcingModeParams& p) {
    SurfaceField shape = cos_pi_profile(grid, p.amplitude);
    for (int i = -1; i <= grid.ny + 1; ++i) shape.ghost_ref(i) += p.mean;
    return {std::move(shape), p.omega, p.phase};
}

}  // namespace

ForcingSpec make_forcing(const RunConfig& cfg, const Grid& grid) {
    std::vector<ForcingMode> modes;
    for (const auto& m : cfg.forcing_modes) modes.push_back(make_mode(grid, m));
    return ForcingSpec(grid, cfg.forcing_kind, std::move(modes));
}

ForcingSpec make_perturbed_forcing(const RunConfig& cfg, const Grid& grid, double s) {
    std::vector<ForcingMode> modes;
    for (const auto& m : cfg.forcing_modes) modes.push_back(make_mode(grid, m));
    modes.push_back(make_mode(grid, {0.0, s * cfg.perturbation_amplitude, 0.0, 0.0}));
    auto kind = cfg.forcing_kind;
    if (kind == ForcingKind::almost_periodic && modes.size() < 3) kind = ForcingKind::constant;
    return ForcingSpec(grid, kind, std::move(modes));
}

namespace {

// Uniform in [-1, 1] from the raw 64-bit stream, so that the sequence does
// not depend on the standard library's distribution implementation.
double symmetric_unit(std::mt19937_64& gen) {
    return 2.0 * static_cast<double>(gen() >> 11) * 0x1.0p-53 - 1.0;
}

void remove_mean(OceanField& f) {
    const double m = integrate(f);
    for (int i = 0; i <= f.grid().ny; ++i)
        for (int j = 0; j <= f.grid().nz; ++j) f.at(i, j) -= m;
}

}  // namespace

State make_initial_state(const InitialCondition& ic, const Grid& grid) {
    constexpr double pi = std::numbers::pi;
    const double A = ic.amplitude;
    State s = State::zeros(grid);
    switch (ic.preset) {
        case InitialPreset::zero:
            break;
        case InitialPreset::smooth:
            for (int i = 0; i <= grid.ny; ++i) {
                const double y = grid.y(i);
                s.theta.at(i) = 0.5 * A * std::cos(pi * y);
                for (int j = 0; j <= grid.nz; ++j) {
                    const double z = grid.z(j);
                    const double psi = 0.1 * A * std::sin(pi * y) * std::sin(pi * z);
                    s.psi.at(i, j) = psi;
                    s.q.at(i, j) = 2.0 * pi * pi * psi;
                    s.T.at(i, j) = 0.5 * A * std::cos(pi * y) * std::cos(pi * z);
                    s.S.at(i, j) = 0.3 * A * std::cos(pi * y) * std::cos(pi * z);
                }
            }
            break;
        case InitialPreset::random_smooth: {
            std::mt19937_64 gen(ic.seed);
            constexpr int K = 3;
            double th[K + 1], ps[K + 1][K + 1], tt[K + 1][K + 1], ss[K + 1][K + 1];
            for (int k = 0; k <= K; ++k) th[k] = symmetric_unit(gen) / (1.0 + k * k);
            for (int k = 0; k <= K; ++k)
                for (int l = 0; l <= K; ++l) {
                    const double w = 1.0 / (1.0 + k * k + l * l);
                    ps[k][l] = 0.1 * symmetric_unit(gen) * w;
                    tt[k][l] = symmetric_unit(gen) * w;
                    ss[k][l] = 0.5 * symmetric_unit(gen) * w;
                }
            for (int i = 0; i <= grid.ny; ++i) {
                const double y = grid.y(i);
                double v = 0.0;
                for (int k = 0; k <= K; ++k) v += th[k] * std::cos(k * pi * y);
                s.theta.at(i) = A * v;
                for (int j = 0; j <= grid.nz; ++j) {
                    const double z = grid.z(j);
                    double psi = 0.0, q = 0.0, T = 0.0, S = 0.0;
                    for (int k = 0; k <= K; ++k)
                        for (int l = 0; l <= K; ++l) {
                            const double sn = std::sin(k * pi * y) * std::sin(l * pi * z);
                            psi += ps[k][l] * sn;
                            q += ps[k][l] * (k * k + l * l) * pi * pi * sn;
                            const double cs = std::cos(k * pi * y) * std::cos(l * pi * z);
                            T += tt[k][l] * cs;
                            S += ss[k][l] * cs;
                        }
                    s.psi.at(i, j) = A * psi;
                    s.q.at(i, j) = A * q;
                    s.T.at(i, j) = A * T;
                    s.S.at(i, j) = A * S;
                }
            }
            break;
        }
        case InitialPreset::theta_decay:
            for (int i = 0; i <= grid.ny; ++i) s.theta.at(i) = A * std::cos(pi * grid.y(i));
            break;
        case InitialPreset::mms:
            s = TrigManufactured().sample(grid, 0.0);
            break;
    }
    if (ic.preset != InitialPreset::mms) remove_mean(s.S);
    fill_neumann_ghosts(s.theta);
    fill_dirichlet_ghosts(s.q);
    fill_dirichlet_ghosts(s.psi);
    fill_neumann_ghosts(s.T);
    fill_neumann_ghosts(s.S);
    return s;
}

}  // namespace caos
