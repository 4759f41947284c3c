#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "caos/forcing.hpp"
#include "caos/grid.hpp"
#include "caos/operators.hpp"

namespace caos {

/// Full model state. psi is diagnostic: it is always recomputed from q.
/// zeros() has its (zero) ghosts marked fresh.
struct State {
    double t = 0.0;
    SurfaceField theta;  // atmospheric temperature on z = 1
    OceanField q;        // vorticity, q = -Lap(psi)
    OceanField psi;      // streamfunction; velocity (v, w) = (psi_z, -psi_y)
    OceanField T;        // ocean temperature
    OceanField S;        // salinity

    static State zeros(const Grid& grid);
    const Grid& grid() const { return q.grid(); }
};

struct PhysParams {
    double Pr = 1.0;  // Prandtl number
    double Ra = 1.0;  // Rayleigh number
    double a = 0.0;   // longwave radiative cooling coefficient

    /// Throws ConfigError unless Pr > 0, Ra > 0, a >= 0.
    void validate() const;
};

enum class DiffusionScheme { crank_nicolson, backward_euler };

struct StepConfig {
    double dt = 0.0;  // 0 selects stable_dt() of the initial state
    DiffusionScheme diffusion_scheme = DiffusionScheme::crank_nicolson;
    double cfl_safety = 0.4;
    double dt_max = 0.0;  // 0 selects 0.25 * min(dy, dz)
    bool salinity_projection = true;

    void validate() const;
};

/// Extra source terms and top-flux overrides sampled on the grid at time t.
/// T_flux and S_flux are added to the prescribed top fluxes S_o + theta - T
/// and F.
struct MmsFields {
    SurfaceField theta;
    OceanField q;
    OceanField T;
    OceanField S;
    SurfaceField T_flux;
    SurfaceField S_flux;
};

/// Source hooks for manufactured-solution runs; absent means the model is
/// exactly the physical system.
struct MmsSources {
    std::function<MmsFields(double t)> sample;
};

/// Fills ghost layers of every field:
///  theta: zero slope at y = 0, 1;
///  q, psi: odd reflection (zero boundary value);
///  T: T_z = S_o + theta - T on z = 1, zero normal slope elsewhere;
///  S: S_z = F on z = 1, zero normal slope elsewhere.
/// The top ghost rows are mirror + 2 dz * flux.
void apply_boundary_conditions(State& state, const Profiles& profiles,
                               const MmsFields* overrides = nullptr);

/// T and S with their top ghost rows replaced by the even mirror. The
/// advection term reads these so that the conservative Jacobian keeps the
/// discrete heat and salt budgets; the flux condition enters through the
/// diffusion operator only.
OceanField advective_view(const OceanField& field);

// Right-hand sides of the four evolution equations. Ghosts must be fresh.
SurfaceField rhs_theta(const State& state, const PhysParams& params, const Profiles& profiles,
                       const SurfaceField& f_now, const MmsFields* mms = nullptr);
OceanField rhs_vorticity(const State& state, const PhysParams& params, const MmsFields* mms = nullptr);
OceanField rhs_temperature(const State& state, const MmsFields* mms = nullptr);
OceanField rhs_salinity(const State& state, const MmsFields* mms = nullptr);

/// min(safety*dy/max|v|, safety*dz/max|w|, dt_max).
double stable_dt(const State& state, const StepConfig& cfg);

/// S shifted by a constant so that integrate(S) == target_mean (unit area).
/// Ghost values shift with the nodes, so freshness is preserved.
OceanField enforce_salinity_budget(const OceanField& S, double target_mean);

/// Advances the coupled state with implicit ADI diffusion (Crank-Nicolson by
/// default) and explicit second-order Adams-Bashforth for advection,
/// buoyancy, coupling and forcing. The first step bootstraps with explicit
/// Euler. A fixed dt is chosen at construction or by the first initialize().
///
/// Owns its Poisson solver and factorised sweeps: one integrator per
/// simulation.
class Integrator {
public:
    Integrator(const Grid& grid, PhysParams params, Profiles profiles, ForcingSpec forcing,
               StepConfig cfg, PoissonOptions poisson = {},
               std::shared_ptr<const MmsSources> mms = nullptr);
    ~Integrator();
    Integrator(Integrator&&) noexcept;
    Integrator& operator=(Integrator&&) noexcept;

    /// Recomputes psi from q, fills ghosts, fixes dt if still unset, records
    /// the salinity budget reference and clears the multistep history.
    void initialize(State& state);

    /// One step of size dt(). Throws DivergenceError on NaN/Inf.
    void step(State& state);

    double dt() const;
    long steps_taken() const;
    /// Steps at which dt exceeded the advective bound of the current state.
    long cfl_violations() const;

    const PhysParams& params() const;
    const Profiles& profiles() const;
    const ForcingSpec& forcing() const;
    const StepConfig& config() const;
    PoissonSolver& poisson();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// ------------------------------------------------------------ manufactured

/// Value, time derivative, gradient and Laplacian of a scalar at a point.
struct Jet2 {
    double v = 0.0, t = 0.0, y = 0.0, z = 0.0, lap = 0.0;
};
/// Value, time derivative, slope and curvature of a surface scalar.
struct Jet1 {
    double v = 0.0, t = 0.0, y = 0.0, yy = 0.0;
};

/// A smooth exact solution supplied with its analytic derivatives. It must
/// satisfy psi = q = 0 on the boundary, q = -Lap(psi), zero normal slopes of
/// theta, T and S except at z = 1.
class ManufacturedSolution {
public:
    virtual ~ManufacturedSolution() = default;
    virtual Jet1 theta(double y, double t) const = 0;
    virtual Jet2 psi(double y, double z, double t) const = 0;
    virtual Jet2 q(double y, double z, double t) const = 0;
    virtual Jet2 T(double y, double z, double t) const = 0;
    virtual Jet2 S(double y, double z, double t) const = 0;

    /// Samples the exact state on the nodes; ghosts are filled by the
    /// homogeneous reflections, so only nodal values are exact.
    State sample(const Grid& grid, double t) const;
};

/// Sources s = (time derivative + advection - diffusion - coupling) of the
/// exact solution, plus top-flux overrides, so that it solves the forced
/// system exactly. Assumes the atmospheric forcing f is zero.
std::shared_ptr<const MmsSources> mms_residual(std::shared_ptr<const ManufacturedSolution> exact,
                                               const PhysParams& params, const Profiles& profiles,
                                               const Grid& grid);

/// Built-in trigonometric manufactured solution exercising every coupling:
/// nonzero Jacobians, buoyancy, Robin and flux tops.
class TrigManufactured final : public ManufacturedSolution {
public:
    Jet1 theta(double y, double t) const override;
    Jet2 psi(double y, double z, double t) const override;
    Jet2 q(double y, double z, double t) const override;
    Jet2 T(double y, double z, double t) const override;
    Jet2 S(double y, double z, double t) const override;
};

}  // namespace caos
