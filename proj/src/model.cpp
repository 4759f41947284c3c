#include "caos/model.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <numbers>
#include <string>

#include "caos/errors.hpp"

namespace caos {

State State::zeros(const Grid& grid) {
    State s;
    s.theta = SurfaceField(grid);
    s.q = OceanField(grid, BcTag::vorticity);
    s.psi = OceanField(grid, BcTag::streamfunction);
    s.T = OceanField(grid, BcTag::temperature);
    s.S = OceanField(grid, BcTag::salinity);
    // zero ghosts satisfy every homogeneous reflection
    s.theta.mark_ghosts_fresh();
    for (OceanField* f : {&s.q, &s.psi, &s.T, &s.S}) f->mark_ghosts_fresh();
    return s;
}

void PhysParams::validate() const {
    if (!(Pr > 0.0)) throw ConfigError("Pr must be positive");
    if (!(Ra > 0.0)) throw ConfigError("Ra must be positive");
    if (!(a >= 0.0)) throw ConfigError("a must be non-negative");
}

void StepConfig::validate() const {
    if (!(dt >= 0.0)) throw ConfigError("dt must be positive (or 0 for automatic)");
    if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) throw ConfigError("cfl_safety must lie in (0, 1]");
    if (!(dt_max >= 0.0)) throw ConfigError("dt_max must be non-negative");
}

// --------------------------------------------------------- boundary fill

void apply_boundary_conditions(State& state, const Profiles& profiles, const MmsFields* overrides) {
    const Grid& g = state.grid();
    const int ny = g.ny;
    const int nz = g.nz;

    fill_neumann_ghosts(state.theta);
    fill_dirichlet_ghosts(state.q);
    fill_dirichlet_ghosts(state.psi);

    auto fill_flux_top = [&](OceanField& f, auto&& flux) {
        for (int i = 0; i <= ny; ++i) {
            f.ghost_ref(i, -1) = f(i, 1);
            f.ghost_ref(i, nz + 1) = f(i, nz - 1) + 2.0 * g.dz * flux(i);
        }
        for (int j = -1; j <= nz + 1; ++j) {
            f.ghost_ref(-1, j) = f(1, j);
            f.ghost_ref(ny + 1, j) = f(ny - 1, j);
        }
        f.mark_ghosts_fresh();
    };

    const OceanField& T = state.T;
    fill_flux_top(state.T, [&](int i) {
        double flux = profiles.S_o(i) + state.theta(i) - T(i, nz);
        if (overrides) flux += overrides->T_flux(i);
        return flux;
    });
    fill_flux_top(state.S, [&](int i) {
        double flux = profiles.F(i);
        if (overrides) flux += overrides->S_flux(i);
        return flux;
    });
}

OceanField advective_view(const OceanField& field) {
    field.require_fresh("advective_view");
    OceanField out = field;
    const Grid& g = field.grid();
    for (int i = -1; i <= g.ny + 1; ++i) out.ghost_ref(i, g.nz + 1) = field(i, g.nz - 1);
    return out;
}

// ---------------------------------------------------------- explicit parts

namespace {

SurfaceField explicit_theta(const State& s, const PhysParams& p, const Profiles& pr,
                            const SurfaceField& f_now, const MmsFields* mms) {
    const Grid& g = s.grid();
    SurfaceField out(g);
    for (int i = 0; i <= g.ny; ++i) {
        const double th = s.theta(i);
        const double trace = s.T(i, g.nz);
        double v = -(p.a + th) + pr.S_a(i) - pr.gamma(i) * (pr.S_o(i) + th - trace) + f_now(i);
        if (mms) v += mms->theta(i);
        out.ghost_ref(i) = v;
    }
    return out;
}

OceanField explicit_vorticity(const State& s, const PhysParams& p, const MmsFields* mms) {
    const Grid& g = s.grid();
    OceanField out = arakawa_jacobian(s.q, s.psi);
    const double buoy = p.Pr * p.Ra * 0.5 / g.dy;
    for (int i = 0; i <= g.ny; ++i) {
        for (int j = 0; j <= g.nz; ++j) {
            if (i == 0 || i == g.ny || j == 0 || j == g.nz) {
                out.ghost_ref(i, j) = 0.0;
                continue;
            }
            const double ty = s.T(i + 1, j) - s.T(i - 1, j);
            const double sy = s.S(i + 1, j) - s.S(i - 1, j);
            double v = -out(i, j) + buoy * (ty - sy);
            if (mms) v += mms->q(i, j);
            out.ghost_ref(i, j) = v;
        }
    }
    return out;
}

// Advection plus the inhomogeneous part of the top flux (2/dz * data) and
// sources. The -2/dz * T part of the Robin condition belongs to the implicit
// operator.
OceanField explicit_tracer(const OceanField& field, const State& s, const SurfaceField& top_data,
                           const OceanField* source) {
    const Grid& g = s.grid();
    OceanField out = arakawa_jacobian(advective_view(field), s.psi);
    out *= -1.0;
    const double r = 2.0 / g.dz;
    for (int i = 0; i <= g.ny; ++i) out.ghost_ref(i, g.nz) += r * top_data(i);
    if (source) out += *source;
    out.mark_ghosts_stale();
    return out;
}

SurfaceField temperature_top_data(const State& s, const Profiles& pr, const MmsFields* mms) {
    const Grid& g = s.grid();
    SurfaceField d(g);
    for (int i = 0; i <= g.ny; ++i) {
        double v = pr.S_o(i) + s.theta(i);
        if (mms) v += mms->T_flux(i);
        d.ghost_ref(i) = v;
    }
    return d;
}

SurfaceField salinity_top_data(const State& s, const Profiles& pr, const MmsFields* mms) {
    const Grid& g = s.grid();
    SurfaceField d(g);
    for (int i = 0; i <= g.ny; ++i) {
        double v = pr.F(i);
        if (mms) v += mms->S_flux(i);
        d.ghost_ref(i) = v;
    }
    return d;
}

}  // namespace

SurfaceField rhs_theta(const State& state, const PhysParams& params, const Profiles& profiles,
                       const SurfaceField& f_now, const MmsFields* mms) {
    SurfaceField out = second_derivative(state.theta);
    out += explicit_theta(state, params, profiles, f_now, mms);
    return out;
}

OceanField rhs_vorticity(const State& state, const PhysParams& params, const MmsFields* mms) {
    state.T.require_fresh("rhs_vorticity");
    state.S.require_fresh("rhs_vorticity");
    OceanField out = laplacian(state.q);
    out *= params.Pr;
    const OceanField ex = explicit_vorticity(state, params, mms);
    const Grid& g = state.grid();
    for (int i = 0; i <= g.ny; ++i)
        for (int j = 0; j <= g.nz; ++j) {
            const bool boundary = i == 0 || i == g.ny || j == 0 || j == g.nz;
            out.ghost_ref(i, j) = boundary ? 0.0 : out(i, j) + ex(i, j);
        }
    return out;
}

OceanField rhs_temperature(const State& state, const MmsFields* mms) {
    // The Robin ghost already carries the flux; only advection and sources
    // are added to the Laplacian.
    OceanField out = laplacian(state.T);
    OceanField adv = arakawa_jacobian(advective_view(state.T), state.psi);
    out -= adv;
    if (mms) out += mms->T;
    out.mark_ghosts_stale();
    return out;
}

OceanField rhs_salinity(const State& state, const MmsFields* mms) {
    OceanField out = laplacian(state.S);
    OceanField adv = arakawa_jacobian(advective_view(state.S), state.psi);
    out -= adv;
    if (mms) out += mms->S;
    out.mark_ghosts_stale();
    return out;
}

double stable_dt(const State& state, const StepConfig& cfg) {
    const Grid& g = state.grid();
    const double cap = cfg.dt_max > 0.0 ? cfg.dt_max : 0.25 * std::min(g.dy, g.dz);
    const OceanField v = ddz(state.psi);
    const OceanField w = ddy(state.psi);
    double vmax = 0.0;
    double wmax = 0.0;
    for (int i = 0; i <= g.ny; ++i)
        for (int j = 0; j <= g.nz; ++j) {
            vmax = std::max(vmax, std::abs(v(i, j)));
            wmax = std::max(wmax, std::abs(w(i, j)));
        }
    double dt = cap;
    if (vmax > 0.0) dt = std::min(dt, cfg.cfl_safety * g.dy / vmax);
    if (wmax > 0.0) dt = std::min(dt, cfg.cfl_safety * g.dz / wmax);
    return dt;
}

OceanField enforce_salinity_budget(const OceanField& S, double target_mean) {
    OceanField out = S;
    const bool fresh = S.ghosts_fresh();
    const double shift = target_mean - integrate(S);
    for (double& v : out.data()) v += shift;
    if (fresh) out.mark_ghosts_fresh();
    return out;
}

// ---------------------------------------------------------------- stepping

namespace {

// 1-D second-difference operator on nodes 0..n-1 of spacing h, with either
// zero-value ends or reflected (zero-slope) ends, plus an optional
// -robin * u term on the last node.
struct AxisOperator {
    int n = 0;
    double h = 1.0;
    bool dirichlet = false;
    double robin = 0.0;

    void apply(std::span<const double> u, std::span<double> out) const {
        const double r = 1.0 / (h * h);
        if (dirichlet) {
            out[0] = 0.0;
            out[n - 1] = 0.0;
        } else {
            out[0] = 2.0 * (u[1] - u[0]) * r;
            out[n - 1] = 2.0 * (u[n - 2] - u[n - 1]) * r - robin * u[n - 1];
        }
        for (int k = 1; k < n - 1; ++k) out[k] = (u[k + 1] - 2.0 * u[k] + u[k - 1]) * r;
    }
};

// (I - c L) factorised over the unknowns of the axis operator.
class LineSolver {
public:
    LineSolver() = default;
    LineSolver(const AxisOperator& op, double c) : op_(op) {
        const double r = c / (op.h * op.h);
        const int m = op.dirichlet ? op.n - 2 : op.n;
        std::vector<double> lo(m, -r), di(m, 1.0 + 2.0 * r), up(m, -r);
        if (!op.dirichlet) {
            up[0] = -2.0 * r;
            lo[m - 1] = -2.0 * r;
            di[m - 1] += c * op.robin;
        }
        factor_ = TridiagonalFactor(lo, di, up);
    }

    void solve(std::span<double> line) const {
        if (op_.dirichlet)
            factor_.solve(line.subspan(1, line.size() - 2));
        else
            factor_.solve(line);
    }

private:
    AxisOperator op_;
    TridiagonalFactor factor_;
};

struct Diffuser2D {
    AxisOperator ly, lz;
    LineSolver sy, sz;
    double c_explicit = 0.0;  // 0 for backward Euler
};

Diffuser2D make_diffuser(const Grid& g, bool dirichlet, double robin_top, double kappa, double dt,
                         DiffusionScheme scheme) {
    Diffuser2D d;
    d.ly = AxisOperator{g.ny + 1, g.dy, dirichlet, 0.0};
    d.lz = AxisOperator{g.nz + 1, g.dz, dirichlet, robin_top};
    const double c = scheme == DiffusionScheme::crank_nicolson ? 0.5 * dt * kappa : dt * kappa;
    d.sy = LineSolver(d.ly, c);
    d.sz = LineSolver(d.lz, c);
    d.c_explicit = scheme == DiffusionScheme::crank_nicolson ? c : 0.0;
    return d;
}

// Nodal values (ny+1)*(nz+1), y-major, z contiguous.
void gather(const OceanField& f, std::vector<double>& u) {
    const Grid& g = f.grid();
    const int nzn = g.nz + 1;
    u.resize(static_cast<std::size_t>(g.ny + 1) * nzn);
    for (int i = 0; i <= g.ny; ++i)
        for (int j = 0; j <= g.nz; ++j) u[static_cast<std::size_t>(i) * nzn + j] = f(i, j);
}

void scatter(const std::vector<double>& u, OceanField& f) {
    const Grid& g = f.grid();
    const int nzn = g.nz + 1;
    for (int i = 0; i <= g.ny; ++i)
        for (int j = 0; j <= g.nz; ++j) f.at(i, j) = u[static_cast<std::size_t>(i) * nzn + j];
}

// u <- (I - cLy)^-1 (I - cLz)^-1 [(I + cLy)(I + cLz) u + dt e]
void adi_advance(const Diffuser2D& d, std::vector<double>& u, const std::vector<double>& e, double dt,
                 std::vector<double>& line, std::vector<double>& tmp) {
    const int ny1 = d.ly.n;
    const int nz1 = d.lz.n;
    if (d.c_explicit > 0.0) {
        tmp.resize(static_cast<std::size_t>(std::max(ny1, nz1)));
        for (int i = 0; i < ny1; ++i) {
            std::span<double> row(u.data() + static_cast<std::size_t>(i) * nz1, nz1);
            d.lz.apply(row, std::span<double>(tmp.data(), nz1));
            for (int j = 0; j < nz1; ++j) row[j] += d.c_explicit * tmp[j];
        }
        line.resize(ny1);
        for (int j = 0; j < nz1; ++j) {
            for (int i = 0; i < ny1; ++i) line[i] = u[static_cast<std::size_t>(i) * nz1 + j];
            d.ly.apply(line, std::span<double>(tmp.data(), ny1));
            for (int i = 0; i < ny1; ++i) u[static_cast<std::size_t>(i) * nz1 + j] += d.c_explicit * tmp[i];
        }
    }
    for (std::size_t k = 0; k < u.size(); ++k) u[k] += dt * e[k];

    line.resize(ny1);
    for (int j = 0; j < nz1; ++j) {
        for (int i = 0; i < ny1; ++i) line[i] = u[static_cast<std::size_t>(i) * nz1 + j];
        d.sy.solve(line);
        for (int i = 0; i < ny1; ++i) u[static_cast<std::size_t>(i) * nz1 + j] = line[i];
    }
    for (int i = 0; i < ny1; ++i) d.sz.solve(std::span<double>(u.data() + static_cast<std::size_t>(i) * nz1, nz1));
}

bool all_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace

struct Integrator::Impl {
    Grid grid;
    PhysParams params;
    Profiles profiles;
    ForcingSpec forcing;
    StepConfig cfg;
    PoissonSolver poisson;
    std::shared_ptr<const MmsSources> mms;

    double dt = 0.0;
    bool built = false;
    AxisOperator theta_op;
    LineSolver theta_solver;
    double theta_c_explicit = 0.0;
    Diffuser2D dq, dT, dS;

    bool have_history = false;
    std::vector<double> prev_theta, prev_q, prev_T, prev_S;
    long steps = 0;
    long cfl_violations = 0;

    double salinity_mean0 = 0.0;
    double salinity_t0 = 0.0;
    double flux_mean = 0.0;

    std::vector<double> u, e, line, tmp;

    Impl(const Grid& g, PhysParams p, Profiles pr, ForcingSpec f, StepConfig c, PoissonOptions po,
         std::shared_ptr<const MmsSources> m)
        : grid(g),
          params(p),
          profiles(std::move(pr)),
          forcing(std::move(f)),
          cfg(c),
          poisson(g, po),
          mms(std::move(m)) {
        params.validate();
        cfg.validate();
        for (const SurfaceField* s : {&profiles.gamma, &profiles.S_a, &profiles.S_o, &profiles.F})
            if (!(s->grid() == g)) throw ConfigError("profiles sampled on a different grid");
        flux_mean = integrate(profiles.F);
        if (cfg.dt > 0.0) build(cfg.dt);
    }

    void build(double step) {
        dt = step;
        const double c = cfg.diffusion_scheme == DiffusionScheme::crank_nicolson ? 0.5 * dt : dt;
        theta_op = AxisOperator{grid.ny + 1, grid.dy, false, 0.0};
        theta_solver = LineSolver(theta_op, c);
        theta_c_explicit = cfg.diffusion_scheme == DiffusionScheme::crank_nicolson ? c : 0.0;
        dq = make_diffuser(grid, true, 0.0, params.Pr, dt, cfg.diffusion_scheme);
        dT = make_diffuser(grid, false, 2.0 / grid.dz, 1.0, dt, cfg.diffusion_scheme);
        dS = make_diffuser(grid, false, 0.0, 1.0, dt, cfg.diffusion_scheme);
        built = true;
    }

    std::optional<MmsFields> sample_mms(double t) const {
        if (!mms) return std::nullopt;
        return mms->sample(t);
    }

    void refresh(State& s, const MmsFields* m) {
        poisson.solve(s.q, s.psi);
        apply_boundary_conditions(s, profiles, m);
    }
};

Integrator::Integrator(const Grid& grid, PhysParams params, Profiles profiles, ForcingSpec forcing,
                       StepConfig cfg, PoissonOptions poisson, std::shared_ptr<const MmsSources> mms)
    : impl_(std::make_unique<Impl>(grid, params, std::move(profiles), std::move(forcing), cfg, poisson,
                                   std::move(mms))) {}
Integrator::~Integrator() = default;
Integrator::Integrator(Integrator&&) noexcept = default;
Integrator& Integrator::operator=(Integrator&&) noexcept = default;

void Integrator::initialize(State& state) {
    Impl& m = *impl_;
    if (!(state.grid() == m.grid)) throw ConfigError("state grid does not match the integrator grid");
    // Dirichlet boundary values of q are part of the model, not of the data.
    for (int i = 0; i <= m.grid.ny; ++i) {
        state.q.at(i, 0) = 0.0;
        state.q.at(i, m.grid.nz) = 0.0;
    }
    for (int j = 0; j <= m.grid.nz; ++j) {
        state.q.at(0, j) = 0.0;
        state.q.at(m.grid.ny, j) = 0.0;
    }
    const auto mf = m.sample_mms(state.t);
    m.refresh(state, mf ? &*mf : nullptr);
    if (!m.built) m.build(stable_dt(state, m.cfg));
    m.have_history = false;
    m.salinity_mean0 = integrate(state.S);
    m.salinity_t0 = state.t;
}

void Integrator::step(State& state) {
    Impl& m = *impl_;
    if (!m.built) initialize(state);
    const Grid& g = m.grid;
    const double dt = m.dt;
    const auto mf = m.sample_mms(state.t);
    const MmsFields* mp = mf ? &*mf : nullptr;

    if (!state.T.ghosts_fresh() || !state.q.ghosts_fresh() || !state.theta.ghosts_fresh() ||
        !state.S.ghosts_fresh() || !state.psi.ghosts_fresh())
        m.refresh(state, mp);

    if (dt > stable_dt(state, m.cfg) * (1.0 + 1e-12)) ++m.cfl_violations;

    // Explicit tendencies at t_n.
    const SurfaceField f_now = eval_forcing(m.forcing, state.t);
    const SurfaceField e_theta = explicit_theta(state, m.params, m.profiles, f_now, mp);
    const OceanField e_q = explicit_vorticity(state, m.params, mp);
    const OceanField e_T = explicit_tracer(state.T, state, temperature_top_data(state, m.profiles, mp), mp ? &mp->T : nullptr);
    const OceanField e_S = explicit_tracer(state.S, state, salinity_top_data(state, m.profiles, mp), mp ? &mp->S : nullptr);

    std::vector<double> cur_theta(static_cast<std::size_t>(g.ny + 1));
    for (int i = 0; i <= g.ny; ++i) cur_theta[i] = e_theta(i);
    std::vector<double> cur_q, cur_T, cur_S;
    gather(e_q, cur_q);
    gather(e_T, cur_T);
    gather(e_S, cur_S);

    // Adams-Bashforth extrapolation to t_{n+1/2}; explicit Euler on the first step.
    auto extrapolate = [&](const std::vector<double>& cur, const std::vector<double>& prev) {
        std::vector<double> out(cur.size());
        if (m.have_history)
            for (std::size_t k = 0; k < cur.size(); ++k) out[k] = 1.5 * cur[k] - 0.5 * prev[k];
        else
            out = cur;
        return out;
    };
    const auto x_theta = extrapolate(cur_theta, m.prev_theta);
    const auto x_q = extrapolate(cur_q, m.prev_q);
    const auto x_T = extrapolate(cur_T, m.prev_T);
    const auto x_S = extrapolate(cur_S, m.prev_S);

    // theta: 1-D implicit diffusion.
    {
        std::vector<double> th(static_cast<std::size_t>(g.ny + 1)), lth(th.size());
        for (int i = 0; i <= g.ny; ++i) th[i] = state.theta(i);
        if (m.theta_c_explicit > 0.0) {
            m.theta_op.apply(th, lth);
            for (std::size_t k = 0; k < th.size(); ++k) th[k] += m.theta_c_explicit * lth[k];
        }
        for (std::size_t k = 0; k < th.size(); ++k) th[k] += dt * x_theta[k];
        m.theta_solver.solve(th);
        for (int i = 0; i <= g.ny; ++i) state.theta.at(i) = th[i];
    }

    gather(state.q, m.u);
    adi_advance(m.dq, m.u, x_q, dt, m.line, m.tmp);
    scatter(m.u, state.q);

    gather(state.T, m.u);
    adi_advance(m.dT, m.u, x_T, dt, m.line, m.tmp);
    scatter(m.u, state.T);

    gather(state.S, m.u);
    adi_advance(m.dS, m.u, x_S, dt, m.line, m.tmp);
    scatter(m.u, state.S);

    m.prev_theta = std::move(cur_theta);
    m.prev_q = std::move(cur_q);
    m.prev_T = std::move(cur_T);
    m.prev_S = std::move(cur_S);
    m.have_history = true;

    state.t += dt;
    ++m.steps;

    if (m.cfg.salinity_projection) {
        const double target = m.salinity_mean0 + (state.t - m.salinity_t0) * m.flux_mean;
        const double shift = target - integrate(state.S);
        for (int i = 0; i <= g.ny; ++i)
            for (int j = 0; j <= g.nz; ++j) state.S.at(i, j) += shift;
    }

    const auto mf_next = m.sample_mms(state.t);
    m.refresh(state, mf_next ? &*mf_next : nullptr);

    if (!all_finite(std::as_const(state.theta).data())) throw DivergenceError("theta", m.steps);
    if (!all_finite(std::as_const(state.q).data())) throw DivergenceError("q", m.steps);
    if (!all_finite(std::as_const(state.psi).data())) throw DivergenceError("psi", m.steps);
    if (!all_finite(std::as_const(state.T).data())) throw DivergenceError("T", m.steps);
    if (!all_finite(std::as_const(state.S).data())) throw DivergenceError("S", m.steps);
}

double Integrator::dt() const { return impl_->dt; }
long Integrator::steps_taken() const { return impl_->steps; }
long Integrator::cfl_violations() const { return impl_->cfl_violations; }
const PhysParams& Integrator::params() const { return impl_->params; }
const Profiles& Integrator::profiles() const { return impl_->profiles; }
const ForcingSpec& Integrator::forcing() const { return impl_->forcing; }
const StepConfig& Integrator::config() const { return impl_->cfg; }
PoissonSolver& Integrator::poisson() { return impl_->poisson; }

// ------------------------------------------------------------ manufactured

State ManufacturedSolution::sample(const Grid& grid, double t) const {
    State s = State::zeros(grid);
    s.t = t;
    for (int i = 0; i <= grid.ny; ++i) {
        const double y = grid.y(i);
        s.theta.at(i) = theta(y, t).v;
        for (int j = 0; j <= grid.nz; ++j) {
            const double z = grid.z(j);
            s.q.at(i, j) = q(y, z, t).v;
            s.psi.at(i, j) = psi(y, z, t).v;
            s.T.at(i, j) = T(y, z, t).v;
            s.S.at(i, j) = S(y, z, t).v;
        }
    }
    fill_neumann_ghosts(s.theta);
    fill_dirichlet_ghosts(s.q);
    fill_dirichlet_ghosts(s.psi);
    fill_neumann_ghosts(s.T);
    fill_neumann_ghosts(s.S);
    return s;
}

std::shared_ptr<const MmsSources> mms_residual(std::shared_ptr<const ManufacturedSolution> exact,
                                               const PhysParams& params, const Profiles& profiles,
                                               const Grid& grid) {
    auto src = std::make_shared<MmsSources>();
    src->sample = [exact, params, profiles, grid](double t) {
        MmsFields m;
        m.theta = SurfaceField(grid);
        m.T_flux = SurfaceField(grid);
        m.S_flux = SurfaceField(grid);
        m.q = OceanField(grid, BcTag::vorticity);
        m.T = OceanField(grid, BcTag::temperature);
        m.S = OceanField(grid, BcTag::salinity);
        const double top = 1.0;
        for (int i = 0; i <= grid.ny; ++i) {
            const double y = grid.y(i);
            const Jet1 th = exact->theta(y, t);
            const Jet2 t_top = exact->T(y, top, t);
            const Jet2 s_top = exact->S(y, top, t);
            m.theta.ghost_ref(i) = th.t - th.yy + (params.a + th.v) - profiles.S_a(i) +
                                   profiles.gamma(i) * (profiles.S_o(i) + th.v - t_top.v);
            m.T_flux.ghost_ref(i) = t_top.z - (profiles.S_o(i) + th.v - t_top.v);
            m.S_flux.ghost_ref(i) = s_top.z - profiles.F(i);
            for (int j = 0; j <= grid.nz; ++j) {
                const double z = grid.z(j);
                const Jet2 ps = exact->psi(y, z, t);
                const Jet2 qq = exact->q(y, z, t);
                const Jet2 tt = exact->T(y, z, t);
                const Jet2 ss = exact->S(y, z, t);
                auto jac = [&](const Jet2& f) { return f.y * ps.z - f.z * ps.y; };
                m.q.ghost_ref(i, j) = qq.t + jac(qq) - params.Pr * qq.lap - params.Pr * params.Ra * (tt.y - ss.y);
                m.T.ghost_ref(i, j) = tt.t + jac(tt) - tt.lap;
                m.S.ghost_ref(i, j) = ss.t + jac(ss) - ss.lap;
            }
        }
        fill_neumann_ghosts(m.theta);
        fill_neumann_ghosts(m.T_flux);
        fill_neumann_ghosts(m.S_flux);
        return m;
    };
    return src;
}

namespace {

constexpr double kPi = std::numbers::pi;

// c * sin(k pi y) sin(l pi z) with c' its time derivative.
Jet2 sine_mode(double c, double ct, int k, int l, double y, double z) {
    const double sy = std::sin(k * kPi * y), cy = std::cos(k * kPi * y);
    const double sz = std::sin(l * kPi * z), cz = std::cos(l * kPi * z);
    const double lam = (k * k + l * l) * kPi * kPi;
    return {c * sy * sz, ct * sy * sz, c * k * kPi * cy * sz, c * l * kPi * sy * cz, -lam * c * sy * sz};
}

Jet2 operator+(Jet2 a, const Jet2& b) {
    a.v += b.v;
    a.t += b.t;
    a.y += b.y;
    a.z += b.z;
    a.lap += b.lap;
    return a;
}

// c * cos(k pi y) cos(pi z / 2)
Jet2 cos_half_mode(double c, double ct, int k, double y, double z) {
    const double cy = std::cos(k * kPi * y), sy = std::sin(k * kPi * y);
    const double cz = std::cos(0.5 * kPi * z), sz = std::sin(0.5 * kPi * z);
    const double lam = (k * k + 0.25) * kPi * kPi;
    return {c * cy * cz, ct * cy * cz, -c * k * kPi * sy * cz, -0.5 * c * kPi * cy * sz, -lam * c * cy * cz};
}

}  // namespace

Jet1 TrigManufactured::theta(double y, double t) const {
    const double c = 0.5 + 0.25 * std::sin(t);
    const double ct = 0.25 * std::cos(t);
    const double cy = std::cos(kPi * y);
    return {c * cy + 0.1, ct * cy, -kPi * c * std::sin(kPi * y), -kPi * kPi * c * cy};
}

Jet2 TrigManufactured::psi(double y, double z, double t) const {
    const double a1 = 0.2 * (1.0 + 0.5 * std::sin(t)), a1t = 0.1 * std::cos(t);
    const double a2 = 0.1 * std::cos(t), a2t = -0.1 * std::sin(t);
    return sine_mode(a1, a1t, 1, 1, y, z) + sine_mode(a2, a2t, 2, 1, y, z);
}

Jet2 TrigManufactured::q(double y, double z, double t) const {
    const double a1 = 0.2 * (1.0 + 0.5 * std::sin(t)), a1t = 0.1 * std::cos(t);
    const double a2 = 0.1 * std::cos(t), a2t = -0.1 * std::sin(t);
    const double l1 = 2.0 * kPi * kPi, l2 = 5.0 * kPi * kPi;
    return sine_mode(l1 * a1, l1 * a1t, 1, 1, y, z) + sine_mode(l2 * a2, l2 * a2t, 2, 1, y, z);
}

Jet2 TrigManufactured::T(double y, double z, double t) const {
    const double b = 0.5 * (1.0 + 0.3 * std::sin(t)), bt = 0.15 * std::cos(t);
    // + 0.2 z^2: slope 0.4 z, Laplacian 0.4
    return cos_half_mode(b, bt, 1, y, z) + Jet2{0.2 * z * z, 0.0, 0.0, 0.4 * z, 0.4};
}

Jet2 TrigManufactured::S(double y, double z, double t) const {
    const double d = 0.3 * (1.0 + 0.5 * std::sin(t)), dt = 0.15 * std::cos(t);
    return cos_half_mode(d, dt, 2, y, z);
}

}  // namespace caos
