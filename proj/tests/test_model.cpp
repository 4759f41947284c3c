#include <doctest.h>

#include <algorithm>

#include "caos/diagnostics.hpp"
#include "caos/errors.hpp"
#include "caos/model.hpp"
#include "helpers.hpp"

using namespace caos;
using testing::coscos;
using testing::pi;
using testing::sinsin;

namespace {

SurfaceField surface(const Grid& g, double (*f)(double)) {
    auto s = SurfaceField::from_function(g, f);
    fill_neumann_ghosts(s);
    return s;
}

double cos_pi(double y) { return std::cos(pi * y); }

double max_interior_error(const OceanField& a, const OceanField& b) {
    const Grid& g = a.grid();
    double e = 0.0;
    for (int i = 1; i < g.ny; ++i)
        for (int j = 1; j < g.nz; ++j) e = std::max(e, std::abs(a(i, j) - b(i, j)));
    return e;
}

/// State with psi solved from q and every ghost filled.
State prepared(State s, const Profiles& pr) {
    PoissonSolver solver(s.grid());
    s.psi = solve_poisson(s.q, solver);
    apply_boundary_conditions(s, pr);
    return s;
}

}  // namespace

TEST_CASE("boundary ghosts") {
    const Grid g = make_grid(16, 12);
    State s = State::zeros(g);
    Profiles pr = zero_profiles(g);

    SUBCASE("constant theta has flat ghosts") {
        s.theta.fill(0.7);
        apply_boundary_conditions(s, pr);
        CHECK(s.theta(-1) == 0.7);
        CHECK(s.theta(g.ny + 1) == 0.7);
    }
    SUBCASE("homogeneous Robin top mirrors the sub-surface row") {
        s.T = OceanField::from_function(g, BcTag::temperature, [](double y, double z) { return y * (1 - z); });
        for (int i = 0; i <= g.ny; ++i) s.T.at(i, g.nz) = 0.0;
        apply_boundary_conditions(s, pr);
        for (int i = 0; i <= g.ny; ++i) CHECK(s.T(i, g.nz + 1) == s.T(i, g.nz - 1));
    }
    SUBCASE("salt flux F = cos(pi y)") {
        pr.F = surface(g, cos_pi);
        apply_boundary_conditions(s, pr);
        for (int i = 0; i <= g.ny; ++i)
            CHECK(s.S(i, g.nz + 1) == doctest::Approx(2 * g.dz * std::cos(pi * g.y(i))).epsilon(1e-14));
    }
    SUBCASE("Robin ghost reproduces the discrete flux") {
        pr = default_profiles({0.5, 0.1, 0.2, 0.3, 0.4, 0.5}, g);
        s.theta = surface(g, [](double y) { return 0.3 + y * y; });
        s.T = OceanField::from_function(g, BcTag::temperature, [](double y, double z) { return std::sin(3 * y) * z; });
        apply_boundary_conditions(s, pr);
        for (int i = 0; i <= g.ny; ++i) {
            const double flux = (s.T(i, g.nz + 1) - s.T(i, g.nz - 1)) / (2 * g.dz);
            CHECK(std::abs(flux - (pr.S_o(i) + s.theta(i) - s.T(i, g.nz))) <= 1e-12);
        }
        for (int j = 0; j <= g.nz; ++j) {
            CHECK(s.T(-1, j) == s.T(1, j));
            CHECK(s.T(g.ny + 1, j) == s.T(g.ny - 1, j));
        }
        for (int i = 0; i <= g.ny; ++i) CHECK(s.T(i, -1) == s.T(i, 1));
    }
    SUBCASE("streamfunction and vorticity reflect oddly") {
        s.q = testing::random_smooth(g, true, 4);
        s.q.set_tag(BcTag::vorticity);
        apply_boundary_conditions(s, pr);
        for (int i = 0; i <= g.ny; ++i) CHECK(s.q(i, -1) == -s.q(i, 1));
    }
}

TEST_CASE("rhs_theta") {
    const Grid g = make_grid(16, 12);
    PhysParams p{1.0, 1.0, 0.0};
    Profiles pr = zero_profiles(g);
    State s = State::zeros(g);
    const SurfaceField f0(g);

    SUBCASE("S_a = a cancels the cooling") {
        p.a = 0.3;
        pr.S_a.fill(0.3);
        fill_neumann_ghosts(pr.S_a);
        apply_boundary_conditions(s, pr);
        CHECK(sup_norm(rhs_theta(s, p, pr, f0)) <= 1e-15);
    }
    SUBCASE("constant theta relaxes at unit rate") {
        s.theta.fill(0.4);
        apply_boundary_conditions(s, pr);
        const auto r = rhs_theta(s, p, pr, f0);
        for (int i = 0; i <= g.ny; ++i) CHECK(r(i) == doctest::Approx(-0.4).epsilon(1e-14));
    }
    SUBCASE("full ocean fraction with unit S_o") {
        pr.gamma.fill(1.0);
        pr.S_o.fill(1.0);
        fill_neumann_ghosts(pr.gamma);
        fill_neumann_ghosts(pr.S_o);
        apply_boundary_conditions(s, pr);
        const auto r = rhs_theta(s, p, pr, f0);
        for (int i = 0; i <= g.ny; ++i) CHECK(r(i) == doctest::Approx(-1.0).epsilon(1e-14));
    }
}

TEST_CASE("rhs_vorticity") {
    const Grid g = make_grid(32, 32);
    const PhysParams p{2.0, 3.0, 0.0};
    const Profiles pr = zero_profiles(g);

    State s = prepared(State::zeros(g), pr);
    CHECK(l2_norm(rhs_vorticity(s, p)) == 0.0);

    s.T = OceanField::from_function(g, BcTag::temperature, coscos);
    s.S = OceanField::from_function(g, BcTag::salinity, coscos);
    s = prepared(s, pr);
    CHECK(l2_norm(rhs_vorticity(s, p)) <= 1e-14);

    State e = State::zeros(g);
    e.q = OceanField::from_function(g, BcTag::vorticity, sinsin);
    e = prepared(e, pr);
    const OceanField r = rhs_vorticity(e, p);
    const OceanField expect = (-2 * pi * pi * p.Pr) * e.q;
    CHECK(max_interior_error(r, expect) <= 0.5 * std::pow(pi, 4) * g.dy * g.dy * p.Pr);
}

TEST_CASE("tracer right-hand sides") {
    for (int n : {16, 32}) {
        const Grid g = make_grid(n, n);
        const Profiles pr = zero_profiles(g);
        State s = State::zeros(g);
        s.q = testing::random_smooth(g, true, 9);
        s.q.set_tag(BcTag::vorticity);
        s.T.fill(2.5);
        s = prepared(s, pr);
        // Constant T with the homogeneous Robin top needs T_top = 0 to be
        // flux free, so only check the interior rows below the surface.
        const OceanField rt = rhs_temperature(s);
        for (int i = 1; i < g.ny; ++i)
            for (int j = 1; j < g.nz - 1; ++j) CHECK(std::abs(rt(i, j)) <= 1e-12);

        State d = State::zeros(g);
        d.S = OceanField::from_function(g, BcTag::salinity, sinsin);
        d = prepared(d, pr);
        const OceanField rs = rhs_salinity(d);
        CHECK(max_interior_error(rs, (-2 * pi * pi) * d.S) <= 0.25 * std::pow(pi, 4) * g.dy * g.dy);
    }

    // field = psi: only the Laplacian survives
    const Grid g = make_grid(24, 24);
    const Profiles pr = zero_profiles(g);
    State s = State::zeros(g);
    s.q = OceanField::from_function(g, BcTag::vorticity, sinsin);
    s = prepared(s, pr);
    State t = s;
    t.S = s.psi;
    t.S.set_tag(BcTag::salinity);
    apply_boundary_conditions(t, pr);
    const OceanField r = rhs_salinity(t);
    const OceanField lap = laplacian(advective_view(t.S));
    CHECK(max_interior_error(r, lap) <= 1e-12);
}

TEST_CASE("stable_dt") {
    const Grid g = make_grid(20, 10);
    StepConfig cfg;
    State s = prepared(State::zeros(g), zero_profiles(g));
    CHECK(stable_dt(s, cfg) == doctest::Approx(0.25 * std::min(g.dy, g.dz)));

    s.q = testing::random_smooth(g, true, 3);
    s.q.set_tag(BcTag::vorticity);
    s = prepared(s, zero_profiles(g));
    cfg.dt_max = 1e9;
    const double one = stable_dt(s, cfg);
    State twice = s;
    twice.q = 2.0 * s.q;
    twice = prepared(twice, zero_profiles(g));
    const double two = stable_dt(twice, cfg);
    CHECK(two >= 0.5 * one * (1 - 1e-12));
    CHECK(two <= one);

    // psi = z on the 100 x 100 grid: v = 1, w = 0.
    const Grid fine = make_grid(100, 100);
    State u = State::zeros(fine);
    u.psi = OceanField::from_function(fine, BcTag::streamfunction, [](double, double z) { return z; });
    for (int i = 0; i <= fine.ny; ++i) {
        u.psi.ghost_ref(i, -1) = -fine.dz;
        u.psi.ghost_ref(i, fine.nz + 1) = 1 + fine.dz;
    }
    for (int j = -1; j <= fine.nz + 1; ++j) {
        u.psi.ghost_ref(-1, j) = fine.z(j);
        u.psi.ghost_ref(fine.ny + 1, j) = fine.z(j);
    }
    u.psi.mark_ghosts_fresh();
    StepConfig c;
    c.cfl_safety = 0.4;
    c.dt_max = 1.0;
    CHECK(stable_dt(u, c) == doctest::Approx(0.004).epsilon(1e-12));
    c.dt_max = 0.001;
    CHECK(stable_dt(u, c) == doctest::Approx(0.001).epsilon(1e-12));
}

TEST_CASE("enforce_salinity_budget") {
    const Grid g = make_grid(16, 16);
    OceanField S = testing::random_smooth(g, false, 5);
    S.set_tag(BcTag::salinity);
    S = enforce_salinity_budget(S, 0.3);
    CHECK(integrate(S) == doctest::Approx(0.3).epsilon(1e-14));
    const OceanField z = enforce_salinity_budget(S, 0.0);
    CHECK(std::abs(integrate(z)) <= 1e-15);
    const OceanField same = enforce_salinity_budget(z, 0.0);
    CHECK(max_interior_error(same, z) <= 1e-16);
    CHECK(h1_seminorm(z) == doctest::Approx(h1_seminorm(S)).epsilon(1e-13));
    CHECK(z.ghosts_fresh());
}

namespace {

Integrator integrator(const Grid& g, PhysParams p, Profiles pr, double dt, bool projection = true,
                      ForcingSpec f = {}) {
    StepConfig cfg;
    cfg.dt = dt;
    cfg.salinity_projection = projection;
    if (f.modes().empty()) f = ForcingSpec::none(g);
    return Integrator(g, p, std::move(pr), std::move(f), cfg);
}

State smooth_state(const Grid& g, unsigned seed, double amp) {
    State s = State::zeros(g);
    s.theta = surface(g, [](double y) { return 0.2 * std::cos(pi * y) + 0.1 * std::cos(2 * pi * y); });
    s.theta *= amp;
    fill_neumann_ghosts(s.theta);
    s.q = amp * testing::random_smooth(g, true, seed);
    s.q.set_tag(BcTag::vorticity);
    s.T = amp * testing::random_smooth(g, false, seed + 1);
    s.T.set_tag(BcTag::temperature);
    s.S = amp * testing::random_smooth(g, false, seed + 2);
    s.S.set_tag(BcTag::salinity);
    return s;
}

}  // namespace

TEST_CASE("zero state is a fixed point") {
    const Grid g = make_grid(16, 16);
    auto it = integrator(g, {1, 10, 0}, zero_profiles(g), 0.01);
    State s = State::zeros(g);
    it.initialize(s);
    for (int k = 0; k < 5; ++k) it.step(s);
    for (const OceanField* f : {&s.q, &s.psi, &s.T, &s.S}) CHECK(l2_norm(*f) == 0.0);
    CHECK(sup_norm(s.theta) == 0.0);
    CHECK(s.t == doctest::Approx(0.05));
}

TEST_CASE("decoupled theta decay") {
    double prev = 0.0;
    for (int n : {16, 32, 64}) {
        const Grid g = make_grid(n, 8);
        const double dt = 0.1 / n;
        auto it = integrator(g, {1, 1, 0}, default_profiles({0, 0, 0, 0, 0, 0}, g), dt);
        State s = State::zeros(g);
        s.theta = surface(g, cos_pi);
        it.initialize(s);
        const int steps = static_cast<int>(std::lround(0.1 / dt));
        for (int k = 0; k < steps; ++k) it.step(s);
        double err = 0.0;
        for (int i = 0; i <= g.ny; ++i)
            err = std::max(err, std::abs(s.theta(i) - std::exp(-(pi * pi + 1) * s.t) * std::cos(pi * g.y(i))));
        CHECK(err <= 5e-3);
        if (prev > 0.0) CHECK(testing::order(prev, err) >= 1.8);
        prev = err;
    }
}

TEST_CASE("one step matches the analytic decay") {
    const Grid g = make_grid(64, 8);
    const double dt = 1e-3;
    auto it = integrator(g, {1, 1, 0}, zero_profiles(g), dt);
    State s = State::zeros(g);
    s.theta = surface(g, cos_pi);
    it.initialize(s);
    it.step(s);
    for (int i = 0; i <= g.ny; ++i)
        CHECK(std::abs(s.theta(i) - std::exp(-(pi * pi + 1) * dt) * std::cos(pi * g.y(i))) <= 1e-5);
}

TEST_CASE("salinity budget without projection") {
    const Grid g = make_grid(32, 32);
    auto pr = default_profiles({0.5, 0.0, 0.05, 0.0, 0.05, 0.05}, g);
    auto it = integrator(g, {1, 10, 0}, pr, 2e-3, false);
    State s = smooth_state(g, 11, 0.5);
    it.initialize(s);
    const double m0 = integrate(s.S);
    double drift = 0.0;
    for (int k = 0; k < 1000; ++k) {
        it.step(s);
        drift = std::max(drift, std::abs(integrate(s.S) - m0));
    }
    CHECK(drift <= 1e-10);
    CHECK(l2_norm(s.q) > 0.0);
}

TEST_CASE("salinity mean follows a net freshwater flux") {
    const Grid g = make_grid(24, 24);
    Profiles pr = zero_profiles(g);
    pr.F.fill(0.2);
    fill_neumann_ghosts(pr.F);
    pr.F_slopes = std::array<double, 2>{0.0, 0.0};
    for (bool projection : {false, true}) {
        auto it = integrator(g, {1, 10, 0}, pr, 5e-3, projection);
        State s = smooth_state(g, 21, 0.3);
        it.initialize(s);
        const double m0 = integrate(s.S), t0 = s.t;
        for (int k = 0; k < 200; ++k) it.step(s);
        const double rate = (integrate(s.S) - m0) / (s.t - t0);
        CHECK(std::abs(rate - 0.2) <= 1e-8);
    }
}

TEST_CASE("streamfunction stays consistent with vorticity") {
    const Grid g = make_grid(32, 32);
    auto it = integrator(g, {1, 10, 0}, default_profiles({0.5, 0, 0.05, 0, 0.05, 0.05}, g), 5e-3);
    State s = smooth_state(g, 31, 1.0);
    it.initialize(s);
    for (int k = 0; k < 20; ++k) {
        it.step(s);
        const double rel = poisson_residual(s.psi, s.q) / std::max(l2_norm(s.q), 1e-300);
        CHECK(rel <= 1e-9);
    }
}

TEST_CASE("divergence names the field and step") {
    const Grid g = make_grid(16, 16);
    auto it = integrator(g, {1, 10, 0}, zero_profiles(g), 0.01);
    State s = smooth_state(g, 1, 1.0);
    it.initialize(s);
    s.T.at(4, 4) = std::numeric_limits<double>::quiet_NaN();
    fill_neumann_ghosts(s.T);
    try {
        it.step(s);
        FAIL("expected DivergenceError");
    } catch (const DivergenceError& e) {
        CHECK((e.field() == "q" || e.field() == "T"));
        CHECK(e.step() == 1);
        CHECK(std::string(e.what()).find("step 1") != std::string::npos);
    }
}

TEST_CASE("mms residual") {
    const Grid g = make_grid(16, 16);
    const PhysParams p{1, 10, 0};
    const Profiles pr = zero_profiles(g);

    struct Zero final : ManufacturedSolution {
        Jet1 theta(double, double) const override { return {}; }
        Jet2 psi(double, double, double) const override { return {}; }
        Jet2 q(double, double, double) const override { return {}; }
        Jet2 T(double, double, double) const override { return {}; }
        Jet2 S(double, double, double) const override { return {}; }
    };
    auto zero = mms_residual(std::make_shared<Zero>(), p, pr, g)->sample(0.7);
    CHECK(sup_norm(zero.theta) == 0.0);
    for (const OceanField* f : {&zero.q, &zero.T, &zero.S}) CHECK(l2_norm(*f) == 0.0);

    struct SteadyT final : ManufacturedSolution {
        Jet1 theta(double, double) const override { return {}; }
        Jet2 psi(double, double, double) const override { return {}; }
        Jet2 q(double, double, double) const override { return {}; }
        Jet2 T(double y, double z, double) const override {
            const double c = std::cos(pi * y) * std::cos(pi * z);
            return {c, 0.0, -pi * std::sin(pi * y) * std::cos(pi * z), -pi * std::cos(pi * y) * std::sin(pi * z),
                    -2 * pi * pi * c};
        }
        Jet2 S(double, double, double) const override { return {}; }
    };
    const auto steady = mms_residual(std::make_shared<SteadyT>(), p, pr, g)->sample(0.0);
    for (int i = 0; i <= g.ny; ++i)
        for (int j = 0; j <= g.nz; ++j)
            CHECK(std::abs(steady.T(i, j) - 2 * pi * pi * coscos(g.y(i), g.z(j))) <= 1e-12);

    struct ThetaDecay final : ManufacturedSolution {
        Jet1 theta(double y, double t) const override {
            const double e = std::exp(-t), c = std::cos(pi * y);
            return {e * c, -e * c, -pi * e * std::sin(pi * y), -pi * pi * e * c};
        }
        Jet2 psi(double, double, double) const override { return {}; }
        Jet2 q(double, double, double) const override { return {}; }
        Jet2 T(double, double, double) const override { return {}; }
        Jet2 S(double, double, double) const override { return {}; }
    };
    // theta_t - theta_yy + theta = (-1 + pi^2 + 1) e^{-t} cos(pi y)
    const auto decay = mms_residual(std::make_shared<ThetaDecay>(), p, pr, g)->sample(0.5);
    for (int i = 0; i <= g.ny; ++i)
        CHECK(decay.theta(i) == doctest::Approx(pi * pi * std::exp(-0.5) * std::cos(pi * g.y(i))).epsilon(1e-12));
}

TEST_CASE("zero forcing dissipates every norm") {
    const Grid g = make_grid(24, 24);
    const PhysParams p{1, 10, 0};
    // theta is heated by the ocean for a while before everything decays.
    const auto norms = [](const EnergyReport& r) {
        return std::array{r.E, r.l2_theta, r.l2_q, r.l2_T, r.l2_S, r.h1_theta, r.h1_q, r.h1_T, r.h1_S, r.trace_T};
    };
    for (unsigned seed : {1u, 2u, 3u}) {
        auto it = integrator(g, p, default_profiles({0.5, 0, 0, 0, 0, 0}, g), 5e-3);
        State s = smooth_state(g, seed, 0.5);
        it.initialize(s);
        for (int k = 0; k < 300; ++k) it.step(s);
        auto prev = norms(energy_report(s, p));
        int increases = 0;
        for (int k = 0; k < 600; ++k) {
            it.step(s);
            const auto now = norms(energy_report(s, p));
            for (std::size_t m = 0; m < now.size(); ++m)
                if (now[m] > prev[m] * (1 + 1e-12) + 1e-14) ++increases;
            prev = now;
        }
        CHECK(increases == 0);
    }
}

TEST_CASE("stepping is deterministic") {
    const Grid g = make_grid(24, 24);
    auto run = [&] {
        auto it = integrator(g, {1, 10, 0}, default_profiles({0.5, 0, 0.05, 0, 0.05, 0.05}, g), 5e-3);
        State s = smooth_state(g, 7, 1.0);
        it.initialize(s);
        for (int k = 0; k < 50; ++k) it.step(s);
        return s;
    };
    const State a = run(), b = run();
    CHECK(std::ranges::equal(a.q.data(), b.q.data()));
    CHECK(std::ranges::equal(a.T.data(), b.T.data()));
    CHECK(std::ranges::equal(a.S.data(), b.S.data()));
    CHECK(std::ranges::equal(a.theta.data(), b.theta.data()));
}
