#include <doctest.h>

#include "caos/errors.hpp"
#include "caos/experiments.hpp"
#include "caos/io.hpp"
#include "caos/simulation.hpp"
#include "helpers.hpp"

using namespace caos;
using testing::pi;

namespace {

RunConfig small() {
    RunConfig c;
    c.ny = c.nz = 16;
    c.duration = 2.0;
    c.cadence = 0.1;
    return c;
}

RunConfig zero_data(RunConfig c) {
    c.profiles = {0.5, 0, 0, 0, 0, 0};
    c.forcing_modes.clear();
    return c;
}

}  // namespace

TEST_CASE("zero run stays zero") {
    RunConfig c = zero_data(small());
    c.initial.preset = InitialPreset::zero;
    const Trajectory tr = run_simulation(c);
    CHECK(tr.reports.size() == 21);
    for (const auto& r : tr.reports)
        for (double v : {r.l2_theta, r.l2_q, r.l2_T, r.l2_S, r.h1_theta, r.h1_q, r.h1_T, r.h1_S, r.trace_T, r.E})
            CHECK(v == 0.0);
}

TEST_CASE("theta decay preset follows the analytic solution") {
    RunConfig c = zero_data(small());
    c.profiles.gamma0 = 0.0;
    c.initial.preset = InitialPreset::theta_decay;
    c.duration = 0.5;
    c.cadence = 0.05;
    double prev = 0.0;
    for (int n : {16, 32, 64}) {
        c.ny = n;
        c.nz = 8;
        c.step.dt = 0.05 / (n / 8);
        const Trajectory tr = run_simulation(c);
        const double norm0 = l2_norm(cos_pi_profile(make_grid(n, 8), 1.0));
        double err = 0.0;
        for (const auto& r : tr.reports) {
            // gamma = 0 keeps theta free of the ocean; the ocean still feels theta
            err = std::max(err, std::abs(r.l2_theta - std::exp(-(pi * pi + 1) * r.t) * norm0));
        }
        CHECK(err <= 0.5 / (n * n));
        if (prev > 0.0) CHECK(testing::order(prev, err) >= 1.8);
        prev = err;
    }
}

TEST_CASE("same config gives byte-identical CSV") {
    const RunConfig c = small();
    CHECK(format_csv(run_simulation(c).reports) == format_csv(run_simulation(c).reports));
}

TEST_CASE("run bookkeeping") {
    RunConfig c = small();
    c.profiles.F0 = 0.1;
    const Trajectory ok = run_simulation(c);
    CHECK(ok.steps > 0);
    CHECK(ok.cfl_violations == 0);
    CHECK(std::abs(ok.final_state.t - c.duration) <= 1e-12);
}

TEST_CASE("snapshots are written on the cadence") {
    RunConfig c = small();
    c.duration = 0.5;
    RunOptions opt;
    opt.snapshot_dir = std::filesystem::temp_directory_path() / "caos_test_snapshots";
    opt.snapshot_cadence = 0.2;
    const Trajectory tr = run_simulation(c, opt);
    REQUIRE(tr.snapshots.size() == 3);
    const State last = read_snapshot(tr.snapshots.back());
    CHECK(last.t == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(energy_report(last, c.phys).E == doctest::Approx(tr.reports[4].E).epsilon(1e-14));
    std::filesystem::remove_all(opt.snapshot_dir);
}

TEST_CASE("whole_steps and choose_dt") {
    CHECK(whole_steps(1.0, 0.1, "x") == 10);
    CHECK_THROWS_AS(whole_steps(1.0, 0.3, "x"), ConfigError);
    RunConfig c = small();
    const State s = make_initial_state(c.initial, make_grid(16, 16));
    const double dt = choose_dt(c, std::span<const State>(&s, 1));
    CHECK(dt > 0.0);
    CHECK(whole_steps(c.cadence, dt, "cadence") >= 1);
}

TEST_CASE("convergence") {
    RunConfig c = small();
    c.convergence_time = 0.25;
    const ConvergenceReport r = exp_convergence(c);
    CHECK(r.orders.size() == 2);
    CHECK(r.errors.size() == 3);
    CHECK(r.min_order >= 1.9);
    CHECK_FALSE(r.failed);

    // Constants are represented exactly by the scheme.
    struct Constant final : ManufacturedSolution {
        Jet1 theta(double, double) const override { return {0.5}; }
        Jet2 psi(double, double, double) const override { return {}; }
        Jet2 q(double, double, double) const override { return {}; }
        Jet2 T(double, double, double) const override { return {1.0}; }
        Jet2 S(double, double, double) const override { return {-2.0}; }
    };
    const ConvergenceReport z = exp_convergence(c, std::make_shared<Constant>());
    for (const auto& e : z.errors)
        for (double v : e) CHECK(v <= 1e-13);
    CHECK(z.orders.size() == 2);
    CHECK_FALSE(z.failed);
}

TEST_CASE("stability") {
    RunConfig c = small();
    c.stability_horizon = 1.0;
    SUBCASE("no perturbation, no difference") {
        c.perturbation_amplitude = 0.0;
        const StabilityReport r = exp_stability(c);
        for (double d : r.sup_sqrt_D) CHECK(d == 0.0);
    }
    SUBCASE("linear response and monotone in the horizon") {
        const StabilityReport r = exp_stability(c);
        CHECK(r.passed);
        CHECK(r.spread <= 0.1);
        c.stability_horizon = 2.0;
        const StabilityReport longer = exp_stability(c);
        for (std::size_t k = 0; k < r.scales.size(); ++k) CHECK(longer.sup_sqrt_D[k] >= r.sup_sqrt_D[k]);
    }
}

TEST_CASE("dissipativity") {
    SUBCASE("zero data, zero initial conditions") {
        RunConfig c = zero_data(small());
        c.initial.preset = InitialPreset::zero;
        const DissipativityReport r = exp_dissipativity(c);
        CHECK(r.bound == 0.0);
        for (const auto& run : r.runs) {
            REQUIRE(run.entry);
            CHECK(*run.entry == 0.0);
        }
        CHECK(r.passed());
    }
    SUBCASE("entry ordering on a coarse grid") {
        RunConfig c = small();
        c.duration = 4.0;
        c.ic_amplitudes = {2.0, 2.0 * std::sqrt(10.0), 20.0};
        const DissipativityReport r = exp_dissipativity(c);
        CHECK(r.E0_span == doctest::Approx(100.0).epsilon(1e-9));
        CHECK(r.entries_ok);
        CHECK(r.entry_order_ok);
        CHECK(r.feedback_ok);
        CHECK(r.to_text().find("entries_ok = true") != std::string::npos);
    }
    SUBCASE("gamma touching 1 is still usable") {
        RunConfig c = small();
        c.profiles.gamma0 = 1.0;
        c.profiles.Bo = 0.0;
        CHECK_NOTHROW(require_dissipative_hypotheses(c, false));
    }
}

TEST_CASE("contraction") {
    RunConfig c;
    SUBCASE("identical initial conditions") {
        c.second_initial = c.initial;
        const ContractionReport r = exp_contraction(c);
        for (double d : r.D) CHECK(d == 0.0);
        CHECK_FALSE(r.passed());
    }
    SUBCASE("default data contracts") {
        const ContractionReport r = exp_contraction(c);
        CHECK(r.fit.alpha > 0.0);
        CHECK(r.fit.r2 >= 0.99);
        CHECK(r.D1_decreasing);
        CHECK(r.passed());
        CHECK(r.series_csv().starts_with("t,D,D1\n"));
    }
    SUBCASE("large data is refused") {
        c.profiles.Ba = 10.0;
        try {
            exp_contraction(c);
            FAIL("expected HypothesisError");
        } catch (const HypothesisError& e) {
            CHECK(std::string(e.what()).find("small") != std::string::npos);
        }
    }
}

TEST_CASE("constant forcing settles to a steady state") {
    RunConfig c = small();
    c.duration = 4.0;
    c.cadence = 0.125;
    c.test_period = 1.0;
    c.transient_periods = 20;
    const PeriodicReport r = exp_periodic_response(c);
    CHECK(r.kind == ForcingKind::constant);
    CHECK(r.residual_P <= 1e-6);
    CHECK(r.residual_2P <= 1e-6);
    c.test_period = 0.75;
    c.transient_periods = 27;
    const PeriodicReport other = exp_periodic_response(c);
    CHECK(other.residual_P <= 1e-6);
}
