#include <doctest.h>

#include "caos/errors.hpp"
#include "caos/forcing.hpp"
#include "helpers.hpp"

using namespace caos;
using testing::pi;

TEST_CASE("default profiles") {
    const Grid g = make_grid(32, 16);
    ProfileParams p;
    p.F0 = 1.0;
    const Profiles pr = default_profiles(p, g);
    CHECK(std::abs(integrate(pr.F)) <= 1e-14);
    for (int i = 0; i <= g.ny; ++i) CHECK(pr.F(i) == doctest::Approx(std::cos(pi * g.y(i))).epsilon(1e-14));

    const Profiles zero = default_profiles({0, 0, 0, 0, 0, 0}, g);
    for (const SurfaceField* s : {&zero.gamma, &zero.S_a, &zero.S_o, &zero.F}) CHECK(sup_norm(*s) == 0.0);

    CHECK_THROWS_AS(default_profiles({1.5, 0, 0, 0, 0, 0}, g), ConfigError);
    CHECK_THROWS_AS(default_profiles({-0.1, 0, 0, 0, 0, 0}, g), ConfigError);
}

TEST_CASE("cos(pi y) profile has zero trapezoid mean on odd and even grids") {
    for (int n : {8, 9, 31, 64}) {
        const Grid g = make_grid(n, 8);
        CHECK(std::abs(integrate(cos_pi_profile(g, 3.0))) <= 1e-15);
    }
}

TEST_CASE("validate_profiles") {
    const Grid g = make_grid(32, 16);
    SUBCASE("default family passes") {
        const auto r = validate_profiles(default_profiles({0.5, 0.1, 0.2, 0.3, 0.4, 0.5}, g));
        CHECK(r.compatibility);
        CHECK(r.zero_mean_flux);
        CHECK(r.gamma_in_range);
        CHECK(r.dissipativity_ok());
        CHECK(r.warnings().empty());
        CHECK(r.failures().empty());
    }
    SUBCASE("samples without exact slopes are estimated") {
        auto p = default_profiles({0.5, 0.1, 0.2, 0.3, 0.4, 0.5}, g);
        p.S_o_slopes.reset();
        p.F_slopes.reset();
        CHECK(validate_profiles(p).compatibility);
    }
    SUBCASE("F = y fails compatibility and zero mean") {
        auto p = zero_profiles(g);
        p.F = SurfaceField::from_function(g, [](double y) { return y; });
        fill_neumann_ghosts(p.F);
        p.F_slopes.reset();
        const auto r = validate_profiles(p);
        CHECK_FALSE(r.compatibility);
        CHECK_FALSE(r.zero_mean_flux);
        CHECK_FALSE(r.dissipativity_ok());
        CHECK(r.failures().size() == 2);
    }
    SUBCASE("gamma identically 1 warns") {
        const auto r = validate_profiles(default_profiles({1.0, 0, 0, 0, 0, 0}, g));
        CHECK(r.gamma_in_range);
        CHECK_FALSE(r.gamma_below_one);
        CHECK(r.gamma_above_zero);
        CHECK(r.warnings().size() == 1);
        CHECK(r.dissipativity_ok());
    }
    SUBCASE("gamma above 1 fails") {
        auto p = zero_profiles(g);
        p.gamma.fill(1.2);
        fill_neumann_ghosts(p.gamma);
        const auto r = validate_profiles(p);
        CHECK_FALSE(r.gamma_in_range);
        CHECK_FALSE(r.dissipativity_ok());
    }
}

namespace {

ForcingMode mode(const Grid& g, double amp, double omega, double phase = 0.0) {
    return {cos_pi_profile(g, amp), omega, phase};
}

}  // namespace

TEST_CASE("ForcingSpec kinds are validated") {
    const Grid g = make_grid(16, 8);
    CHECK_NOTHROW(ForcingSpec(g, ForcingKind::constant, {mode(g, 1, 0)}));
    CHECK_THROWS_AS(ForcingSpec(g, ForcingKind::constant, {mode(g, 1, 2)}), ConfigError);
    CHECK_NOTHROW(ForcingSpec(g, ForcingKind::periodic, {mode(g, 1, pi), mode(g, 2, 0)}));
    CHECK_THROWS_AS(ForcingSpec(g, ForcingKind::periodic, {mode(g, 1, 1), mode(g, 1, 2)}), ConfigError);
    CHECK_THROWS_AS(ForcingSpec(g, ForcingKind::periodic, {}), ConfigError);
    CHECK_NOTHROW(ForcingSpec(g, ForcingKind::quasiperiodic, {mode(g, 1, 1), mode(g, 1, std::sqrt(2.0))}));
    CHECK_THROWS_AS(ForcingSpec(g, ForcingKind::quasiperiodic, {mode(g, 1, 1), mode(g, 1, 1.5)}), ConfigError);
    CHECK_THROWS_AS(ForcingSpec(g, ForcingKind::almost_periodic, {mode(g, 1, 1), mode(g, 1, 2)}), ConfigError);
    CHECK_THROWS_AS(ForcingSpec(g, ForcingKind::constant, {mode(g, 1, -1)}), ConfigError);
    CHECK(parse_forcing_kind("quasiperiodic") == ForcingKind::quasiperiodic);
    CHECK_THROWS_AS(parse_forcing_kind("weekly"), ConfigError);
}

TEST_CASE("eval_forcing") {
    const Grid g = make_grid(16, 8);
    const ForcingSpec one(g, ForcingKind::periodic, {mode(g, 0.7, 3.0)});
    const auto f0 = eval_forcing(one, 0.0);
    for (int i = 0; i <= g.ny; ++i) CHECK(f0(i) == one.modes()[0].profile(i));

    const double t = 0.37;
    const auto a = eval_forcing(one, t);
    const auto b = eval_forcing(one, t + 2 * pi / 3.0);
    for (int i = 0; i <= g.ny; ++i) CHECK(std::abs(a(i) - b(i)) <= 1e-12);

    const ForcingSpec two(g, ForcingKind::quasiperiodic, {mode(g, 1, 1), mode(g, 1, std::sqrt(2.0))});
    const double bound = sup_norm(two.modes()[0].profile) + sup_norm(two.modes()[1].profile);
    for (int k = 0; k < 2000; ++k) {
        const auto f = eval_forcing(two, 0.05 * k);
        CHECK(sup_norm(f) <= bound + 1e-15);
        CHECK(l2_norm(f) <= two.uniform_bound() + 1e-15);
    }
}

TEST_CASE("eval_forcing is linear in the mode amplitudes") {
    const Grid g = make_grid(16, 8);
    const ForcingSpec a(g, ForcingKind::quasiperiodic, {mode(g, 1, 1, 0.2), mode(g, 0.5, std::sqrt(3.0))});
    const ForcingSpec b(g, ForcingKind::quasiperiodic, {mode(g, 3, 1, 0.2), mode(g, 1.5, std::sqrt(3.0))});
    for (double t : {0.0, 1.3, 17.9}) {
        const auto fa = eval_forcing(a, t), fb = eval_forcing(b, t);
        for (int i = 0; i <= g.ny; ++i) CHECK(fb(i) == doctest::Approx(3 * fa(i)).epsilon(1e-14));
    }
}

TEST_CASE("truncated almost periodic forcing has near periods") {
    const Grid g = make_grid(16, 8);
    const ForcingSpec f(g, ForcingKind::almost_periodic,
                        {mode(g, 1, 1), mode(g, 0.5, std::sqrt(2.0)), mode(g, 0.25, std::sqrt(5.0))});
    // Scan shifts on a fine grid for one that nearly repeats every sampled time.
    for (double eps : {1.0, 0.5}) {
        bool found = false;
        for (int k = 1; k < 20000 && !found; ++k) {
            const double tau = 0.01 * k;
            double worst = 0.0;
            for (int s = 0; s < 50; ++s) {
                const double t = 0.37 * s;
                worst = std::max(worst, l2_norm(eval_forcing(f, t + tau) - eval_forcing(f, t)));
            }
            found = worst < eps;
        }
        CHECK(found);
    }
}

TEST_CASE("forcing_period") {
    const Grid g = make_grid(16, 8);
    CHECK(*forcing_period(ForcingSpec(g, ForcingKind::periodic, {mode(g, 1, pi)})) == doctest::Approx(2.0));
    CHECK_FALSE(forcing_period(ForcingSpec::none(g)));
    CHECK_FALSE(forcing_period(ForcingSpec(g, ForcingKind::quasiperiodic, {mode(g, 1, 1), mode(g, 1, std::sqrt(2.0))})));
}

TEST_CASE("irrational ratio test") {
    CHECK(is_irrational_ratio(std::sqrt(2.0)));
    CHECK(is_irrational_ratio(pi));
    CHECK_FALSE(is_irrational_ratio(1.5));
    CHECK_FALSE(is_irrational_ratio(22.0 / 7.0));
}
