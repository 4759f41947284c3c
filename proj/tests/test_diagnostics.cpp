#include <doctest.h>

#include <random>

#include "caos/diagnostics.hpp"
#include "caos/errors.hpp"
#include "helpers.hpp"

using namespace caos;
using testing::pi;
using testing::sinsin;

namespace {

State random_state(const Grid& g, unsigned seed, double amp = 1.0) {
    State s = State::zeros(g);
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double c0 = u(gen), c1 = u(gen);
    s.theta = SurfaceField::from_function(g, [&](double y) { return amp * (c0 + c1 * std::cos(pi * y)); });
    fill_neumann_ghosts(s.theta);
    s.q = amp * testing::random_smooth(g, true, seed);
    s.psi = amp * testing::random_smooth(g, true, seed + 100);
    s.T = amp * testing::random_smooth(g, false, seed + 1);
    s.S = amp * testing::random_smooth(g, false, seed + 2);
    return s;
}

}  // namespace

TEST_CASE("energy_report") {
    const Grid g = make_grid(32, 32);
    const PhysParams p{1.0, 10.0, 0.0};

    const EnergyReport zero = energy_report(State::zeros(g), p);
    for (double v : {zero.l2_theta, zero.l2_q, zero.l2_T, zero.l2_S, zero.h1_theta, zero.h1_q, zero.h1_T,
                     zero.h1_S, zero.trace_T, zero.E})
        CHECK(v == 0.0);

    const State s = random_state(g, 3);
    State d = s;
    d.theta *= 2.0;
    d.q *= 2.0;
    d.T *= 2.0;
    d.S *= 2.0;
    fill_neumann_ghosts(d.theta);
    fill_dirichlet_ghosts(d.q);
    fill_neumann_ghosts(d.T);
    fill_neumann_ghosts(d.S);
    CHECK(energy_report(d, p).E == doctest::Approx(4 * energy_report(s, p).E).epsilon(1e-13));

    State q = State::zeros(g);
    q.q = OceanField::from_function(g, BcTag::vorticity, sinsin);
    fill_dirichlet_ghosts(q.q);
    CHECK(energy_report(q, p).E == doctest::Approx(0.25).epsilon(1e-12));

    CHECK(energy_weight(p) == doctest::Approx(2 * 100 * kLambda1));
}

TEST_CASE("E is positive on random nonzero states") {
    const Grid g = make_grid(16, 16);
    const PhysParams p{0.7, 3.0, 0.1};
    for (unsigned seed = 1; seed <= 20; ++seed) {
        const auto r = energy_report(random_state(g, seed, 1e-3 * seed), p);
        CHECK(r.E > 0.0);
        CHECK(std::isfinite(r.E));
    }
}

TEST_CASE("state_difference") {
    const Grid g = make_grid(16, 16);
    const PhysParams p{1.0, 10.0, 0.0};
    const State a = random_state(g, 1), b = random_state(g, 2);

    const DiffReport same = state_difference(a, a, p);
    CHECK(same.D == 0.0);
    CHECK(same.D1 == 0.0);

    CHECK(state_difference(a, b, p).D == state_difference(b, a, p).D);
    CHECK(state_difference(a, b, p).D1 == doctest::Approx(state_difference(b, a, p).D1).epsilon(1e-14));

    const DiffReport vs_zero = state_difference(a, State::zeros(g), p);
    CHECK(vs_zero.D == doctest::Approx(energy_report(a, p).E).epsilon(1e-13));
    CHECK(vs_zero.D1 >= vs_zero.D);

    const auto ua = state_observable(a, p), ub = state_observable(b, p);
    const double dist = euclidean_distance(ua, ub);
    CHECK(dist * dist == doctest::Approx(state_difference(a, b, p).D).epsilon(1e-12));

    CHECK_THROWS_AS(state_difference(a, State::zeros(make_grid(8, 8)), p), ContractViolation);
}

TEST_CASE("feedback bound") {
    const Grid g = make_grid(32, 32);
    const PhysParams p{1.0, 10.0, 0.0};

    SUBCASE("zero data and zero state") {
        const auto pr = default_profiles({0.5, 0, 0, 0, 0, 0}, g);
        const auto r0 = energy_report(State::zeros(g), p);
        for (double t : {0.0, 1.0, 100.0})
            CHECK(feedback_bound(p, pr, ForcingSpec::none(g), r0, t) == 0.0);
    }
    SUBCASE("gamma0 = 1/2") {
        const auto pr = default_profiles({0.5, 0.1, 0.2, 0.3, 0.4, 0.5}, g);
        const auto b = make_feedback_bound(p, pr, ForcingSpec::none(g), energy_report(random_state(g, 4), p));
        CHECK(b.branch == FeedbackBranch::sup_gamma);
        CHECK(b.alpha0 == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
        const double expect = std::min({p.Pr * kLambda1 / 4, 1.0 / 24, 1.0 / 8, 1.0 / (8 * pi * pi)});
        CHECK(b.alpha1 == doctest::Approx(expect).epsilon(1e-15));
        CHECK(b.alpha1_terms[1] == doctest::Approx(1.0 / 24));
        // tends to the constant part
        const double tail = (b.data_no_flux + b.trace_constant * b.flux_per_C) / (2 * b.alpha1);
        CHECK(b.at(1e5) == doctest::Approx(tail).epsilon(1e-12));
        CHECK(b.at(0.0) > b.at(10.0));
        CHECK(b.at(3.0, 4.0) > b.at(3.0));
    }
    SUBCASE("gamma touching 1 uses the inf branch") {
        const auto pr = default_profiles({1.0, 0, 0.1, 0, 0.1, 0}, g);
        const auto b = make_feedback_bound(p, pr, ForcingSpec::none(g), energy_report(State::zeros(g), p));
        CHECK(b.branch == FeedbackBranch::inf_gamma);
        CHECK(b.alpha0 == doctest::Approx(1.0 / 3.0));
    }
    SUBCASE("gamma spanning [0, 1] is refused") {
        auto pr = zero_profiles(g);
        pr.gamma = SurfaceField::from_function(g, [](double y) { return y; });
        fill_neumann_ghosts(pr.gamma);
        CHECK_THROWS_AS(make_feedback_bound(p, pr, ForcingSpec::none(g), energy_report(State::zeros(g), p)),
                        HypothesisError);
    }
    SUBCASE("required trace constant") {
        const auto pr = default_profiles({0.5, 0, 0, 0, 0, 0.1}, g);
        const auto b = make_feedback_bound(p, pr, ForcingSpec::none(g), energy_report(State::zeros(g), p));
        const std::vector<double> t{1.0, 2.0};
        const std::vector<double> small{0.0, 0.0};
        CHECK(*required_trace_constant(b, t, small) == 0.0);
        const std::vector<double> big{b.at(1.0, 10.0), b.at(2.0, 5.0)};
        CHECK(*required_trace_constant(b, t, big) == doctest::Approx(10.0).epsilon(1e-9));
    }
}

TEST_CASE("fit_decay_rate") {
    std::vector<double> t, D;
    for (int k = 0; k <= 100; ++k) {
        t.push_back(0.1 * k);
        D.push_back(std::exp(-2.0 * t.back()));
    }
    auto fit = fit_decay_rate(t, D, 0.0, 10.0);
    CHECK(std::abs(fit.alpha - 2.0) <= 1e-9);
    CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.t_start == doctest::Approx(2.0));

    std::vector<double> flat(t.size(), 0.3);
    fit = fit_decay_rate(t, flat, 0.0, 10.0);
    CHECK(std::abs(fit.alpha) <= 1e-15);
    CHECK(fit.r2 >= 0.0);
    CHECK(fit.r2 <= 1.0);

    std::vector<double> wobble;
    for (double s : t) wobble.push_back(3 * std::exp(-0.5 * s) * (1 + 0.01 * std::sin(s)));
    fit = fit_decay_rate(t, wobble, 0.0, 10.0);
    CHECK(std::abs(fit.alpha - 0.5) <= 0.02);
    CHECK(fit.r2 > 0.99);

    // Stops at the first non-positive sample.
    std::vector<double> cut = D;
    cut[60] = 0.0;
    fit = fit_decay_rate(t, cut, 0.0, 10.0);
    CHECK(fit.t_end < 6.0);
    CHECK(std::abs(fit.alpha - 2.0) <= 1e-9);

    CHECK_THROWS_AS(fit_decay_rate(t, D, 0.0, 0.5), InsufficientDataError);
}

TEST_CASE("detect_period") {
    const Sampler wave = [](double t) { return std::vector<double>{std::sin(t), std::cos(t)}; };
    CHECK(detect_period(wave, 2 * pi, 3.0, 32) <= 1e-12);
    const Sampler flat = [](double) { return std::vector<double>{1.0, -2.0}; };
    for (double P : {0.3, 1.0, 7.0}) CHECK(detect_period(flat, P, 0.0, 16) == 0.0);

    const Sampler s1 = [](double t) { return std::vector<double>{std::sin(t)}; };
    // |sin(s + pi) - sin(s)| / |sin s| = 2 wherever sin s != 0.
    CHECK(detect_period(s1, pi, 0.1, 32) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("quasiperiodic_return") {
    const Sampler one = [](double t) { return std::vector<double>{std::sin(2 * t), std::cos(2 * t)}; };
    const std::vector<double> w1{2.0};
    const auto r1 = quasiperiodic_return(one, w1, 0.0, 4.0, 2, 5.0, 32);
    for (const auto& r : r1) CHECK(r.distance <= 1e-12);
    CHECK(r1.front().tau == doctest::Approx(pi).epsilon(1e-12));

    const Sampler two = [](double t) {
        return std::vector<double>{std::cos(t) + std::cos(std::sqrt(2.0) * t), std::sin(t) + std::sin(std::sqrt(2.0) * t)};
    };
    const std::vector<double> w2{1.0, std::sqrt(2.0)};
    const auto r2 = quasiperiodic_return(two, w2, 0.0, 20.0, 5, 10.0, 64);
    REQUIRE(r2.size() == 5);
    for (std::size_t k = 1; k < r2.size(); ++k) {
        CHECK(r2[k].distance <= r2[k - 1].distance);
        CHECK(r2[k].horizon == doctest::Approx(2 * r2[k - 1].horizon));
    }
    CHECK(r2.back().distance < r2.front().distance);

    const Sampler flat = [](double) { return std::vector<double>{4.0}; };
    for (const auto& r : quasiperiodic_return(flat, w2, 0.0, 10.0, 3, 5.0, 16)) CHECK(r.distance == 0.0);
}

TEST_CASE("absorbing_entry") {
    std::vector<EnergyReport> series;
    for (int k = 0; k <= 9; ++k) series.push_back({.t = double(k), .E = 10.0 - k});
    CHECK(*absorbing_entry(series, 2.0) == doctest::Approx(8.0));

    series[9].E = 5.0;
    CHECK_FALSE(absorbing_entry(series, 2.0));

    std::vector<EnergyReport> zero(5);
    for (int k = 0; k < 5; ++k) zero[k].t = 0.5 * k;
    CHECK(*absorbing_entry(zero, 1.0) == 0.0);

    std::vector<EnergyReport> wave;
    for (int k = 0; k < 50; ++k) wave.push_back({.t = 0.1 * k, .E = 3.0 + std::sin(0.1 * k)});
    CHECK_FALSE(absorbing_entry(wave, 1.0));
}

TEST_CASE("SampledTrajectory") {
    SampledTrajectory tr(1.0, 0.25);
    for (int k = 0; k < 20; ++k) {
        const double t = 1.0 + 0.25 * k;
        tr.push({t * t - 3 * t, 2.0 * t});
    }
    CHECK(tr.size() == 20);
    CHECK(tr.t_last() == doctest::Approx(1.0 + 0.25 * 19));
    CHECK(tr.at(2.0)[0] == 4.0 - 6.0);
    for (double t : {1.6, 2.37, 4.01}) {
        const auto v = tr.at(t);
        CHECK(v[0] == doctest::Approx(t * t - 3 * t).epsilon(1e-12));
        CHECK(v[1] == doctest::Approx(2 * t).epsilon(1e-12));
    }
    CHECK(tr.sampler()(3.3)[1] == doctest::Approx(6.6));
}
