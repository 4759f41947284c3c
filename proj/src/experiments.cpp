#include "caos/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "caos/errors.hpp"
#include "caos/simulation.hpp"

namespace caos {

namespace {

double sq(double x) { return x * x; }

std::string g17(double x) { return fmt::format("{:.17g}", x); }

std::string g17(const std::optional<double>& x) { return x ? g17(*x) : std::string("none"); }

struct Member {
    State state;
    Integrator integrator;
};

Member start(const RunConfig& cfg, const Grid& grid, State state, ForcingSpec forcing, double dt) {
    Integrator in = make_integrator(cfg, grid, std::move(forcing), dt);
    in.initialize(state);
    return {std::move(state), std::move(in)};
}

void advance(Member& m, long steps) {
    for (long n = 0; n < steps; ++n) m.integrator.step(m.state);
}

}  // namespace

double data_norm(const RunConfig& cfg, const Grid& grid) {
    const Profiles p = make_profiles(cfg, grid);
    const ForcingSpec f = make_forcing(cfg, grid);
    return std::sqrt(sq(cfg.phys.a) + 1.25 * sq(l2_norm(p.S_o)) + sq(l2_norm(p.S_a)) + sq(f.uniform_bound()) +
                     sq(l2_norm(p.F)));
}

void require_dissipative_hypotheses(const RunConfig& cfg, bool small_data) {
    const Grid grid = make_grid(cfg.ny, cfg.nz);
    auto failures = validate_profiles(make_profiles(cfg, grid)).failures();
    if (small_data) {
        const double d = data_norm(cfg, grid);
        if (d > cfg.small_data_limit)
            failures.push_back(fmt::format("small data: data norm {:.6g} exceeds limit {:.6g}", d,
                                           cfg.small_data_limit));
    }
    if (failures.empty()) return;
    std::string msg = "hypothesis not satisfied:";
    for (const auto& f : failures) msg += " [" + f + "]";
    throw HypothesisError(msg);
}

// ------------------------------------------------------------ convergence

ConvergenceReport exp_convergence(const RunConfig& cfg, std::shared_ptr<const ManufacturedSolution> exact) {
    if (!exact) exact = std::make_shared<TrigManufactured>();
    ConvergenceReport r;
    for (int n : cfg.convergence_grids) {
        const Grid grid = make_grid(n, n);
        const Profiles profiles = make_profiles(cfg, grid);
        StepConfig step = cfg.step;
        step.dt = cfg.convergence_courant / n;
        step.salinity_projection = false;
        Integrator in(grid, cfg.phys, profiles, ForcingSpec::none(grid), step, cfg.poisson,
                      mms_residual(exact, cfg.phys, profiles, grid));
        State s = exact->sample(grid, 0.0);
        in.initialize(s);
        const long steps = whole_steps(cfg.convergence_time, step.dt, "convergence.time");
        for (long k = 0; k < steps; ++k) in.step(s);
        const State ref = exact->sample(grid, s.t);
        r.grids.push_back(n);
        r.errors.push_back({l2_norm(s.theta - ref.theta), l2_norm(s.q - ref.q), l2_norm(s.T - ref.T),
                            l2_norm(s.S - ref.S)});
    }
    r.min_order = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < r.grids.size(); ++k) {
        std::array<double, 4> o{};
        const double h_ratio = static_cast<double>(r.grids[k]) / r.grids[k - 1];
        for (int f = 0; f < 4; ++f) {
            const double e0 = r.errors[k - 1][f], e1 = r.errors[k][f];
            // Errors at rounding level carry no order information.
            o[f] = (e0 <= 1e-13 && e1 <= 1e-13) ? std::numeric_limits<double>::infinity()
                                                : std::log(e0 / e1) / std::log(h_ratio);
            r.min_order = std::min(r.min_order, o[f]);
        }
        r.orders.push_back(o);
    }
    r.failed = r.min_order < 1.5;
    return r;
}

std::string ConvergenceReport::to_text() const {
    std::string out = "experiment = convergence\n";
    for (std::size_t k = 0; k < grids.size(); ++k)
        out += fmt::format("error_n{} = {}, {}, {}, {}\n", grids[k], g17(errors[k][0]), g17(errors[k][1]),
                           g17(errors[k][2]), g17(errors[k][3]));
    for (std::size_t k = 0; k < orders.size(); ++k)
        out += fmt::format("order_{}_{} = {}, {}, {}, {}\n", grids[k], grids[k + 1], g17(orders[k][0]),
                           g17(orders[k][1]), g17(orders[k][2]), g17(orders[k][3]));
    out += "min_order = " + g17(min_order) + "\n";
    out += fmt::format("failed = {}\n", failed);
    return out;
}

// -------------------------------------------------------------- stability

StabilityReport exp_stability(const RunConfig& cfg) {
    const Grid grid = make_grid(cfg.ny, cfg.nz);
    const State ic = make_initial_state(cfg.initial, grid);
    const double dt = choose_dt(cfg, std::span<const State>(&ic, 1));
    const long per = whole_steps(cfg.cadence, dt, "time.cadence");
    const long samples = whole_steps(cfg.stability_horizon, cfg.cadence, "stability.horizon");

    StabilityReport r;
    r.horizon = cfg.stability_horizon;
    r.delta_f_norm = l2_norm(cos_pi_profile(grid, cfg.perturbation_amplitude));

    std::vector<State> base;
    {
        Member m = start(cfg, grid, ic, make_forcing(cfg, grid), dt);
        march(m.integrator, m.state, per, samples, [&](const State& s) { base.push_back(s); });
    }
    for (double s : r.scales) {
        Member m = start(cfg, grid, ic, make_perturbed_forcing(cfg, grid, s), dt);
        double sup = 0.0;
        std::size_t k = 0;
        march(m.integrator, m.state, per, samples, [&](const State& st) {
            sup = std::max(sup, std::sqrt(state_difference(st, base[k++], cfg.phys).D));
        });
        r.sup_sqrt_D.push_back(sup);
        r.ratios.push_back(r.delta_f_norm > 0.0 ? sup / (s * r.delta_f_norm) : 0.0);
    }
    const auto [lo, hi] = std::minmax_element(r.ratios.begin(), r.ratios.end());
    r.spread = *hi > 0.0 ? (*hi - *lo) / *hi : 0.0;
    r.passed = r.spread <= 0.1;
    return r;
}

std::string StabilityReport::to_text() const {
    std::string out = "experiment = stability\n";
    out += "horizon = " + g17(horizon) + "\n";
    out += "delta_f_norm = " + g17(delta_f_norm) + "\n";
    for (std::size_t k = 0; k < scales.size(); ++k)
        out += fmt::format("scale_{} = {}, sup_sqrt_D = {}, ratio = {}\n", k, g17(scales[k]), g17(sup_sqrt_D[k]),
                           g17(ratios[k]));
    out += "spread = " + g17(spread) + "\n";
    out += fmt::format("passed = {}\n", passed);
    return out;
}

// ---------------------------------------------------------- dissipativity

double absorbing_radius_sq(const RunConfig& cfg, const Grid& grid) {
    const Profiles p = make_profiles(cfg, grid);
    EnergyReport zero;
    const FeedbackBound b = make_feedback_bound(cfg.phys, p, make_forcing(cfg, grid), zero, cfg.trace_constant);
    return cfg.phys.Pr * sq(cfg.phys.Ra) * kLambda1 / b.alpha1 *
           (b.data_no_flux + b.trace_constant * b.flux_per_C);
}

DissipativityReport exp_dissipativity(const RunConfig& cfg) {
    require_dissipative_hypotheses(cfg, false);
    const Grid grid = make_grid(cfg.ny, cfg.nz);
    const Profiles profiles = make_profiles(cfg, grid);
    const ForcingSpec forcing = make_forcing(cfg, grid);

    DissipativityReport r;
    r.M2 = absorbing_radius_sq(cfg, grid);
    r.bound = 2.0 * r.M2;

    std::vector<State> ics;
    for (double A : cfg.ic_amplitudes) {
        InitialCondition ic = cfg.initial;
        ic.amplitude = A;
        ics.push_back(make_initial_state(ic, grid));
    }
    const double dt = choose_dt(cfg, ics);
    const long per = whole_steps(cfg.cadence, dt, "time.cadence");
    const long samples = whole_steps(cfg.duration, cfg.cadence, "time.duration");

    r.entries_ok = true;
    r.feedback_ok = true;
    for (std::size_t k = 0; k < ics.size(); ++k) {
        DissipativityRun run;
        run.amplitude = cfg.ic_amplitudes[k];
        Member m = start(cfg, grid, ics[k], forcing, dt);
        march(m.integrator, m.state, per, samples,
              [&](const State& s) { run.series.push_back(energy_report(s, cfg.phys)); });
        run.E0 = run.series.front().E;
        for (const auto& e : run.series) {
            if (!run.first_hit && e.E <= r.bound) run.first_hit = e.t;
            if (!run.first_hit) continue;
            // zero data gives B = 0; a zero series is then inside it
            const double ratio = r.bound > 0.0 ? e.E / r.bound
                                 : e.E > 0.0   ? std::numeric_limits<double>::infinity()
                                               : 0.0;
            run.max_after_hit = std::max(run.max_after_hit, ratio);
        }
        run.entry = absorbing_entry(run.series, r.bound);

        const FeedbackBound fb = make_feedback_bound(cfg.phys, profiles, forcing, run.series.front(),
                                                     cfg.trace_constant);
        if (k == 0) r.feedback = fb;
        std::vector<double> ts, th2;
        run.feedback_margin = std::numeric_limits<double>::infinity();
        for (const auto& e : run.series) {
            ts.push_back(e.t);
            th2.push_back(sq(e.l2_theta));
            run.feedback_margin = std::min(run.feedback_margin, fb.at(e.t) - sq(e.l2_theta));
        }
        run.feedback_ok = run.feedback_margin >= 0.0;
        if (!run.feedback_ok) run.required_C = required_trace_constant(fb, ts, th2);

        r.entries_ok = r.entries_ok && run.first_hit && run.entry && run.max_after_hit <= 2.0;
        r.feedback_ok = r.feedback_ok && run.feedback_ok;
        r.runs.push_back(std::move(run));
    }

    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& run : r.runs) {
        lo = std::min(lo, run.E0);
        hi = std::max(hi, run.E0);
    }
    r.E0_span = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();

    std::vector<const DissipativityRun*> order;
    for (const auto& run : r.runs) order.push_back(&run);
    std::sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->E0 < b->E0; });
    r.entry_order_ok = true;
    for (std::size_t k = 1; k < order.size(); ++k)
        if (order[k]->first_hit && order[k - 1]->first_hit && *order[k]->first_hit < *order[k - 1]->first_hit)
            r.entry_order_ok = false;
    return r;
}

std::string DissipativityReport::to_text() const {
    std::string out = "experiment = dissipativity\n";
    out += "M2 = " + g17(M2) + "\n";
    out += "ball = " + g17(bound) + "\n";
    out += "E0_span = " + g17(E0_span) + "\n";
    out += fmt::format("feedback_branch = {}\n",
                       feedback.branch == FeedbackBranch::sup_gamma ? "sup_gamma" : "inf_gamma");
    out += "alpha0 = " + g17(feedback.alpha0) + "\n";
    out += fmt::format("alpha1_terms = {}, {}, {}, {}\n", g17(feedback.alpha1_terms[0]),
                       g17(feedback.alpha1_terms[1]), g17(feedback.alpha1_terms[2]),
                       g17(feedback.alpha1_terms[3]));
    out += "alpha1 = " + g17(feedback.alpha1) + "\n";
    out += "trace_constant = " + g17(feedback.trace_constant) + "\n";
    for (std::size_t k = 0; k < runs.size(); ++k) {
        const auto& r = runs[k];
        out += fmt::format(
            "run_{} = amplitude {}, E0 {}, first_hit {}, entry {}, max_after_hit {}, feedback_margin {}, "
            "required_C {}\n",
            k, g17(r.amplitude), g17(r.E0), g17(r.first_hit), g17(r.entry), g17(r.max_after_hit),
            g17(r.feedback_margin), g17(r.required_C));
    }
    out += fmt::format("entries_ok = {}\nentry_order_ok = {}\nfeedback_ok = {}\n", entries_ok, entry_order_ok,
                       feedback_ok);
    if (!feedback_ok) {
        double need = 0.0;
        for (const auto& r : runs)
            if (r.required_C) need = std::max(need, *r.required_C);
        out += "recalibrated_trace_constant = " + g17(need) + "\n";
    }
    return out;
}

// ------------------------------------------------------------ contraction

namespace {

struct PairRun {
    Member a, b;
    long per = 0;
    double dt = 0.0;
};

PairRun start_pair(const RunConfig& cfg, const Grid& grid) {
    const State ics[2] = {make_initial_state(cfg.initial, grid), make_initial_state(cfg.second_initial, grid)};
    const double dt = choose_dt(cfg, ics);
    PairRun p{start(cfg, grid, ics[0], make_forcing(cfg, grid), dt),
              start(cfg, grid, ics[1], make_forcing(cfg, grid), dt), 0, dt};
    p.per = whole_steps(cfg.cadence, dt, "time.cadence");
    return p;
}

ContractionReport contraction_phase(const RunConfig& cfg, PairRun& pair) {
    ContractionReport r;
    const long samples = whole_steps(cfg.duration, cfg.cadence, "time.duration");
    for (long k = 0;; ++k) {
        const DiffReport d = state_difference(pair.a.state, pair.b.state, cfg.phys);
        r.t.push_back(pair.a.state.t);
        r.D.push_back(d.D);
        r.D1.push_back(d.D1);
        if (k == samples) break;
        advance(pair.a, pair.per);
        advance(pair.b, pair.per);
    }
    const double t0 = r.t.front(), t1 = r.t.back();
    const double from = t0 + cfg.fit_discard * (t1 - t0);
    try {
        r.fit = fit_decay_rate(r.t, r.D, t0, t1, cfg.fit_discard);
        r.fit_gradient = fit_decay_rate(r.t, r.D1, t0, t1, cfg.fit_discard);
    } catch (const InsufficientDataError&) {
        // Identical trajectories: D vanishes and nothing is left to fit.
        r.fit = r.fit_gradient = FitResult{};
    }
    r.fit_flagged = r.fit.r2 < 0.9 || r.fit_gradient.r2 < 0.9;
    r.D_nonincreasing = true;
    r.D1_decreasing = true;
    for (std::size_t k = 1; k < r.t.size(); ++k) {
        if (r.t[k - 1] < from) continue;
        if (r.D[k] > r.D[k - 1]) r.D_nonincreasing = false;
        if (!(r.D1[k] < r.D1[k - 1])) r.D1_decreasing = false;
    }
    return r;
}

}  // namespace

ContractionReport exp_contraction(const RunConfig& cfg) {
    require_dissipative_hypotheses(cfg, true);
    const Grid grid = make_grid(cfg.ny, cfg.nz);
    PairRun pair = start_pair(cfg, grid);
    return contraction_phase(cfg, pair);
}

bool ContractionReport::passed() const { return fit.alpha > 0.0 && fit.r2 >= 0.99 && D1_decreasing; }

std::string ContractionReport::to_text() const {
    std::string out = "experiment = contraction\n";
    out += fmt::format("fit_D = alpha {}, intercept {}, r2 {}, window {} .. {}, samples {}\n", g17(fit.alpha),
                       g17(fit.intercept), g17(fit.r2), g17(fit.t_start), g17(fit.t_end), fit.samples);
    out += fmt::format("fit_D1 = alpha {}, intercept {}, r2 {}, window {} .. {}, samples {}\n",
                       g17(fit_gradient.alpha), g17(fit_gradient.intercept), g17(fit_gradient.r2),
                       g17(fit_gradient.t_start), g17(fit_gradient.t_end), fit_gradient.samples);
    out += fmt::format("fit_flagged = {}\nD_nonincreasing = {}\nD1_decreasing = {}\npassed = {}\n", fit_flagged,
                       D_nonincreasing, D1_decreasing, passed());
    return out;
}

std::string ContractionReport::series_csv() const {
    std::string out = "t,D,D1\n";
    for (std::size_t k = 0; k < t.size(); ++k) out += g17(t[k]) + "," + g17(D[k]) + "," + g17(D1[k]) + "\n";
    return out;
}

// -------------------------------------------------------- periodic response

PeriodicReport exp_periodic_response(const RunConfig& cfg) {
    require_dissipative_hypotheses(cfg, true);
    const Grid grid = make_grid(cfg.ny, cfg.nz);
    const ForcingSpec forcing = make_forcing(cfg, grid);

    PeriodicReport r;
    r.kind = forcing.kind();
    if (r.kind == ForcingKind::almost_periodic)
        throw HypothesisError("periodic response experiment needs constant, periodic or quasiperiodic forcing");
    const auto freqs = forcing.frequencies();
    r.period = r.kind == ForcingKind::constant ? cfg.test_period : 2.0 * std::numbers::pi / freqs.front();

    PairRun pair = start_pair(cfg, grid);
    const ContractionReport fit = contraction_phase(cfg, pair);
    r.alpha = fit.fit.alpha;
    const double wanted =
        std::max(r.alpha > 0.0 ? cfg.transient_rates / r.alpha : 0.0, cfg.transient_periods * r.period);
    // The fit phase counts towards the transient; continue to a whole number
    // of output samples.
    const double t_fit = pair.a.state.t;
    const long extra = std::max(0L, static_cast<long>(std::ceil((wanted - t_fit) / cfg.cadence - 1e-9)));
    for (long k = 0; k < extra; ++k) {
        advance(pair.a, pair.per);
        advance(pair.b, pair.per);
    }
    r.transient = pair.a.state.t;

    const double record = r.kind == ForcingKind::quasiperiodic
                              ? r.period + cfg.quasi_horizon * std::pow(2.0, cfg.quasi_levels - 1) + r.period
                              : 4.0 * r.period;
    const long samples = static_cast<long>(std::ceil(record / cfg.cadence)) + 2;
    SampledTrajectory ua(r.transient, cfg.cadence), ub(r.transient, cfg.cadence);
    for (long k = 0;; ++k) {
        ua.push(state_observable(pair.a.state, cfg.phys));
        ub.push(state_observable(pair.b.state, cfg.phys));
        if (k == samples) break;
        advance(pair.a, pair.per);
        advance(pair.b, pair.per);
    }
    const Sampler sa = ua.sampler();

    const int m = cfg.period_phases;
    r.residual_P = detect_period(sa, r.period, r.transient, m);
    r.residual_2P = detect_period(sa, 2.0 * r.period, r.transient, m);
    r.residual_wrong = detect_period(sa, 0.7 * r.period, r.transient, m);
    for (int k = 0; k <= 2 * m; ++k) {
        const double t = r.transient + 2.0 * r.period * k / (2 * m);
        const auto a = ua.at(t), b = ub.at(t);
        double na = 0.0;
        for (double x : a) na += x * x;
        r.cycle_distance = std::max(r.cycle_distance, euclidean_distance(a, b) / std::max(std::sqrt(na), 1e-300));
    }

    switch (r.kind) {
        case ForcingKind::constant:
            r.passed = r.residual_P <= 1e-6 && r.residual_2P <= 1e-6;
            break;
        case ForcingKind::periodic:
            r.passed = r.residual_P <= 1e-3 && r.residual_2P <= 1e-3 && r.cycle_distance <= 1e-3 &&
                       r.residual_wrong >= 10.0 * r.residual_P;
            break;
        case ForcingKind::quasiperiodic: {
            r.returns = quasiperiodic_return(sa, freqs, r.transient, cfg.quasi_horizon, cfg.quasi_levels, r.period,
                                             cfg.quasi_samples);
            r.returns_decreasing = true;
            for (std::size_t k = 1; k < r.returns.size(); ++k)
                if (!(r.returns[k].distance < r.returns[k - 1].distance)) r.returns_decreasing = false;
            r.passed = r.returns_decreasing && r.cycle_distance <= 1e-3;
            break;
        }
        case ForcingKind::almost_periodic:
            break;
    }
    return r;
}

std::string PeriodicReport::to_text() const {
    std::string out = "experiment = periodic\n";
    out += fmt::format("forcing = {}\n", to_string(kind));
    out += "alpha = " + g17(alpha) + "\n";
    out += "transient = " + g17(transient) + "\n";
    out += "period = " + g17(period) + "\n";
    out += "residual_P = " + g17(residual_P) + "\n";
    out += "residual_2P = " + g17(residual_2P) + "\n";
    out += "residual_0.7P = " + g17(residual_wrong) + "\n";
    out += "cycle_distance = " + g17(cycle_distance) + "\n";
    for (const auto& nr : returns)
        out += fmt::format("near_return_H{} = tau {}, distance {}\n", g17(nr.horizon), g17(nr.tau),
                           g17(nr.distance));
    if (kind == ForcingKind::quasiperiodic) out += fmt::format("returns_decreasing = {}\n", returns_decreasing);
    out += fmt::format("passed = {}\n", passed);
    return out;
}

}  // namespace caos
