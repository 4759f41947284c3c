#include "caos/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "caos/errors.hpp"

namespace caos {

double energy_weight(const PhysParams& p) { return 2.0 * p.Pr * p.Ra * p.Ra * kLambda1; }

EnergyReport energy_report(const State& s, const PhysParams& params) {
    EnergyReport r;
    r.t = s.t;
    r.l2_theta = l2_norm(s.theta);
    r.l2_q = l2_norm(s.q);
    r.l2_T = l2_norm(s.T);
    r.l2_S = l2_norm(s.S);
    r.h1_theta = h1_seminorm(s.theta);
    r.h1_q = h1_seminorm(s.q);
    r.h1_T = h1_seminorm(s.T);
    r.h1_S = h1_seminorm(s.S);
    r.trace_T = surface_l2_norm(surface_trace(s.T));
    r.E = r.l2_q * r.l2_q +
          energy_weight(params) * (r.l2_theta * r.l2_theta + r.l2_T * r.l2_T + r.l2_S * r.l2_S);
    return r;
}

DiffReport state_difference(const State& a, const State& b, const PhysParams& params) {
    if (!(a.grid() == b.grid())) throw ContractViolation("state_difference: grid mismatch");
    const SurfaceField dth = a.theta - b.theta;
    const OceanField dq = a.q - b.q;
    const OceanField dT = a.T - b.T;
    const OceanField dS = a.S - b.S;
    auto sq = [](double x) { return x * x; };
    DiffReport r;
    r.t = a.t;
    r.D = sq(l2_norm(dq)) + energy_weight(params) * (sq(l2_norm(dth)) + sq(l2_norm(dT)) + sq(l2_norm(dS)));
    r.D1 = r.D + sq(h1_seminorm(dth)) + sq(h1_seminorm(dq)) + sq(surface_l2_norm(surface_trace(dT))) +
           sq(h1_seminorm(dT)) + sq(h1_seminorm(dS));
    return r;
}

std::vector<double> state_observable(const State& s, const PhysParams& params) {
    const Grid& g = s.grid();
    const double cw = std::sqrt(energy_weight(params));
    std::vector<double> u;
    u.reserve(static_cast<std::size_t>(g.ny + 1) * (1 + 3 * (g.nz + 1)));
    for (int i = 0; i <= g.ny; ++i) u.push_back(cw * std::sqrt(g.wy(i)) * s.theta(i));
    for (const OceanField* f : {&s.q, &s.T, &s.S}) {
        const double c = f == &s.q ? 1.0 : cw;
        for (int i = 0; i <= g.ny; ++i)
            for (int j = 0; j <= g.nz; ++j) u.push_back(c * std::sqrt(g.wy(i) * g.wz(j)) * (*f)(i, j));
    }
    return u;
}

// ------------------------------------------------------------ feedback bound

double FeedbackBound::at(double t) const { return at(t, trace_constant); }

double FeedbackBound::at(double t, double c) const {
    return std::exp(-alpha1 * (t - t0)) * initial + (data_no_flux + c * flux_per_C) / (2.0 * alpha1);
}

FeedbackBound make_feedback_bound(const PhysParams& params, const Profiles& profiles,
                                  const ForcingSpec& forcing, const EnergyReport& r0,
                                  double trace_constant) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (int i = 0; i < profiles.gamma.size(); ++i) {
        lo = std::min(lo, profiles.gamma(i));
        hi = std::max(hi, std::abs(profiles.gamma(i)));
    }
    FeedbackBound b;
    if (hi < 1.0 && lo >= 0.0) {
        b.branch = FeedbackBranch::sup_gamma;
        b.alpha0 = (1.0 - hi) / (1.0 + hi);
    } else if (lo > 0.0 && hi <= 1.0) {
        b.branch = FeedbackBranch::inf_gamma;
        b.alpha0 = lo / 3.0;
    } else {
        throw HypothesisError("feedback bound needs 0 <= gamma < 1 or 0 < gamma <= 1 (inf " +
                              std::to_string(lo) + ", sup " + std::to_string(hi) + ")");
    }
    b.alpha1_terms = {params.Pr * kLambda1 / 4.0, b.alpha0 / 8.0, 1.0 / 8.0, kLambdaBar1 / 8.0};
    b.alpha1 = *std::min_element(b.alpha1_terms.begin(), b.alpha1_terms.end());
    b.t0 = r0.t;
    auto sq = [](double x) { return x * x; };
    b.initial = sq(r0.l2_q) / energy_weight(params) + sq(r0.l2_theta) + sq(r0.l2_T) + sq(r0.l2_S);
    b.data_no_flux = (sq(params.a) + 1.25 * sq(l2_norm(profiles.S_o)) + sq(l2_norm(profiles.S_a)) +
                      sq(forcing.uniform_bound())) /
                     b.alpha0;
    b.flux_per_C = 2.0 * (1.0 + kLambdaBar1) * sq(l2_norm(profiles.F));
    b.trace_constant = trace_constant;
    return b;
}

double feedback_bound(const PhysParams& params, const Profiles& profiles, const ForcingSpec& forcing,
                      const EnergyReport& report0, double t, double trace_constant) {
    return make_feedback_bound(params, profiles, forcing, report0, trace_constant).at(t);
}

std::optional<double> required_trace_constant(const FeedbackBound& bound, std::span<const double> t,
                                              std::span<const double> theta_sq) {
    double need = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        const double excess = theta_sq[k] - bound.at(t[k], 0.0);
        if (excess <= 0.0) continue;
        if (bound.flux_per_C <= 0.0) return std::nullopt;
        need = std::max(need, 2.0 * bound.alpha1 * excess / bound.flux_per_C);
    }
    return need;
}

// ----------------------------------------------------------------- fitting

FitResult fit_decay_rate(std::span<const double> t, std::span<const double> D, double t_start,
                         double t_end, double discard_fraction) {
    if (t.size() != D.size()) throw ContractViolation("fit_decay_rate: series lengths differ");
    const double from = t_start + discard_fraction * (t_end - t_start);
    std::vector<double> xs, ys;
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (t[k] < from || t[k] > t_end) continue;
        if (!(D[k] > 0.0)) break;
        xs.push_back(t[k]);
        ys.push_back(std::log(D[k]));
    }
    if (xs.size() < 8)
        throw InsufficientDataError("fit_decay_rate needs at least 8 positive samples in the window, got " +
                                    std::to_string(xs.size()));
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        mx += xs[k];
        my += ys[k];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        sxx += (xs[k] - mx) * (xs[k] - mx);
        sxy += (xs[k] - mx) * (ys[k] - my);
        syy += (ys[k] - my) * (ys[k] - my);
    }
    FitResult r;
    const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
    r.alpha = -slope;
    r.intercept = my - slope * mx;
    double ss_res = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double e = ys[k] - (r.intercept + slope * xs[k]);
        ss_res += e * e;
    }
    // A flat series is fitted perfectly by a zero slope.
    r.r2 = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
    r.t_start = xs.front();
    r.t_end = xs.back();
    r.samples = static_cast<int>(xs.size());
    return r;
}

// ------------------------------------------------------------- periodicity

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ContractViolation("euclidean_distance: size mismatch");
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return std::sqrt(s);
}

namespace {

double euclidean_norm(std::span<const double> a) {
    double s = 0.0;
    for (double x : a) s += x * x;
    return std::sqrt(s);
}

}  // namespace

double detect_period(const Sampler& u, double period, double t0, int m, double floor) {
    if (!(period > 0.0)) throw ContractViolation("detect_period: period must be positive");
    if (m < 1) throw ContractViolation("detect_period: need at least one phase");
    double worst = 0.0;
    for (int k = 0; k < m; ++k) {
        const double s = t0 + period * k / m;
        const auto a = u(s);
        const auto b = u(s + period);
        worst = std::max(worst, euclidean_distance(b, a) / std::max(euclidean_norm(a), floor));
    }
    return worst;
}

std::vector<NearReturn> quasiperiodic_return(const Sampler& u, std::span<const double> omegas, double t0,
                                             double base_horizon, int levels, double window, int m) {
    std::vector<double> w;
    for (double o : omegas)
        if (o > 0.0) w.push_back(o);
    if (w.empty()) throw ContractViolation("quasiperiodic_return: no positive frequency");
    const double max_h = base_horizon * std::pow(2.0, levels - 1);
    constexpr double two_pi = 2.0 * std::numbers::pi;

    double w2 = 0.0;
    for (double o : w) w2 += o * o;
    std::vector<double> taus;
    for (double base : w) {
        for (int k = 1; two_pi * k / base <= max_h * (1.0 + 1e-12); ++k) {
            const double guess = two_pi * k / base;
            double num = 0.0;
            for (double o : w) num += o * std::round(o * guess / two_pi);
            const double tau = two_pi * num / w2;
            if (tau > 0.0 && tau <= max_h * (1.0 + 1e-12)) taus.push_back(tau);
        }
    }
    std::sort(taus.begin(), taus.end());
    taus.erase(std::unique(taus.begin(), taus.end(),
                           [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, b); }),
               taus.end());

    std::vector<std::vector<double>> base_samples;
    for (int k = 0; k <= m; ++k) base_samples.push_back(u(t0 + window * k / std::max(m, 1)));

    std::vector<std::pair<double, double>> scored;
    for (double tau : taus) {
        double sup = 0.0;
        for (int k = 0; k <= m; ++k) {
            const double t = t0 + window * k / std::max(m, 1);
            sup = std::max(sup, euclidean_distance(u(t + tau), base_samples[static_cast<std::size_t>(k)]));
        }
        scored.emplace_back(tau, sup);
    }

    std::vector<NearReturn> out;
    for (int l = 0; l < levels; ++l) {
        NearReturn best;
        best.horizon = base_horizon * std::pow(2.0, l);
        best.distance = std::numeric_limits<double>::infinity();
        for (const auto& [tau, d] : scored)
            if (tau <= best.horizon * (1.0 + 1e-12) && d < best.distance) {
                best.distance = d;
                best.tau = tau;
            }
        out.push_back(best);
    }
    return out;
}

std::optional<double> absorbing_entry(std::span<const EnergyReport> series, double bound) {
    if (series.empty()) return std::nullopt;
    std::size_t k = series.size();
    while (k > 0 && series[k - 1].E <= bound) --k;
    if (k == series.size()) return std::nullopt;
    return series[k].t;
}

// ------------------------------------------------------ sampled trajectory

SampledTrajectory::SampledTrajectory(double t_first, double spacing) : t_first_(t_first), spacing_(spacing) {
    if (!(spacing > 0.0)) throw ContractViolation("SampledTrajectory: spacing must be positive");
}

void SampledTrajectory::push(std::vector<double> sample) {
    if (!samples_.empty() && sample.size() != samples_.front().size())
        throw ContractViolation("SampledTrajectory: sample size changed");
    samples_.push_back(std::move(sample));
}

double SampledTrajectory::t_last() const {
    return t_first_ + spacing_ * static_cast<double>(samples_.size() > 0 ? samples_.size() - 1 : 0);
}

std::vector<double> SampledTrajectory::at(double t) const {
    const double x = (t - t_first_) / spacing_;
    const double last = static_cast<double>(samples_.size()) - 1.0;
    if (samples_.empty() || x < -1e-9 || x > last + 1e-9)
        throw ContractViolation("SampledTrajectory: time " + std::to_string(t) + " outside [" +
                                std::to_string(t_first_) + ", " + std::to_string(t_last()) + "]");
    const double xr = std::round(x);
    if (std::abs(x - xr) <= 1e-9) return samples_[static_cast<std::size_t>(xr)];

    const auto n = static_cast<long>(samples_.size());
    const long k = std::clamp(static_cast<long>(std::floor(x)), 0L, n - 2);
    const double s = x - static_cast<double>(k);
    auto sample = [&](long idx) -> const std::vector<double>& {
        return samples_[static_cast<std::size_t>(std::clamp(idx, 0L, n - 1))];
    };
    const auto& p0 = sample(k - 1);
    const auto& p1 = sample(k);
    const auto& p2 = sample(k + 1);
    const auto& p3 = sample(k + 2);
    // Catmull-Rom; at the ends the missing neighbour degrades it to
    // one-sided Hermite.
    std::vector<double> out(p1.size());
    const double s2 = s * s, s3 = s2 * s;
    for (std::size_t c = 0; c < out.size(); ++c) {
        const double m1 = k > 0 ? 0.5 * (p2[c] - p0[c]) : p2[c] - p1[c];
        const double m2 = k + 2 < n ? 0.5 * (p3[c] - p1[c]) : p2[c] - p1[c];
        out[c] = (2 * s3 - 3 * s2 + 1) * p1[c] + (s3 - 2 * s2 + s) * m1 + (-2 * s3 + 3 * s2) * p2[c] +
                 (s3 - s2) * m2;
    }
    return out;
}

Sampler SampledTrajectory::sampler() const {
    return [this](double t) { return at(t); };
}

}  // namespace caos
