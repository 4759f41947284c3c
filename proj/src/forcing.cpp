#include "caos/forcing.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numbers>

#include "caos/errors.hpp"

namespace caos {

Profiles zero_profiles(const Grid& grid) {
    Profiles p;
    for (SurfaceField* s : {&p.gamma, &p.S_a, &p.S_o, &p.F}) {
        *s = SurfaceField(grid);
        fill_neumann_ghosts(*s);
    }
    p.S_o_slopes = std::array<double, 2>{0.0, 0.0};
    p.F_slopes = std::array<double, 2>{0.0, 0.0};
    return p;
}

SurfaceField cos_pi_profile(const Grid& grid, double amplitude) {
    SurfaceField s(grid);
    const int n = grid.ny;
    for (int i = 0; 2 * i <= n; ++i) {
        const double v = amplitude * std::cos(std::numbers::pi * grid.y(i));
        s.ghost_ref(i) = v;
        s.ghost_ref(n - i) = -v;
    }
    if (n % 2 == 0) s.ghost_ref(n / 2) = 0.0;
    fill_neumann_ghosts(s);
    return s;
}

Profiles default_profiles(const ProfileParams& p, const Grid& grid) {
    if (!(p.gamma0 >= 0.0 && p.gamma0 <= 1.0))
        throw ConfigError("gamma0 must lie in [0, 1], got " + std::to_string(p.gamma0));
    Profiles out;
    out.gamma = SurfaceField(grid);
    out.gamma.fill(p.gamma0);
    fill_neumann_ghosts(out.gamma);

    auto affine = [&](double a, double b) {
        SurfaceField s = cos_pi_profile(grid, b);
        for (int i = -1; i <= grid.ny + 1; ++i) s.ghost_ref(i) += a;
        return s;
    };
    out.S_a = affine(p.Aa, p.Ba);
    out.S_o = affine(p.Ao, p.Bo);
    out.F = cos_pi_profile(grid, p.F0);
    // d/dy cos(pi y) = -pi sin(pi y), which vanishes at both ends.
    out.S_o_slopes = std::array<double, 2>{0.0, 0.0};
    out.F_slopes = std::array<double, 2>{0.0, 0.0};
    return out;
}

namespace {

// Second-order one-sided slopes at y = 0 and y = 1.
std::array<double, 2> estimated_slopes(const SurfaceField& s) {
    const Grid& g = s.grid();
    const int n = g.ny;
    return {(-3.0 * s(0) + 4.0 * s(1) - s(2)) / (2.0 * g.dy),
            (3.0 * s(n) - 4.0 * s(n - 1) + s(n - 2)) / (2.0 * g.dy)};
}

// A smooth profile with zero end slopes leaves an O(h^2) one-sided residual;
// allow for it when only samples are known.
double slope_tolerance(const SurfaceField& s) {
    const double h = s.grid().dy;
    return 1e-10 + 4.0 * h * h * std::max(1.0, sup_norm(s)) * std::pow(std::numbers::pi, 3);
}

ProfileCheck slope_check(const std::string& name, const SurfaceField& s,
                         const std::optional<std::array<double, 2>>& exact) {
    ProfileCheck c;
    c.name = name;
    const auto slopes = exact ? *exact : estimated_slopes(s);
    const double tol = exact ? 1e-10 : slope_tolerance(s);
    c.passed = std::abs(slopes[0]) <= tol && std::abs(slopes[1]) <= tol;
    c.detail = "end slopes " + std::to_string(slopes[0]) + ", " + std::to_string(slopes[1]) +
               (exact ? " (exact)" : " (estimated)");
    return c;
}

}  // namespace

ValidationReport validate_profiles(const Profiles& p) {
    ValidationReport r;
    const auto so = slope_check("compatibility S_o", p.S_o, p.S_o_slopes);
    const auto fl = slope_check("compatibility F", p.F, p.F_slopes);
    r.checks.push_back(so);
    r.checks.push_back(fl);
    r.compatibility = so.passed && fl.passed;

    const double meanF = integrate(p.F);
    r.zero_mean_flux = std::abs(meanF) <= 1e-12;
    r.checks.push_back({"zero-mean freshwater flux", r.zero_mean_flux,
                        "integral of F = " + std::to_string(meanF)});

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < p.gamma.size(); ++i) {
        lo = std::min(lo, p.gamma(i));
        hi = std::max(hi, p.gamma(i));
    }
    r.gamma_inf = lo;
    r.gamma_sup = hi;
    r.gamma_in_range = lo >= 0.0 && hi <= 1.0;
    r.gamma_below_one = hi < 1.0;
    r.gamma_above_zero = lo > 0.0;
    r.checks.push_back({"gamma in [0,1]", r.gamma_in_range,
                        "inf " + std::to_string(lo) + ", sup " + std::to_string(hi)});
    r.checks.push_back({"gamma strictly below 1", r.gamma_below_one, "sup " + std::to_string(hi)});
    r.checks.push_back({"gamma strictly above 0", r.gamma_above_zero, "inf " + std::to_string(lo)});
    return r;
}

bool ValidationReport::dissipativity_ok() const {
    return compatibility && zero_mean_flux && gamma_in_range && (gamma_below_one || gamma_above_zero);
}

std::vector<std::string> ValidationReport::warnings() const {
    std::vector<std::string> w;
    if (gamma_in_range && !gamma_below_one)
        w.emplace_back("gamma reaches 1: strict bound gamma < 1 fails, alpha0 = (1-|gamma|)/(1+|gamma|) "
                       "vanishes; only the inf-gamma branch of the feedback estimate applies");
    if (gamma_in_range && !gamma_above_zero && gamma_below_one)
        w.emplace_back("gamma touches 0: only the sup-gamma branch of the feedback estimate applies");
    return w;
}

std::vector<std::string> ValidationReport::failures() const {
    std::vector<std::string> f;
    if (!compatibility) f.emplace_back("compatibility condition S_o'(0)=S_o'(1)=F'(0)=F'(1)=0");
    if (!zero_mean_flux) f.emplace_back("zero-mean freshwater flux");
    if (!gamma_in_range) f.emplace_back("0 <= gamma <= 1");
    else if (!gamma_below_one && !gamma_above_zero)
        f.emplace_back("0 < gamma <= 1 or 0 <= gamma < 1");
    return f;
}

// --------------------------------------------------------------- forcing

const char* to_string(ForcingKind kind) {
    switch (kind) {
        case ForcingKind::constant: return "constant";
        case ForcingKind::periodic: return "periodic";
        case ForcingKind::quasiperiodic: return "quasiperiodic";
        case ForcingKind::almost_periodic: return "almost_periodic";
    }
    return "?";
}

ForcingKind parse_forcing_kind(const std::string& s) {
    if (s == "constant") return ForcingKind::constant;
    if (s == "periodic") return ForcingKind::periodic;
    if (s == "quasiperiodic") return ForcingKind::quasiperiodic;
    if (s == "almost_periodic") return ForcingKind::almost_periodic;
    throw ConfigError("unknown forcing kind '" + s + "'");
}

bool is_irrational_ratio(double r, int max_denominator, double tol) {
    for (int q = 1; q <= max_denominator; ++q) {
        const double p = std::round(r * q);
        if (std::abs(r - p / q) <= tol) return false;
    }
    return true;
}

ForcingSpec::ForcingSpec(const Grid& grid, ForcingKind kind, std::vector<ForcingMode> modes)
    : grid_(grid), kind_(kind), modes_(std::move(modes)) {
    for (const auto& m : modes_) {
        if (!(m.profile.grid() == grid)) throw ConfigError("forcing mode profile on a different grid");
        if (!(m.omega >= 0.0) || !std::isfinite(m.omega))
            throw ConfigError("forcing frequencies must be finite and >= 0");
    }
    const auto freqs = frequencies();
    switch (kind_) {
        case ForcingKind::constant:
            if (!freqs.empty()) throw ConfigError("constant forcing must have all frequencies 0");
            break;
        case ForcingKind::periodic:
            if (freqs.size() != 1)
                throw ConfigError("periodic forcing needs exactly one distinct nonzero frequency");
            break;
        case ForcingKind::quasiperiodic: {
            if (freqs.size() < 2)
                throw ConfigError("quasiperiodic forcing needs at least two nonzero frequencies");
            bool irrational = false;
            for (std::size_t a = 0; a < freqs.size() && !irrational; ++a)
                for (std::size_t b = a + 1; b < freqs.size() && !irrational; ++b)
                    irrational = is_irrational_ratio(freqs[b] / freqs[a]);
            if (!irrational)
                throw ConfigError("quasiperiodic forcing needs a frequency pair with irrational ratio");
            break;
        }
        case ForcingKind::almost_periodic:
            if (modes_.size() < 3) throw ConfigError("almost periodic forcing needs at least three modes");
            break;
    }
}

ForcingSpec ForcingSpec::none(const Grid& grid) { return ForcingSpec(grid, ForcingKind::constant, {}); }

double ForcingSpec::uniform_bound() const {
    double b = 0.0;
    for (const auto& m : modes_) b += l2_norm(m.profile);
    return b;
}

std::vector<double> ForcingSpec::frequencies() const {
    std::vector<double> f;
    for (const auto& m : modes_)
        if (m.omega > 0.0) f.push_back(m.omega);
    std::sort(f.begin(), f.end());
    f.erase(std::unique(f.begin(), f.end()), f.end());
    return f;
}

SurfaceField eval_forcing(const ForcingSpec& spec, double t) {
    SurfaceField out(spec.grid());
    for (const auto& m : spec.modes()) {
        const double c = std::cos(m.omega * t + m.phase);
        for (int i = 0; i <= spec.grid().ny; ++i) out.ghost_ref(i) += c * m.profile(i);
    }
    fill_neumann_ghosts(out);
    return out;
}

std::optional<double> forcing_period(const ForcingSpec& spec) {
    if (spec.kind() != ForcingKind::periodic) return std::nullopt;
    return 2.0 * std::numbers::pi / spec.frequencies().front();
}

}  // namespace caos
