#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "caos/grid.hpp"

namespace caos {

/// Latitudinal profiles entering the surface equation and the top fluxes:
/// ocean fraction gamma(y), shortwave terms S_a(y) and S_o(y), freshwater
/// flux F(y).
struct Profiles {
    SurfaceField gamma;
    SurfaceField S_a;
    SurfaceField S_o;
    SurfaceField F;
    // Exact end-point slopes {y = 0, y = 1} when the profile is known
    // analytically; otherwise validation estimates them from the samples.
    std::optional<std::array<double, 2>> S_o_slopes;
    std::optional<std::array<double, 2>> F_slopes;
};

Profiles zero_profiles(const Grid& grid);

/// Parameters of the default family
///   gamma = gamma0, S_a = Aa + Ba cos(pi y), S_o = Ao + Bo cos(pi y),
///   F = F0 cos(pi y).
struct ProfileParams {
    double gamma0 = 0.5;
    double Aa = 0.0;
    double Ba = 0.0;
    double Ao = 0.0;
    double Bo = 0.0;
    double F0 = 0.0;
};

/// Throws ConfigError when gamma0 lies outside [0, 1].
Profiles default_profiles(const ProfileParams& p, const Grid& grid);

/// cos(pi y) sampled so that the samples are exactly antisymmetric about
/// y = 1/2 (their trapezoidal mean is zero to rounding).
SurfaceField cos_pi_profile(const Grid& grid, double amplitude);

struct ProfileCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ValidationReport {
    std::vector<ProfileCheck> checks;
    bool compatibility = false;   // S_o'(0) = S_o'(1) = F'(0) = F'(1) = 0
    bool zero_mean_flux = false;  // |int F| <= 1e-12
    bool gamma_in_range = false;  // 0 <= gamma <= 1
    bool gamma_below_one = false; // sup gamma < 1
    bool gamma_above_zero = false;// inf gamma > 0
    double gamma_sup = 0.0;
    double gamma_inf = 0.0;

    /// Hypotheses of the absorbing-set estimates: compatibility, zero-mean
    /// flux, and 0 <= gamma < 1 or 0 < gamma <= 1.
    bool dissipativity_ok() const;
    /// Non-fatal notes, e.g. gamma touching 1 so only the inf-gamma branch
    /// of the feedback estimate is available.
    std::vector<std::string> warnings() const;
    /// Names of failed hypotheses.
    std::vector<std::string> failures() const;
};

ValidationReport validate_profiles(const Profiles& p);

enum class ForcingKind { constant, periodic, quasiperiodic, almost_periodic };

const char* to_string(ForcingKind kind);
ForcingKind parse_forcing_kind(const std::string& s);

struct ForcingMode {
    SurfaceField profile;
    double omega = 0.0;
    double phase = 0.0;
};

/// f(y, t) = sum_k g_k(y) cos(omega_k t + phi_k). Immutable after
/// construction; safe to share between simulations.
class ForcingSpec {
public:
    ForcingSpec() = default;
    /// Validates the kind tag against the frequencies; throws ConfigError.
    ForcingSpec(const Grid& grid, ForcingKind kind, std::vector<ForcingMode> modes);

    static ForcingSpec none(const Grid& grid);

    ForcingKind kind() const { return kind_; }
    const std::vector<ForcingMode>& modes() const { return modes_; }
    const Grid& grid() const { return grid_; }

    /// sum_k ||g_k||, an upper bound for sup_t ||f(., t)||.
    double uniform_bound() const;
    /// Distinct nonzero angular frequencies, ascending.
    std::vector<double> frequencies() const;

private:
    Grid grid_{};
    ForcingKind kind_ = ForcingKind::constant;
    std::vector<ForcingMode> modes_;
};

SurfaceField eval_forcing(const ForcingSpec& spec, double t);

/// 2 pi / omega for periodic forcing, nullopt otherwise.
std::optional<double> forcing_period(const ForcingSpec& spec);

/// True when no p/q with q <= max_denominator approximates r within tol.
bool is_irrational_ratio(double r, int max_denominator = 64, double tol = 1e-9);

}  // namespace caos
