#pragma once

#include <array>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "caos/model.hpp"

namespace caos {

/// Optimal Poincare constant for zero-Dirichlet functions on the unit
/// square, ||v||^2 <= lambda1 ||grad v||^2 (first eigenvalue of -Lap is 2 pi^2).
inline constexpr double kLambda1 = 1.0 / (2.0 * std::numbers::pi * std::numbers::pi);
/// Same for zero-mean functions with Neumann data (first eigenvalue pi^2).
inline constexpr double kLambdaBar1 = 1.0 / (std::numbers::pi * std::numbers::pi);

/// Weight 2 Pr Ra^2 lambda1 of the tracer norms in the energy functional.
double energy_weight(const PhysParams& p);

struct EnergyReport {
    double t = 0.0;
    double l2_theta = 0.0, l2_q = 0.0, l2_T = 0.0, l2_S = 0.0;
    double h1_theta = 0.0, h1_q = 0.0, h1_T = 0.0, h1_S = 0.0;
    double trace_T = 0.0;  // ||T(., 1)||
    double E = 0.0;        // ||q||^2 + 2 Pr Ra^2 lambda1 (||theta||^2 + ||T||^2 + ||S||^2)
};

EnergyReport energy_report(const State& state, const PhysParams& params);

/// Distance functionals between two states on the same grid:
///   D  = ||dq||^2 + 2 Pr Ra^2 lambda1 (||dtheta||^2 + ||dT||^2 + ||dS||^2)
///   D1 = D + ||dtheta_y||^2 + ||grad dq||^2 + ||dT(., 1)||^2
///          + ||grad dT||^2 + ||grad dS||^2
struct DiffReport {
    double t = 0.0;
    double D = 0.0;
    double D1 = 0.0;
};

DiffReport state_difference(const State& a, const State& b, const PhysParams& params);

/// Nodal state packed with square-root quadrature and energy weights, so
/// that |u(a) - u(b)|^2 = D(a, b) in the Euclidean norm.
std::vector<double> state_observable(const State& state, const PhysParams& params);

enum class FeedbackBranch {
    sup_gamma,  // 0 <= gamma < 1: alpha0 = (1 - |gamma|)/(1 + |gamma|)
    inf_gamma   // 0 < gamma <= 1: alpha0 replaced by inf(gamma)/3
};

/// Upper-bound curve for ||theta(t)||^2:
///   e^{-alpha1 t} initial + (1 / 2 alpha1) [ (1/alpha0)(a^2 + 5/4 ||S_o||^2
///   + ||S_a||^2 + ||f||^2) + 2 (1 + lambdaBar1) C ||F||^2 ]
/// with alpha1 = min{Pr lambda1/4, alpha0/8, 1/8, lambdaBar1/8} and
/// initial = ||q0||^2/(2 Pr Ra^2 lambda1) + ||theta0||^2 + ||T0||^2 + ||S0||^2.
struct FeedbackBound {
    FeedbackBranch branch = FeedbackBranch::sup_gamma;
    double alpha0 = 0.0;
    double alpha1 = 0.0;
    std::array<double, 4> alpha1_terms{};  // the four candidates of the min
    double t0 = 0.0;
    double initial = 0.0;
    double data_no_flux = 0.0;  // (1/alpha0)(a^2 + 5/4 ||S_o||^2 + ||S_a||^2 + ||f||^2)
    double flux_per_C = 0.0;    // 2 (1 + lambdaBar1) ||F||^2
    double trace_constant = 2.0;

    double at(double t) const;
    /// The bound with the trace constant C replaced by c.
    double at(double t, double c) const;
};

/// Throws HypothesisError when neither sup gamma < 1 nor inf gamma > 0.
FeedbackBound make_feedback_bound(const PhysParams& params, const Profiles& profiles,
                                  const ForcingSpec& forcing, const EnergyReport& report0,
                                  double trace_constant = 2.0);

double feedback_bound(const PhysParams& params, const Profiles& profiles, const ForcingSpec& forcing,
                      const EnergyReport& report0, double t, double trace_constant = 2.0);

/// Smallest trace constant for which the bound dominates the measured
/// ||theta||^2 samples; nullopt when no constant can (zero flux and
/// violated) and 0 when any C works.
std::optional<double> required_trace_constant(const FeedbackBound& bound, std::span<const double> t,
                                              std::span<const double> theta_sq);

struct FitResult {
    double alpha = 0.0;  // decay rate, -slope of log D
    double intercept = 0.0;
    double r2 = 0.0;
    double t_start = 0.0;
    double t_end = 0.0;
    int samples = 0;
};

/// Least-squares line through (t, log D) over [t_start, t_end] after
/// discarding the leading `discard_fraction` of the window. Stops at the
/// first non-positive D. Throws InsufficientDataError below 8 samples.
FitResult fit_decay_rate(std::span<const double> t, std::span<const double> D, double t_start,
                         double t_end, double discard_fraction = 0.2);

using Sampler = std::function<std::vector<double>(double)>;

double euclidean_distance(std::span<const double> a, std::span<const double> b);

/// max over m phases s in [t0, t0 + P) of |u(s+P) - u(s)| / max(|u(s)|, floor).
double detect_period(const Sampler& u, double period, double t0, int m, double floor = 1e-300);

struct NearReturn {
    double horizon = 0.0;  // candidate shifts were limited to tau <= horizon
    double tau = 0.0;      // best shift
    double distance = 0.0; // sup over sampled t of |u(t + tau) - u(t)|
};

/// Near-return scan for (quasi)periodic responses. Candidate shifts are
/// least-squares simultaneous approximations tau of multiples of every
/// 2 pi / omega_k; each is scored by the sup over m times t in
/// [t0, t0 + window] of |u(t + tau) - u(t)|. Returns the best candidate for
/// horizons base_horizon * 2^k, k = 0..levels-1.
std::vector<NearReturn> quasiperiodic_return(const Sampler& u, std::span<const double> omegas, double t0,
                                             double base_horizon, int levels, double window, int m);

/// Time of the first sample after which E stays <= bound to the end.
std::optional<double> absorbing_entry(std::span<const EnergyReport> series, double bound);

/// Uniformly sampled vector trajectory with cubic (Catmull-Rom)
/// interpolation between samples; usable as a Sampler.
class SampledTrajectory {
public:
    SampledTrajectory(double t_first, double spacing);
    void push(std::vector<double> sample);
    std::vector<double> at(double t) const;
    double t_first() const { return t_first_; }
    double t_last() const;
    double spacing() const { return spacing_; }
    std::size_t size() const { return samples_.size(); }
    Sampler sampler() const;

private:
    double t_first_;
    double spacing_;
    std::vector<std::vector<double>> samples_;
};

}  // namespace caos
