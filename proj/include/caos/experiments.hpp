#pragma once

#include <memory>
#include <string>
#include <vector>

#include "caos/config.hpp"
#include "caos/diagnostics.hpp"

namespace caos {

/// Size of the data entering the absorbing-ball and feedback estimates,
/// sqrt(a^2 + 5/4 ||S_o||^2 + ||S_a||^2 + ||f||^2 + ||F||^2).
double data_norm(const RunConfig& cfg, const Grid& grid);

/// Throws HypothesisError naming each failed hypothesis: compatibility,
/// zero-mean F, a usable gamma branch, and (if `small_data`)
/// data_norm <= cfg.small_data_limit.
void require_dissipative_hypotheses(const RunConfig& cfg, bool small_data);

// ---------------------------------------------------------------- reports

struct ConvergenceReport {
    std::vector<int> grids;
    std::vector<std::array<double, 4>> errors;  // theta, q, T, S per grid
    std::vector<std::array<double, 4>> orders;  // per consecutive grid pair
    double min_order = 0.0;
    bool failed = false;  // some order < 1.5
    std::string to_text() const;
};

/// MMS runs on cfg.convergence_grids with dt = courant / n and salinity
/// projection off. Uses TrigManufactured unless `exact` is given.
ConvergenceReport exp_convergence(const RunConfig& cfg,
                                  std::shared_ptr<const ManufacturedSolution> exact = nullptr);

struct StabilityReport {
    std::vector<double> scales{1.0, 0.5, 0.25};
    double delta_f_norm = 0.0;           // ||delta f|| at s = 1
    std::vector<double> sup_sqrt_D;      // per scale, over [0, horizon]
    std::vector<double> ratios;          // sup sqrt D / (s ||delta f||)
    double spread = 0.0;                 // (max - min) / max of the ratios
    double horizon = 0.0;
    bool passed = false;                 // spread <= 0.1
    std::string to_text() const;
};

StabilityReport exp_stability(const RunConfig& cfg);

struct DissipativityRun {
    double amplitude = 0.0;
    std::vector<EnergyReport> series;
    double E0 = 0.0;
    std::optional<double> first_hit;   // first sample with E <= B
    std::optional<double> entry;       // absorbing_entry(series, B)
    double max_after_hit = 0.0;        // max E / B after first_hit
    bool feedback_ok = false;          // ||theta||^2 <= bound at every sample
    double feedback_margin = 0.0;      // min over samples of bound - ||theta||^2
    std::optional<double> required_C;  // set when the bound is violated
};

struct DissipativityReport {
    double M2 = 0.0;      // absorbing radius squared
    double bound = 0.0;   // B = 2 M^2
    double E0_span = 0.0; // max E(0) / min E(0)
    FeedbackBound feedback;
    std::vector<DissipativityRun> runs;
    bool entries_ok = false;       // all runs enter and stay below 2B
    bool entry_order_ok = false;   // larger E(0), no earlier first hit
    bool feedback_ok = false;
    bool passed() const { return entries_ok && feedback_ok; }
    std::string to_text() const;
};

/// M^2 = Pr Ra^2 lambda1 / alpha1 [ (1/alpha0)(a^2 + 5/4 ||S_o||^2 + ||S_a||^2
/// + ||f||^2) + 2 (1 + lambdaBar1) C ||F||^2 ].
double absorbing_radius_sq(const RunConfig& cfg, const Grid& grid);

DissipativityReport exp_dissipativity(const RunConfig& cfg);

struct ContractionReport {
    std::vector<double> t, D, D1;
    FitResult fit;
    FitResult fit_gradient;
    bool fit_flagged = false;   // R^2 < 0.9 on either fit
    bool D_nonincreasing = false;   // over the fit window
    bool D1_decreasing = false;     // over the fit window
    bool passed() const;  // alpha > 0, R^2 >= 0.99, D1 decreasing
    std::string to_text() const;
    std::string series_csv() const;
};

ContractionReport exp_contraction(const RunConfig& cfg);

struct PeriodicReport {
    ForcingKind kind = ForcingKind::periodic;
    double alpha = 0.0;       // from the prior contraction fit
    double transient = 0.0;
    double period = 0.0;
    double residual_P = 0.0;
    double residual_2P = 0.0;
    double residual_wrong = 0.0;  // at 0.7 P
    double cycle_distance = 0.0;  // relative gap between the two ICs' cycles
    std::vector<NearReturn> returns;
    bool returns_decreasing = false;
    bool passed = false;
    std::string to_text() const;
};

PeriodicReport exp_periodic_response(const RunConfig& cfg);

}  // namespace caos
