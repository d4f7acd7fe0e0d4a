#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dyon/params.hpp"
#include "dyon/profile.hpp"

namespace dyon {

struct ClauseResult {
    std::string id;
    int group = 0;  // 1..5 for the qualitative clauses, 0 for origin orders
    bool pass = false;
    double worst_margin = 0;  // >= 0 means the inequality holds outright
    double worst_radius = 0;
    std::string detail;
};

enum class FitStatus { Fitted, InsufficientSignal };
const char* to_string(FitStatus s);

struct DecayFit {
    std::string quantity;  // f, rho, A, h, B-A, sigma
    FitStatus status = FitStatus::Fitted;
    std::string method;    // direct, comparison_ode or bound
    double fitted_rate = 0;
    double predicted_rate = 0;
    double relative_gap = 0;
    double window_lo = 0;
    double window_hi = 0;
    int points = 0;
    bool pass = false;
    // rho only: the exponent quoted inside the decay proof, with its gap
    std::optional<double> alt_predicted_rate;
    std::optional<double> alt_relative_gap;
    // A only: sup of r |A - A0| over the window
    std::optional<double> bound;
};

struct FitWindow {
    double lo_frac = 0.5;
    double hi_frac = 0.9;
};

struct VerificationReport {
    std::vector<ClauseResult> clauses;
    std::vector<DecayFit> decay_fits;
    std::vector<ClauseResult> origin_orders;
    bool overall = false;
};

inline constexpr double kDecayBand = 0.10;
inline constexpr double kOriginBand = 0.15;

std::vector<ClauseResult> check_theorem1(const FieldProfile& p, const DerivedConstants& c, double tol = 1e-6);

// Tail rates over [lo_frac, hi_frac] * r_max. A quantity is read off the
// profile only where it stays above max(1e3 eps, 100 resolution), with
// `resolution` the accuracy the profile was converged to. Below that it is
// rebuilt from its linear comparison equation, seeded at the last radius where
// the profile still resolves it; with no such radius the fit is skipped.
std::vector<DecayFit> fit_decay(const FieldProfile& p, const DerivedConstants& c, FitWindow window = {},
                                double resolution = 1e-8);

// Least-squares decay rate of log|q| against r. Throws Error(Domain) when
// fewer than two usable samples remain.
double fit_log_slope_rate(const std::vector<double>& r, const std::vector<double>& q);

std::vector<ClauseResult> check_origin_orders(const FieldProfile& p, const DerivedConstants& c);

VerificationReport verify(const FieldProfile& p, const DerivedConstants& c, double tol = 1e-6, FitWindow window = {},
                          double resolution = 1e-8);

}  // namespace dyon
