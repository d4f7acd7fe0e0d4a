#pragma once

#include <optional>
#include <vector>

#include "dyon/field.hpp"
#include "dyon/integrator.hpp"
#include "dyon/kernels.hpp"
#include "dyon/params.hpp"
#include "dyon/profile.hpp"

namespace dyon {

enum class Classification { Set1, Set2, Set3Candidate };

const char* to_string(Classification c);

struct TrajectoryPoint {
    double r = 0;
    double value = 0;
    double derivative = 0;
    double deviation = 0;  // value - offset (1 for f and h)
};

struct ShootOutcome {
    Field field = Field::f;
    double shoot_param = 0;
    Classification classification = Classification::Set3Candidate;
    double event_radius = 0;
    // Samples at the frozen grid nodes up to the event radius.
    std::vector<TrajectoryPoint> trajectory;
    // Smallest value of the SET1 (derivative-band) and SET2 (value-band)
    // event functions seen before termination.
    double derivative_margin = 0;
    double value_margin = 0;
};

struct ShootOptions {
    IntegratorOptions integrator;
    double event_tol = 1e-10;
};

// Sign of admissible shooting parameters: C, E < 0; the others > 0.
double param_sign(Field fd);

ShootOutcome shoot(Field fd, double param, const FieldProfile& frozen, const DerivedConstants& c, double r_max,
                   const ShootOptions& opt = {});

// Classifications for many parameters at once (independent shots).
std::vector<Classification> classify_sweep(Field fd, const std::vector<double>& params, const FieldProfile& frozen,
                                           const DerivedConstants& c, double r_max, Exec exec = Exec::Parallel,
                                           const ShootOptions& opt = {});

enum class BisectStatus { Converged, NoDichotomy };

struct BisectResult {
    double param_lo = 0;
    double param_hi = 0;
    double param_star = 0;
    int iterations = 0;
    std::vector<double> widths;  // bracket width after each iteration, widths[0] initial
    BisectStatus status = BisectStatus::Converged;
    ShootOutcome outcome_star;
    ShootOutcome outcome_lo;
    ShootOutcome outcome_hi;
};

// Bisection on the classification; tol is absolute on the parameter
// (0 runs to machine resolution).
BisectResult bisect(Field fd, double lo, double hi, const FieldProfile& frozen, const DerivedConstants& c,
                    double r_max, double tol, const ShootOptions& opt = {});

struct Bracket {
    double lo = 0;
    double hi = 0;
    bool degenerate = false;  // exact zero solution, lo == hi == 0
};

struct BracketOptions {
    double start = 1.0;  // |param| of the first probe
    double ratio = 2.0;  // geometric expansion factor
    int max_doublings = 60;
};

Bracket auto_bracket(Field fd, const FieldProfile& frozen, const DerivedConstants& c, double r_max,
                     const BracketOptions& bopt = {}, const ShootOptions& opt = {});

// True when the field's exact solution is identically zero (A0 = 0 with the
// coupled partner identically zero).
bool zero_solution(Field fd, const FieldProfile& frozen, const DerivedConstants& c);

struct FieldSolution {
    std::vector<double> value;
    std::vector<double> deriv;
    double param = 0;
    double r_match = 0;       // start of the finite-difference tail
    int bisect_iterations = 0;
};

struct FieldSolveOptions {
    double warm_start = 0;   // previous |param|, 0 for a cold start
    double match_tol = 1e-9; // relative spread of the final bracket trajectories
    ShootOptions shoot;
};

// auto_bracket + bisect + tail completion onto the frozen profile's grid.
FieldSolution solve_field(Field fd, const FieldProfile& frozen, const DerivedConstants& c,
                          const FieldSolveOptions& opt = {});

// Characteristic size of a field, used for relative tolerances.
double field_scale(Field fd, const DerivedConstants& c);

}  // namespace dyon
