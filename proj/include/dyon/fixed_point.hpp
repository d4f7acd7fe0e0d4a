#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "dyon/errors.hpp"
#include "dyon/kernels.hpp"
#include "dyon/params.hpp"
#include "dyon/profile.hpp"

namespace dyon {

// sup over the grid of w(r)(|d_rho| + |d_A| + |d_Phi|), w = r^-alpha (1 + r^alpha).
double weighted_norm(const std::vector<double>& r, const std::vector<double>& d_rho, const std::vector<double>& d_A,
                     const std::vector<double>& d_Phi, double alpha, Exec exec = Exec::Parallel);

struct IterationRecord {
    double residual = 0;                          // weighted norm of F(x) - x
    std::array<double, kFieldCount> field_sup{};  // sup |F(x) - x| per field
    std::array<double, kFieldCount> params{};     // accepted shooting parameters
    std::array<double, kFieldCount> r_match{};    // start of each finite-difference tail
    std::string step;                             // "damped", "anderson" or "restart"
};

struct FixedPointTrace {
    std::vector<IterationRecord> iterations;
    bool converged = false;
    double norm_alpha = 0;
    double damping = 0;
    int anderson_depth = 0;
};

struct SolveOptions {
    std::optional<double> alpha;
    double fp_tol = 1e-8;
    int max_iters = 200;
    double damping = 0.7;
    std::size_t grid_n = 2000;
    std::optional<double> r_start;
    std::optional<double> r_max;
    double grid_scale = 3.0;
    // History depth of the Anderson extrapolation on top of damping (0: damping only).
    int anderson_depth = 8;
    // Allowed B - A deficit when checking the B >= A precondition.
    double precondition_tol = 1e-6;
};

struct StepInfo {
    std::array<double, kFieldCount> r_match{};
    std::array<int, kFieldCount> bisect_iterations{};
};

// Re-solves the six fields in the order f, B, sigma, h, rho, A, each from the
// latest values of the others. Throws PreconditionViolation when B < A.
FieldProfile schauder_step(const FieldProfile& profile, const DerivedConstants& c, StepInfo* info = nullptr,
                           double precondition_tol = 1e-6);

FieldProfile initial_guess(const DerivedConstants& c, const std::vector<double>& grid);

std::vector<double> solver_grid(const DerivedConstants& c, const SolveOptions& opt);

struct SolveResult {
    FieldProfile profile;
    FixedPointTrace trace;
    DerivedConstants consts;
};

class NotConvergedError : public Error {
public:
    NotConvergedError(const std::string& msg, FixedPointTrace trace, FieldProfile last)
        : Error(ErrorKind::NotConverged, msg), trace_(std::move(trace)), last_(std::move(last)) {}
    const FixedPointTrace& trace() const { return trace_; }
    const FieldProfile& last() const { return last_; }

private:
    FixedPointTrace trace_;
    FieldProfile last_;
};

SolveResult solve_dyon(const Parameters& params, const SolveOptions& opt = {});

}  // namespace dyon
