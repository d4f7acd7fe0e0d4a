#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "dyon/kernels.hpp"
#include "dyon/params.hpp"
#include "dyon/profile.hpp"

namespace dyon {

struct CollocationOptions {
    double tol = 1e-10;  // infinity norm of the scaled residual
    int max_iters = 60;
    Exec exec = Exec::Parallel;
};

struct CollocationResult {
    FieldProfile profile;
    int iterations = 0;
    std::vector<double> residual_history;  // infinity norm before each Newton step, then the final one
};

// Global finite-difference discretization of the six equations solved by
// damped Newton. Throws InvalidGrid, SingularJacobian (message names the node)
// or NotConverged.
CollocationResult solve_collocation(const Parameters& params, const std::vector<double>& grid,
                                    const FieldProfile& initial_guess, const CollocationOptions& opt = {});

struct FieldGaps {
    std::array<double, kFieldCount> gap{};
    std::array<double, kFieldCount> radius{};
    double max_gap() const;
};

// Sup-norm gap per field and where it is attained. Throws GridMismatch.
FieldGaps compare(const FieldProfile& a, const FieldProfile& b, Exec exec = Exec::Parallel);

namespace collocation {

using Mat6 = Eigen::Matrix<double, 6, 6>;
using Vec6 = Eigen::Matrix<double, 6, 1>;

// Residual and Jacobian blocks of the discrete system. Block row i couples
// nodes i-1, i, i+1; the first and last rows also reach one node further
// (corner blocks).
struct System {
    std::vector<Vec6> res;
    std::vector<Mat6> lower, diag, upper;
    Mat6 corner_first = Mat6::Zero();  // row 0, node 2
    Mat6 corner_last = Mat6::Zero();   // row n-1, node n-3
};

System assemble(const DerivedConstants& c, const std::vector<double>& r, const std::vector<Vec6>& y, Exec exec);

}  // namespace collocation

}  // namespace dyon
