#pragma once

#include <cstddef>

namespace dyon {

enum class Exec { Serial, Parallel };

namespace kernels {

// sup_i w(r_i) (|a_i| + |b_i| + |c_i|) with w = r^-alpha (1 + r^alpha).
double weighted_sup(const double* r, const double* a, const double* b, const double* c, std::size_t n,
                    double alpha, Exec exec);

struct MaxAbs {
    double value = 0;
    std::size_t index = 0;  // first index attaining the maximum
};

MaxAbs max_abs_diff(const double* a, const double* b, std::size_t n, Exec exec);

}  // namespace kernels
}  // namespace dyon
