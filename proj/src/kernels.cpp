#include "dyon/kernels.hpp"

#include <cmath>
#include <vector>

#include <omp.h>

namespace dyon::kernels {

namespace {

inline double weight(double r, double alpha) {
    const double ra = std::pow(r, alpha);
    return (1.0 + ra) / ra;
}

}  // namespace

double weighted_sup(const double* r, const double* a, const double* b, const double* c, std::size_t n,
                    double alpha, Exec exec) {
    const long long nn = static_cast<long long>(n);
    double best = 0;
    if (exec == Exec::Serial) {
        for (long long i = 0; i < nn; ++i) {
            const double v = weight(r[i], alpha) * (std::abs(a[i]) + std::abs(b[i]) + std::abs(c[i]));
            if (v > best) best = v;
        }
        return best;
    }
#pragma omp parallel for reduction(max : best) schedule(static)
    for (long long i = 0; i < nn; ++i) {
        const double v = weight(r[i], alpha) * (std::abs(a[i]) + std::abs(b[i]) + std::abs(c[i]));
        if (v > best) best = v;
    }
    return best;
}

MaxAbs max_abs_diff(const double* a, const double* b, std::size_t n, Exec exec) {
    MaxAbs out;
    if (exec == Exec::Serial || n == 0) {
        for (std::size_t i = 0; i < n; ++i) {
            const double v = std::abs(a[i] - b[i]);
            if (v > out.value) out = {v, i};
        }
        return out;
    }
    const int nt = omp_get_max_threads();
    std::vector<MaxAbs> part(static_cast<std::size_t>(nt));
    const long long nn = static_cast<long long>(n);
#pragma omp parallel num_threads(nt)
    {
        MaxAbs local;
        bool seen = false;
#pragma omp for schedule(static)
        for (long long i = 0; i < nn; ++i) {
            const double v = std::abs(a[i] - b[i]);
            if (!seen || v > local.value) {
                local = {v, static_cast<std::size_t>(i)};
                seen = true;
            }
        }
        if (!seen) local = {0.0, n};
        part[static_cast<std::size_t>(omp_get_thread_num())] = local;
    }
    // Static chunks are ordered by thread id, so a strict comparison keeps the first index.
    out = {0.0, 0};
    bool any = false;
    for (const auto& p : part) {
        if (p.index >= n) continue;
        if (!any || p.value > out.value) out = p;
        any = true;
    }
    if (out.value == 0.0) out.index = 0;
    return out;
}

}  // namespace dyon::kernels
