#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <sstream>

#include "dyon/errors.hpp"

namespace dyon {

struct IntegratorOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double h_init = 0;  // 0: pick from the start radius
    double h_max = 0.25;
    double h_min_rel = 1e-14;
    std::size_t max_steps = 5'000'000;
};

// Continuous extension of one accepted Dormand-Prince step.
template <std::size_t N>
struct DenseStep {
    double r0 = 0, h = 0;
    std::array<double, N> c1{}, c2{}, c3{}, c4{}, c5{};

    double r1() const { return r0 + h; }

    std::array<double, N> eval(double r) const {
        const double t = (r - r0) / h;
        const double t1 = 1.0 - t;
        std::array<double, N> y;
        for (std::size_t i = 0; i < N; ++i) y[i] = c1[i] + t * (c2[i] + t1 * (c3[i] + t * (c4[i] + t1 * c5[i])));
        return y;
    }
};

// Adaptive Dormand-Prince 5(4) from r0 towards r1. After every accepted step
// `on_step(dense)` is called; returning false stops the integration.
template <std::size_t N, class Rhs, class OnStep>
void integrate_dp45(Rhs&& rhs, double r0, double r1, std::array<double, N> y, const IntegratorOptions& opt,
                    OnStep&& on_step) {
    using V = std::array<double, N>;
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                     a76 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                     e6 = 22.0 / 525, e7 = -1.0 / 40;
    constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                     d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                     d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

    double r = r0;
    double h = opt.h_init > 0 ? opt.h_init : 1e-2 * std::max(r0, 1e-8);
    V k1 = rhs(r, y), k2, k3, k4, k5, k6, k7, yt, ynew;
    std::size_t steps = 0;
    while (r < r1) {
        if (++steps > opt.max_steps) throw Error(ErrorKind::IntegratorStall, "step budget exhausted");
        h = std::min({h, opt.h_max, r1 - r});
        if (h < opt.h_min_rel * std::max(std::abs(r), 1.0)) {
            std::ostringstream os;
            os << "step size underflow at r = " << r;
            throw Error(ErrorKind::IntegratorStall, os.str());
        }
        for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + h * a21 * k1[i];
        k2 = rhs(r + c2 * h, yt);
        for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        k3 = rhs(r + c3 * h, yt);
        for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        k4 = rhs(r + c4 * h, yt);
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        k5 = rhs(r + c5 * h, yt);
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        const double rn = (h == r1 - r) ? r1 : r + h;
        k6 = rhs(rn, yt);
        for (std::size_t i = 0; i < N; ++i)
            ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
        k7 = rhs(rn, ynew);

        double err = 0;
        bool finite = true;
        for (std::size_t i = 0; i < N; ++i) {
            const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err += (ei / sc) * (ei / sc);
            if (!std::isfinite(ynew[i])) finite = false;
        }
        err = finite ? std::sqrt(err / N) : 1e10;
        if (err <= 1.0) {
            DenseStep<N> ds;
            ds.r0 = r;
            ds.h = rn - r;
            for (std::size_t i = 0; i < N; ++i) {
                const double ydiff = ynew[i] - y[i];
                const double bspl = ds.h * k1[i] - ydiff;
                ds.c1[i] = y[i];
                ds.c2[i] = ydiff;
                ds.c3[i] = bspl;
                ds.c4[i] = ydiff - ds.h * k7[i] - bspl;
                ds.c5[i] = ds.h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
            }
            r = rn;
            y = ynew;
            k1 = k7;
            if (!on_step(ds)) return;
            const double fac = err > 0 ? 0.9 * std::pow(err, -0.2) : 10.0;
            h *= std::clamp(fac, 0.2, 10.0);
        } else {
            const double fac = finite ? 0.9 * std::pow(err, -0.2) : 0.1;
            h *= std::clamp(fac, 0.1, 0.9);
        }
    }
}

// Root of g on [a, b] with g(a) >= 0 > g(b), by Illinois regula falsi.
template <class G>
double locate_crossing(G&& g, double a, double b, double ga, double gb, double tol = 1e-10) {
    int side = 0;
    for (int it = 0; it < 200 && (b - a) > tol; ++it) {
        double c = (a * gb - b * ga) / (gb - ga);
        if (!(c > a && c < b)) c = 0.5 * (a + b);
        const double gc = g(c);
        if (gc >= 0) {
            a = c;
            ga = gc;
            if (side == -1) gb *= 0.5;
            side = -1;
        } else {
            b = c;
            gb = gc;
            if (side == 1) ga *= 0.5;
            side = 1;
        }
    }
    return b;
}

}  // namespace dyon
