#include <doctest.h>

#include <cmath>

#include <Eigen/Sparse>

#include "dyon/errors.hpp"
#include "dyon/fixed_point.hpp"
#include "dyon/shooting.hpp"
#include "dyon/tail.hpp"

using namespace dyon;

namespace {

DerivedConstants acceptance() {
    Parameters p;
    p.A0 = p.B0 = 0.3;
    return derive(p);
}

// rho = rho0, A = A0 everywhere: the f equation decouples into
// f'' = (f^2 - 1) f / r^2 + kappa^2 f.
FieldProfile flat_background(const DerivedConstants& c, std::size_t n = 2000) {
    FieldProfile p = FieldProfile::on_grid(make_grid(default_r_start(c), default_r_max(c), n, 3.0));
    for (std::size_t i = 0; i < p.size(); ++i) {
        p.v(Field::rho)[i] = c.rho0;
        p.v(Field::A)[i] = c.params.A0;
    }
    return p;
}

// Independent finite-difference solve of the decoupled f problem with
// f' = 2 (f - 1)/r + q r / 3 at r0 (regular branch, C eliminated) and
// f' = -kappa f at r_max. Returns C = (f(r0) - 1)/r0^2 - (q/3) ln r0.
double flat_fd_oracle(double kappa, double r0, double r1, int n) {
    const double q = kappa * kappa;
    std::vector<double> r(n);
    // own grid: uniform in ln r + r / 4
    auto x = [](double s) { return std::log(s) + s / 4; };
    const double x0 = x(r0), x1 = x(r1);
    r[0] = r0;
    for (int i = 1; i < n; ++i) {
        const double xt = x0 + (x1 - x0) * i / (n - 1);
        double s = r[i - 1];
        for (int it = 0; it < 60; ++it) s -= (x(s) - xt) / (1 / s + 0.25);
        r[i] = s;
    }
    r[n - 1] = r1;
    Eigen::VectorXd f(n);
    for (int i = 0; i < n; ++i) f[i] = 1 / (1 + q * r[i] * r[i]);

    for (int iter = 0; iter < 50; ++iter) {
        std::vector<Eigen::Triplet<double>> t;
        Eigen::VectorXd res(n);
        {
            const double h1 = r[1] - r[0], h2 = r[2] - r[1];
            const double a = -(2 * h1 + h2) / (h1 * (h1 + h2)), b = (h1 + h2) / (h1 * h2), cc = -h1 / (h2 * (h1 + h2));
            res[0] = a * f[0] + b * f[1] + cc * f[2] - 2 * (f[0] - 1) / r[0] - q * r[0] / 3;
            t.emplace_back(0, 0, a - 2 / r[0]);
            t.emplace_back(0, 1, b);
            t.emplace_back(0, 2, cc);
        }
        for (int i = 1; i < n - 1; ++i) {
            const double hm = r[i] - r[i - 1], hp = r[i + 1] - r[i];
            const double wm = 2 / (hm * (hm + hp)), w0 = -2 / (hm * hp), wp = 2 / (hp * (hm + hp));
            const double fi = f[i];
            res[i] = wm * f[i - 1] + w0 * fi + wp * f[i + 1] - (fi * fi - 1) * fi / (r[i] * r[i]) - q * fi;
            t.emplace_back(i, i - 1, wm);
            t.emplace_back(i, i, w0 - (3 * fi * fi - 1) / (r[i] * r[i]) - q);
            t.emplace_back(i, i + 1, wp);
        }
        {
            const double h1 = r[n - 2] - r[n - 3], h2 = r[n - 1] - r[n - 2];
            const double a = h2 / (h1 * (h1 + h2)), b = -(h1 + h2) / (h1 * h2), cc = (2 * h2 + h1) / (h2 * (h1 + h2));
            res[n - 1] = a * f[n - 3] + b * f[n - 2] + cc * f[n - 1] + kappa * f[n - 1];
            t.emplace_back(n - 1, n - 3, a);
            t.emplace_back(n - 1, n - 2, b);
            t.emplace_back(n - 1, n - 1, cc + kappa);
        }
        Eigen::SparseMatrix<double> J(n, n);
        J.setFromTriplets(t.begin(), t.end());
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(J);
        const Eigen::VectorXd step = lu.solve(-res);
        f += step;
        if (step.lpNorm<Eigen::Infinity>() < 1e-14) break;
    }
    return (f[0] - 1) / (r0 * r0) - q / 3 * std::log(r0);
}

}  // namespace

TEST_CASE("dichotomy on the flat background") {
    const DerivedConstants c = acceptance();
    const FieldProfile bg = flat_background(c);
    const double rmax = bg.r.back();
    CHECK(shoot(Field::f, -1e6, bg, c, rmax).classification == Classification::Set2);
    CHECK(shoot(Field::f, -10.0, bg, c, rmax).classification == Classification::Set2);
    CHECK(shoot(Field::f, -1e-3, bg, c, rmax).classification == Classification::Set1);
    CHECK(shoot(Field::f, -1e-6, bg, c, rmax).classification == Classification::Set1);
}

TEST_CASE("events are exclusive and margins consistent") {
    const DerivedConstants c = acceptance();
    const FieldProfile bg = flat_background(c);
    for (double C : {-1e3, -0.5, -0.13, -0.12, -0.01}) {
        const ShootOutcome o = shoot(Field::f, C, bg, c, bg.r.back());
        CAPTURE(C);
        // the event that did not fire never went negative before termination
        if (o.classification == Classification::Set1) CHECK(o.value_margin >= 0);
        if (o.classification == Classification::Set2) CHECK(o.derivative_margin >= 0);
        CHECK(o.classification != Classification::Set3Candidate);
        CHECK(o.event_radius < bg.r.back());
        CHECK(!o.trajectory.empty());
    }
}

TEST_CASE("bisection agrees from two brackets") {
    const DerivedConstants c = acceptance();
    const FieldProfile bg = flat_background(c);
    const double rmax = bg.r.back();
    const Bracket b = auto_bracket(Field::f, bg, c, rmax);
    CHECK(b.lo == -0.25);
    CHECK(b.hi == -0.125);
    const double tol = 1e-10;
    const BisectResult one = bisect(Field::f, b.lo, b.hi, bg, c, rmax, tol);
    const BisectResult two = bisect(Field::f, -1.0, -0.1, bg, c, rmax, tol);
    REQUIRE(one.status == BisectStatus::Converged);
    REQUIRE(two.status == BisectStatus::Converged);
    CHECK(std::abs(one.param_star - two.param_star) <= 10 * tol);
    for (std::size_t i = 1; i < one.widths.size(); ++i) CHECK(one.widths[i] == doctest::Approx(one.widths[i - 1] / 2));
}

TEST_CASE("shooting value agrees with an independent finite-difference solve") {
    const DerivedConstants c = acceptance();
    const FieldProfile bg = flat_background(c);
    const BisectResult b = bisect(Field::f, -0.25, -0.125, bg, c, bg.r.back(), 0.0);
    const double oracle = flat_fd_oracle(c.kappa_decay, bg.r.front(), bg.r.back(), 60000);
    CHECK(b.param_star == doctest::Approx(oracle).epsilon(1e-5));
    // frozen value, recorded from this build
    CHECK(b.param_star == doctest::Approx(-0.12635934709359731).epsilon(1e-9));
}

TEST_CASE("bracket ordering and errors") {
    const DerivedConstants c = acceptance();
    const FieldProfile bg = flat_background(c);
    const double a = bisect(Field::f, -0.125, -0.25, bg, c, bg.r.back(), 1e-8).param_star;
    CHECK(a == doctest::Approx(bisect(Field::f, -0.25, -0.125, bg, c, bg.r.back(), 1e-8).param_star));
    try {
        bisect(Field::f, -0.01, -0.001, bg, c, bg.r.back(), 1e-8);  // both SET1
        FAIL("expected InvalidBracket");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidBracket);
    }
}

TEST_CASE("zero solution for the electric potentials") {
    const DerivedConstants c = derive(Parameters{});
    const FieldProfile bg = flat_background(c, 400);
    CHECK(zero_solution(Field::A, bg, c));
    CHECK(zero_solution(Field::B, bg, c));
    CHECK(!zero_solution(Field::sigma, bg, c));
    const Bracket b = auto_bracket(Field::B, bg, c, bg.r.back());
    CHECK(b.degenerate);
}

TEST_CASE("solve_field fills the grid and meets the far condition") {
    const DerivedConstants c = acceptance();
    const FieldProfile bg = flat_background(c);
    const FieldSolution s = solve_field(Field::f, bg, c);
    REQUIRE(s.value.size() == bg.size());
    CHECK(s.param == doctest::Approx(-0.12635934709359731).epsilon(1e-9));
    CHECK(s.r_match > 20.0);
    for (std::size_t i = 1; i < s.value.size(); ++i) {
        CHECK(s.value[i] >= 0.0);
        CHECK(s.value[i] <= s.value[i - 1] + 1e-12);
    }
    const std::size_t n = bg.size();
    const FarCondition fc = far_condition(Field::f, c);
    CHECK(s.deriv[n - 1] == doctest::Approx(-(fc.rate + fc.power / bg.r[n - 1]) * (s.value[n - 1] - fc.target)).epsilon(1e-3));
}

TEST_CASE("classification sweep: serial and parallel agree") {
    const DerivedConstants c = acceptance();
    const FieldProfile bg = flat_background(c);
    std::vector<double> params;
    for (int i = 0; i < 40; ++i) params.push_back(-std::pow(10.0, -4.0 + 0.15 * i));
    const auto s = classify_sweep(Field::f, params, bg, c, bg.r.back(), Exec::Serial);
    const auto p = classify_sweep(Field::f, params, bg, c, bg.r.back(), Exec::Parallel);
    CHECK(s == p);
    // monotone dichotomy: SET1 below C*, SET2 above
    for (std::size_t i = 0; i < params.size(); ++i)
        CHECK(s[i] == (std::abs(params[i]) < 0.12635934709359731 ? Classification::Set1 : Classification::Set2));
}

TEST_CASE("dichotomy for each field on the initial guess") {
    const DerivedConstants c = acceptance();
    SolveOptions o;
    o.grid_n = 600;
    const FieldProfile g = initial_guess(c, solver_grid(c, o));
    for (Field fd : kAllFields) {
        CAPTURE(fd);
        const Bracket b = auto_bracket(fd, g, c, g.r.back());
        const ShootOutcome lo = shoot(fd, b.lo, g, c, g.r.back());
        const ShootOutcome hi = shoot(fd, b.hi, g, c, g.r.back());
        CHECK(lo.classification != hi.classification);
        CHECK(b.lo < b.hi);
        CHECK(!b.degenerate);
    }
}
