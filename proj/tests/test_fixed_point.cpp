#include <doctest.h>

#include <cmath>
#include <random>

#include "dyon/errors.hpp"
#include "dyon/fixed_point.hpp"
#include "dyon/kernels.hpp"

using namespace dyon;

namespace {

Parameters with_charge(double a0) {
    Parameters p;
    p.A0 = p.B0 = a0;
    return p;
}

}  // namespace

TEST_CASE("weighted norm") {
    const std::vector<double> r = {0.5, 1.0, 2.0};
    const std::vector<double> a = {0.1, 0.0, 0.0}, b = {0.0, 0.2, 0.0}, z = {0.0, 0.0, 0.0};
    const double alpha = 0.5;
    auto w = [&](double x) { return std::pow(x, -alpha) * (1 + std::pow(x, alpha)); };
    CHECK(weighted_norm(r, a, b, z, alpha) == doctest::Approx(std::max(0.1 * w(0.5), 0.2 * w(1.0))));
    CHECK(weighted_norm(r, z, z, z, alpha) == 0.0);
    CHECK_THROWS_AS(weighted_norm(r, a, b, std::vector<double>{0.0}, alpha), Error);
}

TEST_CASE("kernels: serial and parallel agree bit for bit") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(-1, 1);
    for (std::size_t n : {1u, 17u, 2000u, 100003u}) {
        std::vector<double> r(n), a(n), b(n), c(n);
        for (std::size_t i = 0; i < n; ++i) {
            r[i] = 1e-3 + 100.0 * i / n;
            a[i] = u(gen);
            b[i] = u(gen);
            c[i] = u(gen);
        }
        CHECK(kernels::weighted_sup(r.data(), a.data(), b.data(), c.data(), n, 0.18, Exec::Serial) ==
              kernels::weighted_sup(r.data(), a.data(), b.data(), c.data(), n, 0.18, Exec::Parallel));
        const auto s = kernels::max_abs_diff(a.data(), b.data(), n, Exec::Serial);
        const auto p = kernels::max_abs_diff(a.data(), b.data(), n, Exec::Parallel);
        CHECK(s.value == p.value);
        CHECK(s.index == p.index);
    }
}

TEST_CASE("max_abs_diff reports the first maximiser") {
    std::vector<double> a(1000, 0.0), b(1000, 0.0);
    a[700] = 2.0;
    a[300] = -2.0;
    for (Exec e : {Exec::Serial, Exec::Parallel}) {
        const auto m = kernels::max_abs_diff(a.data(), b.data(), a.size(), e);
        CHECK(m.value == 2.0);
        CHECK(m.index == 300);
    }
}

TEST_CASE("initial guess satisfies the boundary values and bounds") {
    const DerivedConstants c = derive(with_charge(0.3));
    SolveOptions o;
    o.grid_n = 500;
    const FieldProfile g = initial_guess(c, solver_grid(c, o));
    const std::size_t n = g.size();
    CHECK(g.v(Field::f)[0] == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(g.v(Field::f)[n - 1] < 1e-3);
    CHECK(g.v(Field::rho)[n - 1] == doctest::Approx(c.rho0));
    CHECK(g.v(Field::A)[n - 1] == doctest::Approx(0.3));
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(g.v(Field::B)[i] >= g.v(Field::A)[i]);
        CHECK(g.v(Field::h)[i] <= 1.0);
    }
}

TEST_CASE("grid follows the options") {
    const DerivedConstants c = derive(with_charge(0.3));
    SolveOptions o;
    o.grid_n = 321;
    o.r_start = 2e-3;
    o.r_max = 60.0;
    const auto g = solver_grid(c, o);
    CHECK(g.size() == 321);
    CHECK(g.front() == 2e-3);
    CHECK(g.back() == 60.0);
}

TEST_CASE("parameters outside H1/H2 are rejected") {
    try {
        solve_dyon(with_charge(0.6));
        FAIL("expected Domain");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Domain);
        CHECK(std::string(e.what()).find("H1") != std::string::npos);
    }
}

TEST_CASE("zero iteration budget returns the initial guess") {
    SolveOptions o;
    o.grid_n = 300;
    o.max_iters = 0;
    const SolveResult r = solve_dyon(with_charge(0.3), o);
    CHECK(!r.trace.converged);
    const FieldProfile g = initial_guess(r.consts, solver_grid(r.consts, o));
    CHECK(r.profile.v(Field::rho) == g.v(Field::rho));
}

TEST_CASE("iteration budget exhausted") {
    SolveOptions o;
    o.grid_n = 400;
    o.max_iters = 2;
    try {
        solve_dyon(with_charge(0.3), o);
        FAIL("expected NotConverged");
    } catch (const NotConvergedError& e) {
        CHECK(e.kind() == ErrorKind::NotConverged);
        CHECK(e.trace().iterations.size() == 2);
        CHECK(!e.trace().converged);
        CHECK(e.last().size() == 400);
    }
}

TEST_CASE("B below A is a precondition violation") {
    const DerivedConstants c = derive(with_charge(0.3));
    SolveOptions o;
    o.grid_n = 300;
    FieldProfile g = initial_guess(c, solver_grid(c, o));
    for (std::size_t i = 0; i < g.size(); ++i) g.v(Field::B)[i] = g.v(Field::A)[i] - 0.01;
    try {
        schauder_step(g, c);
        FAIL("expected PreconditionViolation");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::PreconditionViolation);
    }
}

TEST_CASE("monopole limit decouples the potentials") {
    SolveOptions o;
    o.grid_n = 800;
    const SolveResult r = solve_dyon(with_charge(0.0), o);
    REQUIRE(r.trace.converged);
    for (std::size_t i = 0; i < r.profile.size(); ++i) {
        CHECK(r.profile.v(Field::A)[i] == 0.0);
        CHECK(r.profile.v(Field::B)[i] == 0.0);
    }
    CHECK(r.trace.iterations.back().residual < o.fp_tol);
}

TEST_CASE("solves are deterministic") {
    SolveOptions o;
    o.grid_n = 400;
    const SolveResult a = solve_dyon(with_charge(0.2), o);
    const SolveResult b = solve_dyon(with_charge(0.2), o);
    REQUIRE(a.trace.converged);
    for (std::size_t k = 0; k < kFieldCount; ++k) {
        CHECK(a.profile.value[k] == b.profile.value[k]);
        CHECK(a.profile.deriv[k] == b.profile.deriv[k]);
    }
    CHECK(a.trace.iterations.size() == b.trace.iterations.size());
}
