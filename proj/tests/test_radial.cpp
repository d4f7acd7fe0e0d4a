#include <doctest.h>

#include <cmath>
#include <functional>

#include "dyon/errors.hpp"
#include "dyon/fixed_point.hpp"
#include "dyon/integrator.hpp"
#include "dyon/power_series.hpp"
#include "dyon/radial_system.hpp"

using namespace dyon;

namespace {

DerivedConstants acceptance() {
    Parameters p;
    p.A0 = p.B0 = 0.3;
    return derive(p);
}

// u = (1/(p-q)) int_0^r [r^p s^(1-p) - r^q s^(1-q)] src(s) ds, by Simpson in ln s.
double variation_of_parameters(const std::function<double(double)>& src, double r, double p, double q) {
    const int n = 40000;
    const double t1 = std::log(r), t0 = t1 - 60.0, h = (t1 - t0) / n;
    double acc = 0;
    for (int i = 0; i <= n; ++i) {
        const double s = std::exp(t0 + i * h);
        const double g = (std::pow(r, p) * std::pow(s, 1 - p) - std::pow(r, q) * std::pow(s, 1 - q)) * src(s) * s;
        acc += g * (i == 0 || i == n ? 1 : (i % 2 ? 4 : 2));
    }
    return acc * h / 3 / (p - q);
}

}  // namespace

TEST_CASE("power series arithmetic") {
    const PowerSeries a = PowerSeries::monomial(2.0, 1.5) + PowerSeries::constant(1.0);
    const PowerSeries b = a * a;
    CHECK(b.value(0.7) == doctest::Approx(std::pow(2 * std::pow(0.7, 1.5) + 1, 2)));
    CHECK(b.terms().size() == 3);  // like powers merged
    CHECK((a - a).value(0.3) == doctest::Approx(0.0));
    CHECK(a.shifted(-1.0).value(2.0) == doctest::Approx(a.value(2.0) / 2.0));
    CHECK(a.deriv(0.5) == doctest::Approx(3.0 * std::sqrt(0.5)));
}

TEST_CASE("particular solution solves the operator") {
    const double p = 2, q = -1;  // u'' - 2u/r^2
    const PowerSeries src = PowerSeries::monomial(0.3, 0.5) + PowerSeries::monomial(-2.0, 1.25);
    const PowerSeries u = particular_solution(src, p, q);
    for (double r : {0.01, 0.1, 0.5}) {
        const double h = 1e-5 * r;
        const double d2 = (u.deriv(r + h) - u.deriv(r - h)) / (2 * h);
        CHECK(d2 - 2 * u.value(r) / (r * r) == doctest::Approx(src.value(r)).epsilon(1e-7));
    }
}

TEST_CASE("resonant source picks up a logarithm") {
    const PowerSeries u = particular_solution(PowerSeries::constant(1.0), 2, -1);
    for (double r : {1e-3, 0.2, 3.0}) CHECK(u.value(r) == doctest::Approx(r * r * std::log(r) / 3));
}

TEST_CASE("closed form matches the integral equation") {
    const double k = indicial_k();
    const double p = k + 1, q = -k;
    const PowerSeries src = PowerSeries::monomial(0.7, k + 1) + PowerSeries::monomial(-0.2, 2 * k + 0.5);
    const PowerSeries u = particular_solution(src, p, q);
    auto f = [&](double s) { return src.value(s); };
    for (double r : {1e-3, 0.05, 0.4}) CHECK(u.value(r) == doctest::Approx(variation_of_parameters(f, r, p, q)).epsilon(1e-8));

    const PowerSeries u2 = particular_solution(PowerSeries::monomial(1.3, 0.5), 2, -1);
    auto g = [](double s) { return 1.3 * std::sqrt(s); };
    for (double r : {1e-3, 0.3}) CHECK(u2.value(r) == doctest::Approx(variation_of_parameters(g, r, 2, -1)).epsilon(1e-8));
}

TEST_CASE("vacuum is a rest point") {
    const DerivedConstants c = acceptance();
    FieldState s;
    s.r = 5.0;
    s.value = {0.0, c.rho0, 0.3, 0.3, 0.0, c.sigma0};
    for (double a : rhs_full(s, c)) CHECK(a == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("jacobian matches finite differences") {
    const DerivedConstants c = acceptance();
    FieldState s;
    s.r = 1.3;
    s.value = {0.6, 0.8, 0.1, 0.2, 0.4, 0.9};
    s.deriv = {-0.3, 0.4, 0.05, 0.07, -0.5, 0.3};
    const RhsJacobian j = rhs_full_jacobian(s, c);
    const double h = 1e-6;
    for (std::size_t b = 0; b < kFieldCount; ++b) {
        FieldState up = s, dn = s;
        up.value[b] += h;
        dn.value[b] -= h;
        const auto fu = rhs_full(up, c), fd = rhs_full(dn, c);
        FieldState upd = s, dnd = s;
        upd.deriv[b] += h;
        dnd.deriv[b] -= h;
        const auto gu = rhs_full(upd, c), gd = rhs_full(dnd, c);
        for (std::size_t a = 0; a < kFieldCount; ++a) {
            CHECK(j.d_value[a][b] == doctest::Approx((fu[a] - fd[a]) / (2 * h)).epsilon(1e-6));
            CHECK(j.d_deriv[a][b] == doctest::Approx((gu[a] - gd[a]) / (2 * h)).epsilon(1e-6));
        }
    }
}

TEST_CASE("singular radius") {
    FieldState s;
    s.r = 0.0;
    CHECK_THROWS_AS(rhs_full(s, acceptance()), Error);
    try {
        rhs_full(s, acceptance());
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::SingularRadius);
    }
}

TEST_CASE("single-field forms agree with the full system") {
    const DerivedConstants c = acceptance();
    FieldState s;
    s.r = 0.8;
    s.value = {0.7, 0.6, 0.12, 0.18, 0.5, 0.7};
    s.deriv = {-0.2, 0.5, 0.1, 0.09, -0.4, 0.6};
    const auto full = rhs_full(s, c);
    for (Field fd : kAllFields) {
        const std::size_t k = idx(fd);
        const double off = field_offset(fd);
        CHECK(field_accel(fd, s.r, s.value[k] - off, s.deriv[k], s.value, c).value == doctest::Approx(full[k]));
        CHECK(field_accel_bare(fd, s.r, s.value[k], s.deriv[k], s.value, c).value == doctest::Approx(full[k]));
    }
}

TEST_CASE("origin series residual shrinks towards the origin") {
    const DerivedConstants c = acceptance();
    const double params[] = {-0.22, 0.94, 0.097, 0.13, -0.38, 0.87};
    // frozen fields that are exact leading power laws, so the origin models are exact too
    FieldProfile frozen = FieldProfile::on_grid(make_grid(1e-3, 1.0, 2000, 3.0));
    for (Field fd : kAllFields)
        for (std::size_t i = 0; i < frozen.size(); ++i) {
            const double r = frozen.r[i], e = fd == Field::rho ? c.k_exp : nominal_exponent(fd);
            frozen.v(fd)[i] = field_offset(fd) + params[idx(fd)] * std::pow(r, e);
            frozen.d(fd)[i] = params[idx(fd)] * e * std::pow(r, e - 1);
        }
    const double r0 = frozen.r.front();
    for (Field fd : kAllFields) {
        const OriginSeries s = make_series(fd, params[idx(fd)], r0);
        const PowerSeries w = origin_series_regular(s, frozen, c);
        // field'' from the regular variable, term by term
        auto residual = [&](double r) {
            double w0 = 0, w1 = 0, w2 = 0;
            for (const PowerTerm& t : w.terms()) {
                const double e = t.exponent, l = std::log(r), re = t.coef * std::pow(r, e);
                if (t.log_power == 0) {
                    w0 += re;
                    w1 += e * re / r;
                    w2 += e * (e - 1) * re / (r * r);
                } else {
                    w0 += re * l;
                    w1 += re * (e * l + 1) / r;
                    w2 += re * (e * (e - 1) * l + 2 * e - 1) / (r * r);
                }
            }
            const bool deviation_form = fd == Field::f || fd == Field::h;
            const double v = deviation_form ? 1 + w0 : w0 / r;
            const double d = deviation_form ? w1 : w1 / r - w0 / (r * r);
            const double d2 = deviation_form ? w2 : w2 / r - 2 * w1 / (r * r) + 2 * w0 / (r * r * r);
            FieldState st;
            st.r = r;
            sample_values(frozen, r, st.value);
            st.value[idx(fd)] = v;
            st.deriv[idx(fd)] = d;
            return std::abs(d2 - rhs_single(fd, st, frozen, c)) / std::abs(d2);
        };
        const double a = residual(8 * r0), b = residual(4 * r0), e = residual(2 * r0);
        CAPTURE(fd);
        CAPTURE(a);
        CAPTURE(b);
        CAPTURE(e);
        CHECK(a < 1e-2);
        // at least first order in r per halving
        CHECK(b < a / 2);
        CHECK(e < b / 2);
    }
}

TEST_CASE("dormand-prince accuracy and dense output") {
    std::array<double, 2> y0 = {1.0, 0.0};
    double end_r = 0;
    std::array<double, 2> end{};
    double worst_dense = 0;
    integrate_dp45<2>(
        [](double, const std::array<double, 2>& y) { return std::array<double, 2>{y[1], -y[0]}; }, 0.0, 10.0, y0, {},
        [&](const DenseStep<2>& st) {
            const double mid = st.r0 + 0.37 * st.h;
            worst_dense = std::max(worst_dense, std::abs(st.eval(mid)[0] - std::cos(mid)));
            end_r = st.r1();
            end = st.eval(st.r1());
            return true;
        });
    CHECK(end_r == doctest::Approx(10.0));
    CHECK(end[0] == doctest::Approx(std::cos(10.0)).epsilon(1e-8));
    CHECK(end[1] == doctest::Approx(-std::sin(10.0)).epsilon(1e-8));
    CHECK(worst_dense < 1e-8);
}

TEST_CASE("crossing localisation") {
    auto g = [](double x) { return std::cos(x); };
    const double x = locate_crossing(g, 1.0, 2.0, g(1.0), g(2.0), 1e-12);
    CHECK(x == doctest::Approx(M_PI / 2).epsilon(1e-11));
}
