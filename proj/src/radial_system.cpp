#include "dyon/radial_system.hpp"

#include <cmath>
#include <sstream>

#include "dyon/errors.hpp"

namespace dyon {

namespace {

void check_radius(double r) {
    if (!(r > kMinRadius)) {
        std::ostringstream os;
        os << "radius " << r << " at or below " << kMinRadius;
        throw Error(ErrorKind::SingularRadius, os.str());
    }
}

}  // namespace

Accel field_accel(Field fd, double r, double u, double du, const std::array<double, kFieldCount>& o,
                  const DerivedConstants& c) {
    const Parameters& p = c.params;
    const double r2 = r * r;
    const double f = o[idx(Field::f)], rho = o[idx(Field::rho)], A = o[idx(Field::A)];
    const double B = o[idx(Field::B)], h = o[idx(Field::h)], sg = o[idx(Field::sigma)];
    Accel a;
    switch (fd) {
        case Field::f: {
            const double q = 0.25 * p.g * p.g * rho * rho - A * A;
            a.value = u * (u + 2.0) * (u + 1.0) / r2 + q * (u + 1.0);
            a.d_u = (3.0 * u * u + 6.0 * u + 2.0) / r2 + q;
            break;
        }
        case Field::h: {
            const double q = p.g_prime * p.g_prime * sg * sg - B * B;
            a.value = u * (u + 2.0) * (u + 1.0) / r2 + q * (u + 1.0);
            a.d_u = (3.0 * u * u + 6.0 * u + 2.0) / r2 + q;
            break;
        }
        case Field::rho: {
            const double ab = A - B;
            const double r0sq = c.rho0 * c.rho0;
            a.value = -2.0 * du / r + f * f * u / (2.0 * r2) - 0.25 * ab * ab * u +
                      0.5 * p.lambda * (u * u - r0sq) * u;
            a.d_u = f * f / (2.0 * r2) - 0.25 * ab * ab + 0.5 * p.lambda * (3.0 * u * u - r0sq);
            a.d_du = -2.0 / r;
            break;
        }
        case Field::A: {
            const double k2 = 0.25 * p.g * p.g * rho * rho;
            a.value = -2.0 * du / r + 2.0 * f * f * u / r2 + k2 * (u - B);
            a.d_u = 2.0 * f * f / r2 + k2;
            a.d_du = -2.0 / r;
            break;
        }
        case Field::B: {
            const double k2 = 0.25 * p.g_prime * p.g_prime * rho * rho;
            a.value = -2.0 * du / r + 2.0 * h * h * u / r2 + k2 * (u - A);
            a.d_u = 2.0 * h * h / r2 + k2;
            a.d_du = -2.0 / r;
            break;
        }
        case Field::sigma: {
            const double s0sq = c.sigma0 * c.sigma0;
            a.value = -2.0 * du / r + 2.0 * h * h * u / r2 + p.kappa_param * (u * u - s0sq) * u;
            a.d_u = 2.0 * h * h / r2 + p.kappa_param * (3.0 * u * u - s0sq);
            a.d_du = -2.0 / r;
            break;
        }
    }
    return a;
}

Accel field_accel_bare(Field fd, double r, double y, double dy, const std::array<double, kFieldCount>& o,
                       const DerivedConstants& c) {
    if (fd != Field::f && fd != Field::h) return field_accel(fd, r, y, dy, o, c);
    const Parameters& p = c.params;
    const double r2 = r * r;
    const double q = fd == Field::f
                         ? 0.25 * p.g * p.g * o[idx(Field::rho)] * o[idx(Field::rho)] - o[idx(Field::A)] * o[idx(Field::A)]
                         : p.g_prime * p.g_prime * o[idx(Field::sigma)] * o[idx(Field::sigma)] -
                               o[idx(Field::B)] * o[idx(Field::B)];
    Accel a;
    a.value = (y * y - 1.0) * y / r2 + q * y;
    a.d_u = (3.0 * y * y - 1.0) / r2 + q;
    return a;
}

std::array<double, kFieldCount> rhs_full(const FieldState& s, const DerivedConstants& c) {
    check_radius(s.r);
    std::array<double, kFieldCount> out{};
    for (Field fd : kAllFields) {
        const std::size_t i = idx(fd);
        out[i] = field_accel(fd, s.r, s.value[i] - field_offset(fd), s.deriv[i], s.value, c).value;
    }
    return out;
}

RhsJacobian rhs_full_jacobian(const FieldState& s, const DerivedConstants& c) {
    check_radius(s.r);
    const Parameters& p = c.params;
    RhsJacobian J;
    for (Field fd : kAllFields) {
        const std::size_t i = idx(fd);
        const Accel a = field_accel(fd, s.r, s.value[i] - field_offset(fd), s.deriv[i], s.value, c);
        J.d_value[i][i] = a.d_u;
        J.d_deriv[i][i] = a.d_du;
    }
    const double r2 = s.r * s.r;
    const double f = s.value[0], rho = s.value[1], A = s.value[2], B = s.value[3], h = s.value[4],
                 sg = s.value[5];
    const double g2 = p.g * p.g, gp2 = p.g_prime * p.g_prime;
    constexpr std::size_t F = 0, R = 1, AA = 2, BB = 3, H = 4, S = 5;
    J.d_value[F][R] = 0.5 * g2 * rho * f;
    J.d_value[F][AA] = -2.0 * A * f;
    J.d_value[R][F] = f * rho / r2;
    J.d_value[R][AA] = -0.5 * (A - B) * rho;
    J.d_value[R][BB] = 0.5 * (A - B) * rho;
    J.d_value[AA][F] = 4.0 * f * A / r2;
    J.d_value[AA][R] = 0.5 * g2 * rho * (A - B);
    J.d_value[AA][BB] = -0.25 * g2 * rho * rho;
    J.d_value[BB][H] = 4.0 * h * B / r2;
    J.d_value[BB][R] = 0.5 * gp2 * rho * (B - A);
    J.d_value[BB][AA] = -0.25 * gp2 * rho * rho;
    J.d_value[H][S] = 2.0 * gp2 * sg * h;
    J.d_value[H][BB] = -2.0 * B * h;
    J.d_value[S][H] = 4.0 * h * sg / r2;
    return J;
}

double rhs_single(Field fd, const FieldState& s, const FieldProfile& frozen, const DerivedConstants& c) {
    check_radius(s.r);
    std::array<double, kFieldCount> others{};
    for (Field o : kAllFields) others[idx(o)] = (o == fd) ? s.value[idx(o)] : sample_value(frozen, o, s.r);
    const std::size_t i = idx(fd);
    return field_accel(fd, s.r, s.value[i] - field_offset(fd), s.deriv[i], others, c).value;
}

OriginSeries make_series(Field fd, double shoot_param, double r_start) {
    OriginSeries s;
    s.field = fd;
    s.shoot_param = shoot_param;
    s.leading_exponent = nominal_exponent(fd);
    s.r_start = r_start;
    return s;
}

namespace {

// Deviation of a frozen field below the first node, as a single power term.
PowerSeries dev_model(const FieldProfile& frozen, Field fd) {
    const PowerLaw law = origin_model(frozen, fd);
    return PowerSeries::monomial(law.coef, law.exponent);
}

// Bare field below the first node.
PowerSeries bare_model(const FieldProfile& frozen, Field fd) {
    return dev_model(frozen, fd) + PowerSeries::constant(field_offset(fd));
}

// f^2 - 1 from the deviation d = f - 1.
PowerSeries sq_minus_one(const PowerSeries& d) { return d * 2.0 + d * d; }

}  // namespace

PowerSeries origin_series_regular(const OriginSeries& s, const FieldProfile& frozen, const DerivedConstants& c) {
    const Parameters& p = c.params;
    const double P = s.shoot_param;
    const double g2 = p.g * p.g, gp2 = p.g_prime * p.g_prime;
    switch (s.field) {
        case Field::f:
        case Field::h: {
            PowerSeries q;
            if (s.field == Field::f) {
                const PowerSeries rho = bare_model(frozen, Field::rho), A = bare_model(frozen, Field::A);
                q = rho * rho * (0.25 * g2) - A * A;
            } else {
                const PowerSeries sg = bare_model(frozen, Field::sigma), B = bare_model(frozen, Field::B);
                q = sg * sg * gp2 - B * B;
            }
            const PowerSeries w0 = PowerSeries::monomial(P, 2.0);
            const PowerSeries src =
                q * (w0 + PowerSeries::constant(1.0)) + (w0 * w0 * w0 + w0 * w0 * 3.0).shifted(-2.0);
            return w0 + particular_solution(src, 2.0, -1.0);
        }
        case Field::sigma: {
            const PowerSeries h2m1 = sq_minus_one(dev_model(frozen, Field::h));
            const PowerSeries H0 = PowerSeries::monomial(P, 2.0);
            const PowerSeries bracket = (H0 * H0).shifted(-2.0) * p.kappa_param -
                                        PowerSeries::constant(p.kappa_param * c.sigma0 * c.sigma0) +
                                        h2m1.shifted(-2.0) * 2.0;
            return H0 + particular_solution(H0 * bracket, 2.0, -1.0);
        }
        case Field::B: {
            const PowerSeries h2m1 = sq_minus_one(dev_model(frozen, Field::h));
            const PowerSeries rho = bare_model(frozen, Field::rho), A = bare_model(frozen, Field::A);
            const PowerSeries w0 = PowerSeries::monomial(P, 2.0);
            const PowerSeries src = h2m1.shifted(-2.0) * 2.0 * w0 + rho * rho * (0.25 * gp2) * (w0 - A.shifted(1.0));
            return w0 + particular_solution(src, 2.0, -1.0);
        }
        case Field::A: {
            const PowerSeries f2m1 = sq_minus_one(dev_model(frozen, Field::f));
            const PowerSeries rho = bare_model(frozen, Field::rho), B = bare_model(frozen, Field::B);
            const PowerSeries w0 = PowerSeries::monomial(P, 2.0);
            const PowerSeries src = f2m1.shifted(-2.0) * 2.0 * w0 + rho * rho * (0.25 * g2) * (w0 - B.shifted(1.0));
            return w0 + particular_solution(src, 2.0, -1.0);
        }
        case Field::rho: {
            const double k = c.k_exp;
            const PowerSeries f2m1 = sq_minus_one(dev_model(frozen, Field::f));
            const PowerSeries A = bare_model(frozen, Field::A), B = bare_model(frozen, Field::B);
            const PowerSeries Q0 = PowerSeries::monomial(P, k + 1.0);
            const PowerSeries ab = A - B;
            const PowerSeries T = ab * ab * -0.25 +
                                  ((Q0 * Q0).shifted(-2.0) - PowerSeries::constant(c.rho0 * c.rho0)) * (0.5 * p.lambda) +
                                  f2m1.shifted(-2.0) * 0.5;
            return Q0 + particular_solution(Q0 * T, k + 1.0, -k);
        }
    }
    return {};
}

SeriesValue origin_series_eval(const OriginSeries& s, double r, const FieldProfile& frozen,
                               const DerivedConstants& c) {
    const PowerSeries w = origin_series_regular(s, frozen, c);
    const double wv = w.value(r), wd = w.deriv(r);
    SeriesValue out;
    if (s.field == Field::f || s.field == Field::h) {
        out.deviation = wv;
        out.value = 1.0 + wv;
        out.derivative = wd;
    } else {
        out.value = wv / r;
        out.derivative = wd / r - wv / (r * r);
        out.deviation = out.value;
    }
    return out;
}

}  // namespace dyon
