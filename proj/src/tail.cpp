#include "dyon/tail.hpp"

#include <algorithm>
#include <cmath>

#include "dyon/errors.hpp"
#include "dyon/radial_system.hpp"
#include "dyon/shooting.hpp"

namespace dyon {

FarCondition far_condition(Field fd, const DerivedConstants& c) {
    const Parameters& p = c.params;
    switch (fd) {
        case Field::f: return {c.kappa_decay, 0.0, 0.0};
        case Field::h: return {c.zeta, 0.0, 0.0};
        case Field::rho: return {std::sqrt(p.lambda) * c.rho0, 1.0, c.rho0};
        case Field::sigma: return {std::sqrt(2.0 * p.kappa_param) * c.sigma0, 1.0, c.sigma0};
        case Field::A: return {0.0, 1.0, p.A0};
        case Field::B: return {0.0, 1.0, p.B0};
    }
    return {};
}

void complete_tail(Field fd, const FieldProfile& frozen, const DerivedConstants& c, std::size_t i0,
                   std::vector<double>& value, std::vector<double>& deriv) {
    const auto& r = frozen.r;
    const std::size_t n = r.size();
    if (i0 + 3 >= n) throw Error(ErrorKind::InvalidGrid, "tail needs at least three free nodes", fd);
    const FarCondition far = far_condition(fd, c);
    const double target = far.target;
    const std::size_t k = idx(fd);

    std::vector<double> u(n);
    for (std::size_t j = 0; j <= i0; ++j) u[j] = value[j];
    const double r0 = r[i0];
    if (fd == Field::A || fd == Field::B) {
        const Field partner = fd == Field::A ? Field::B : Field::A;
        const double gap = u[i0] - frozen.v(partner)[i0];
        for (std::size_t j = i0 + 1; j < n; ++j)
            u[j] = frozen.v(partner)[j] + gap * std::exp(-(r[j] - r0)) * r0 / r[j];
    } else {
        for (std::size_t j = i0 + 1; j < n; ++j)
            u[j] = target + (u[i0] - target) * std::exp(-far.rate * (r[j] - r0)) * std::pow(r0 / r[j], far.power);
    }

    const std::size_t m = n - 1 - i0;  // unknowns u[i0+1 .. n-1]
    std::vector<double> sub(m), dia(m), sup(m), rhs(m);
    std::vector<Stencil> d1(n), d2(n);
    for (std::size_t j = i0 + 1; j + 1 < n; ++j) {
        d1[j] = first_central(r, j);
        d2[j] = second_central(r, j);
    }
    const Stencil db = first_backward(r);
    std::array<double, kFieldCount> others{};
    const double scale = field_scale(fd, c);

    bool converged = false;
    double prev_step = 0;
    for (int it = 0; it < 60 && !converged; ++it) {
        for (std::size_t j = i0 + 1; j + 1 < n; ++j) {
            const std::size_t row = j - i0 - 1;
            for (std::size_t q = 0; q < kFieldCount; ++q) others[q] = frozen.value[q][j];
            others[k] = u[j];
            const double du = d1[j].w[0] * u[j - 1] + d1[j].w[1] * u[j] + d1[j].w[2] * u[j + 1];
            const double upp = d2[j].w[0] * u[j - 1] + d2[j].w[1] * u[j] + d2[j].w[2] * u[j + 1];
            const Accel a = field_accel_bare(fd, r[j], u[j], du, others, c);
            rhs[row] = -(upp - a.value);
            sub[row] = d2[j].w[0] - a.d_du * d1[j].w[0];
            dia[row] = d2[j].w[1] - a.d_du * d1[j].w[1] - a.d_u;
            sup[row] = d2[j].w[2] - a.d_du * d1[j].w[2];
        }
        // Far row on nodes n-3, n-2, n-1.
        const double rn = r[n - 1];
        const double coef = far.rate + far.power / rn;
        const double resid_far = db.w[0] * u[n - 3] + db.w[1] * u[n - 2] + db.w[2] * u[n - 1] + coef * (u[n - 1] - target);
        double far_a = db.w[1], far_b = db.w[2] + coef, far_rhs = -resid_far;
        if (n - 3 > i0) {
            // Eliminate the n-3 entry with the row of node n-2.
            const std::size_t pr = m - 2;
            const double ratio = db.w[0] / sub[pr];
            far_a -= ratio * dia[pr];
            far_b -= ratio * sup[pr];
            far_rhs -= ratio * rhs[pr];
        }
        sub[m - 1] = far_a;
        dia[m - 1] = far_b;
        sup[m - 1] = 0.0;
        rhs[m - 1] = far_rhs;
        sub[0] = 0.0;  // u[i0] is fixed

        // Thomas elimination.
        for (std::size_t q = 1; q < m; ++q) {
            const double w = sub[q] / dia[q - 1];
            dia[q] -= w * sup[q - 1];
            rhs[q] -= w * rhs[q - 1];
        }
        rhs[m - 1] /= dia[m - 1];
        for (std::size_t q = m - 1; q-- > 0;) rhs[q] = (rhs[q] - sup[q] * rhs[q + 1]) / dia[q];

        double step = 0;
        for (std::size_t q = 0; q < m; ++q) {
            if (!std::isfinite(rhs[q])) throw Error(ErrorKind::NotConverged, "tail Newton produced a non-finite step", fd);
            u[i0 + 1 + q] += rhs[q];
            step = std::max(step, std::abs(rhs[q]));
        }
        // Either a tiny step, or a stalled one at the rounding floor.
        converged = step <= 1e-14 * scale || (it >= 2 && step <= 1e-10 * scale && step >= 0.5 * prev_step);
        prev_step = step;
    }
    if (!converged) throw Error(ErrorKind::NotConverged, "tail Newton did not converge", fd);

    for (std::size_t j = i0 + 1; j < n; ++j) value[j] = u[j];
    for (std::size_t j = i0 + 1; j + 1 < n; ++j)
        deriv[j] = d1[j].w[0] * u[j - 1] + d1[j].w[1] * u[j] + d1[j].w[2] * u[j + 1];
    deriv[n - 1] = db.w[0] * u[n - 3] + db.w[1] * u[n - 2] + db.w[2] * u[n - 1];
}

}  // namespace dyon
