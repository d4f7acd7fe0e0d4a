#include "dyon/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dyon/errors.hpp"
#include "dyon/radial_system.hpp"

namespace dyon {

namespace {

using collocation::Mat6;
using collocation::Vec6;

constexpr int kF = static_cast<int>(kFieldCount);

struct W3 {
    double a, b, c;
};

W3 d1_central(const std::vector<double>& r, std::size_t i) {
    const double hm = r[i] - r[i - 1], hp = r[i + 1] - r[i];
    return {-hp / (hm * (hm + hp)), (hp - hm) / (hm * hp), hm / (hp * (hm + hp))};
}

W3 d2_central(const std::vector<double>& r, std::size_t i) {
    const double hm = r[i] - r[i - 1], hp = r[i + 1] - r[i];
    return {2.0 / (hm * (hm + hp)), -2.0 / (hm * hp), 2.0 / (hp * (hm + hp))};
}

W3 d1_forward(const std::vector<double>& r) {
    const double h1 = r[1] - r[0], h2 = r[2] - r[1];
    return {-(2 * h1 + h2) / (h1 * (h1 + h2)), (h1 + h2) / (h1 * h2), -h1 / (h2 * (h1 + h2))};
}

W3 d1_backward(const std::vector<double>& r) {
    const std::size_t n = r.size();
    const double h1 = r[n - 2] - r[n - 3], h2 = r[n - 1] - r[n - 2];
    return {h2 / (h1 * (h1 + h2)), -(h1 + h2) / (h1 * h2), (2 * h2 + h1) / (h2 * (h1 + h2))};
}

// Regular behaviour at the origin: field - offset ~ r^p.
struct OriginRow {
    double p, offset;
};

OriginRow origin_row(Field fd, const DerivedConstants& c) {
    switch (fd) {
        case Field::f:
        case Field::h: return {2.0, 1.0};
        case Field::rho: return {c.k_exp, 0.0};
        default: return {1.0, 0.0};
    }
}

// Far behaviour: field' = -(rate + power / r) (field - target).
struct FarRow {
    double rate, power, target;
};

FarRow far_row(Field fd, const DerivedConstants& c) {
    const Parameters& p = c.params;
    switch (fd) {
        case Field::f: return {c.kappa_decay, 0.0, 0.0};
        case Field::h: return {c.zeta, 0.0, 0.0};
        case Field::rho: return {std::sqrt(p.lambda) * c.rho0, 1.0, c.rho0};
        case Field::sigma: return {std::sqrt(2.0 * p.kappa_param) * c.sigma0, 1.0, c.sigma0};
        case Field::A: return {0.0, 1.0, p.A0};
        case Field::B: return {0.0, 1.0, p.B0};
    }
    return {0, 0, 0};
}

double inf_norm(const std::vector<Vec6>& v) {
    double m = 0;
    for (const auto& x : v) m = std::max(m, x.cwiseAbs().maxCoeff());
    return m;
}

double two_norm(const std::vector<Vec6>& v) {
    double s = 0;
    for (const auto& x : v) s += x.squaredNorm();
    return std::sqrt(s);
}

Eigen::PartialPivLU<Mat6> factor(const Mat6& m, std::size_t node, double r) {
    Eigen::PartialPivLU<Mat6> lu(m);
    const auto d = lu.matrixLU().diagonal().cwiseAbs();
    const double big = m.cwiseAbs().maxCoeff();
    if (!(d.minCoeff() > 1e-14 * big) || !std::isfinite(big)) {
        std::ostringstream os;
        os << "singular Jacobian block at node " << node << " (r = " << r << ")";
        throw Error(ErrorKind::SingularJacobian, os.str());
    }
    return lu;
}

// Solves J dx = rhs for the block system in `s`; the corner blocks are
// folded into the neighbouring rows first.
std::vector<Vec6> block_solve(collocation::System s, std::vector<Vec6> rhs, const std::vector<double>& r) {
    const std::size_t n = rhs.size();
    {
        const Mat6 m = s.corner_first * factor(s.upper[1], 1, r[1]).inverse();
        s.diag[0] -= m * s.lower[1];
        s.upper[0] -= m * s.diag[1];
        rhs[0] -= m * rhs[1];
    }
    {
        const Mat6 m = s.corner_last * factor(s.lower[n - 2], n - 2, r[n - 2]).inverse();
        s.lower[n - 1] -= m * s.diag[n - 2];
        s.diag[n - 1] -= m * s.upper[n - 2];
        rhs[n - 1] -= m * rhs[n - 2];
    }
    std::vector<Mat6> x(n);
    std::vector<Vec6> g(n);
    auto lu = factor(s.diag[0], 0, r[0]);
    x[0] = lu.solve(s.upper[0]);
    g[0] = lu.solve(rhs[0]);
    for (std::size_t i = 1; i < n; ++i) {
        const Mat6 d = s.diag[i] - s.lower[i] * x[i - 1];
        lu = factor(d, i, r[i]);
        if (i + 1 < n) x[i] = lu.solve(s.upper[i]);
        g[i] = lu.solve(rhs[i] - s.lower[i] * g[i - 1]);
    }
    for (std::size_t i = n - 1; i-- > 0;) g[i] -= x[i] * g[i + 1];
    return g;
}

}  // namespace

namespace collocation {

System assemble(const DerivedConstants& c, const std::vector<double>& r, const std::vector<Vec6>& y, Exec exec) {
    const std::size_t n = r.size();
    System s;
    s.res.assign(n, Vec6::Zero());
    s.lower.assign(n, Mat6::Zero());
    s.diag.assign(n, Mat6::Zero());
    s.upper.assign(n, Mat6::Zero());

    const W3 wf = d1_forward(r);
    for (Field fd : kAllFields) {
        const int k = idx(fd);
        const OriginRow o = origin_row(fd, c);
        const double r0 = r[0];
        const double dy = wf.a * y[0][k] + wf.b * y[1][k] + wf.c * y[2][k];
        s.res[0][k] = r0 * dy - o.p * (y[0][k] - o.offset);
        s.diag[0](k, k) = r0 * wf.a - o.p;
        s.upper[0](k, k) = r0 * wf.b;
        s.corner_first(k, k) = r0 * wf.c;
    }

    const W3 wb = d1_backward(r);
    for (Field fd : kAllFields) {
        const int k = idx(fd);
        const FarRow f = far_row(fd, c);
        const double rn = r[n - 1];
        const double q = f.rate + f.power / rn;
        const double dy = wb.a * y[n - 3][k] + wb.b * y[n - 2][k] + wb.c * y[n - 1][k];
        s.res[n - 1][k] = dy + q * (y[n - 1][k] - f.target);
        s.corner_last(k, k) = wb.a;
        s.lower[n - 1](k, k) = wb.b;
        s.diag[n - 1](k, k) = wb.c + q;
    }

    const long last = static_cast<long>(n) - 1;
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
    for (long li = 1; li < last; ++li) {
        const auto i = static_cast<std::size_t>(li);
        const W3 w1 = d1_central(r, i), w2 = d2_central(r, i);
        FieldState st;
        st.r = r[i];
        Vec6 d2;
        for (int k = 0; k < kF; ++k) {
            st.value[k] = y[i][k];
            st.deriv[k] = w1.a * y[i - 1][k] + w1.b * y[i][k] + w1.c * y[i + 1][k];
            d2[k] = w2.a * y[i - 1][k] + w2.b * y[i][k] + w2.c * y[i + 1][k];
        }
        const auto acc = rhs_full(st, c);
        const RhsJacobian jac = rhs_full_jacobian(st, c);
        const double sc = std::min(r[i] * r[i], 1.0);
        Mat6 jv, jd;
        for (int a = 0; a < kF; ++a)
            for (int b = 0; b < kF; ++b) {
                jv(a, b) = jac.d_value[a][b];
                jd(a, b) = jac.d_deriv[a][b];
            }
        for (int k = 0; k < kF; ++k) s.res[i][k] = sc * (d2[k] - acc[k]);
        s.lower[i] = sc * (w2.a * Mat6::Identity() - w1.a * jd);
        s.diag[i] = sc * (w2.b * Mat6::Identity() - w1.b * jd - jv);
        s.upper[i] = sc * (w2.c * Mat6::Identity() - w1.c * jd);
    }
    return s;
}

}  // namespace collocation

CollocationResult solve_collocation(const Parameters& params, const std::vector<double>& grid,
                                    const FieldProfile& initial_guess, const CollocationOptions& opt) {
    const std::size_t n = grid.size();
    if (n < 5) throw Error(ErrorKind::InvalidGrid, "collocation grid needs at least 5 nodes (3 interior)");
    if (!(grid.front() > 0)) throw Error(ErrorKind::InvalidGrid, "collocation grid must start at r > 0");
    for (std::size_t i = 1; i < n; ++i)
        if (!(grid[i] > grid[i - 1])) throw Error(ErrorKind::InvalidGrid, "collocation grid is not increasing");
    if (initial_guess.size() != n) throw Error(ErrorKind::InvalidGrid, "initial guess does not live on the grid");

    const DerivedConstants c = derive(params);
    std::vector<Vec6> y(n);
    for (std::size_t i = 0; i < n; ++i)
        for (int k = 0; k < kF; ++k) y[i][k] = initial_guess.value[k][i];

    CollocationResult out;
    collocation::System s = collocation::assemble(c, grid, y, opt.exec);
    double res_inf = inf_norm(s.res);
    double res_two = two_norm(s.res);
    out.residual_history.push_back(res_inf);

    while (!(res_inf < opt.tol)) {
        if (out.iterations >= opt.max_iters || !std::isfinite(res_inf)) {
            std::ostringstream os;
            os << "collocation Newton did not converge: residual " << res_inf << " after " << out.iterations
               << " iterations";
            throw Error(ErrorKind::NotConverged, os.str());
        }
        std::vector<Vec6> rhs(n);
        for (std::size_t i = 0; i < n; ++i) rhs[i] = -s.res[i];
        const std::vector<Vec6> dy = block_solve(s, rhs, grid);

        double t = 1.0;
        for (;;) {
            std::vector<Vec6> trial(n);
            for (std::size_t i = 0; i < n; ++i) trial[i] = y[i] + t * dy[i];
            collocation::System ts = collocation::assemble(c, grid, trial, opt.exec);
            const double tn = two_norm(ts.res);
            if (tn <= (1.0 - 1e-4 * t) * res_two) {
                y = std::move(trial);
                s = std::move(ts);
                res_two = tn;
                break;
            }
            t *= 0.5;
            if (t < 1e-8)
                throw Error(ErrorKind::NotConverged,
                            "collocation line search failed at residual " + std::to_string(res_inf));
        }
        ++out.iterations;
        res_inf = inf_norm(s.res);
        out.residual_history.push_back(res_inf);
    }

    FieldProfile p = FieldProfile::on_grid(grid);
    const W3 wf = d1_forward(grid), wb = d1_backward(grid);
    for (Field fd : kAllFields) {
        const int k = idx(fd);
        auto& v = p.value[k];
        auto& d = p.deriv[k];
        for (std::size_t i = 0; i < n; ++i) v[i] = y[i][k];
        d[0] = wf.a * v[0] + wf.b * v[1] + wf.c * v[2];
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const W3 w = d1_central(grid, i);
            d[i] = w.a * v[i - 1] + w.b * v[i] + w.c * v[i + 1];
        }
        d[n - 1] = wb.a * v[n - 3] + wb.b * v[n - 2] + wb.c * v[n - 1];
        const OriginRow o = origin_row(fd, c);
        p.shoot_params[k] = (v[0] - o.offset) / std::pow(grid[0], o.p);
    }
    out.profile = std::move(p);
    return out;
}

double FieldGaps::max_gap() const { return *std::max_element(gap.begin(), gap.end()); }

FieldGaps compare(const FieldProfile& a, const FieldProfile& b, Exec exec) {
    if (a.size() != b.size()) throw Error(ErrorKind::GridMismatch, "profiles have different node counts");
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a.r[i] - b.r[i]) > 1e-12 * std::max(1.0, std::abs(a.r[i])))
            throw Error(ErrorKind::GridMismatch, "profiles live on different grids (node " + std::to_string(i) + ")");
    FieldGaps g;
    for (int k = 0; k < kF; ++k) {
        const auto m = kernels::max_abs_diff(a.value[k].data(), b.value[k].data(), a.size(), exec);
        g.gap[k] = m.value;
        g.radius[k] = a.size() ? a.r[m.index] : 0.0;
    }
    return g;
}

}  // namespace dyon
