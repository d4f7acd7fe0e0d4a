#include "dyon/verifier.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <functional>
#include <limits>

#include "dyon/errors.hpp"

namespace dyon {

namespace {

constexpr double kSignalFloor = 1e3 * DBL_EPSILON;
constexpr double kInf = std::numeric_limits<double>::infinity();

ClauseResult make_clause(std::string id, int group) {
    ClauseResult c;
    c.id = std::move(id);
    c.group = group;
    c.worst_margin = kInf;
    return c;
}

void take(ClauseResult& c, double margin, double r) {
    if (margin < c.worst_margin || std::isnan(margin)) {
        c.worst_margin = margin;
        c.worst_radius = r;
    }
}

void finish(ClauseResult& c, double tol) {
    if (c.worst_margin == kInf) {
        c.worst_margin = 0;
        if (c.detail.empty()) c.detail = "vacuous: no qualifying nodes";
    }
    c.pass = c.worst_margin >= -tol;
}

ClauseResult bound_clause(std::string id, const FieldProfile& p, double tol,
                          const std::function<double(std::size_t)>& margin) {
    ClauseResult c = make_clause(std::move(id), 2);
    for (std::size_t i = 0; i < p.size(); ++i) take(c, margin(i), p.r[i]);
    finish(c, tol);
    return c;
}

// sign +1: q increasing, -1: q decreasing
ClauseResult monotone_clause(std::string id, int group, const FieldProfile& p, double tol, double sign,
                             const std::function<double(std::size_t)>& q,
                             const std::function<bool(std::size_t)>& active = {}) {
    ClauseResult c = make_clause(std::move(id), group);
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        if (active && !(active(i) && active(i + 1))) continue;
        take(c, sign * (q(i + 1) - q(i)), p.r[i + 1]);
    }
    finish(c, tol);
    return c;
}

ClauseResult origin_bounded(std::string id, const FieldProfile& p, Field fd, double tol) {
    ClauseResult c = make_clause(std::move(id), 5);
    const auto& v = p.v(fd);
    const double ref = std::abs(v[0] / p.r[0]);
    for (std::size_t i = 0; i < p.size() && p.r[i] <= 1.0; ++i) take(c, ref - std::abs(v[i] / p.r[i]), p.r[i]);
    c.detail = "sup of |field / r| on (0, 1] against its value at r_start";
    finish(c, tol);
    return c;
}

struct LinearComparison {
    std::function<double(std::size_t)> quantity;
    std::function<double(std::size_t)> coef;    // q'' = coef q + source
    std::function<double(std::size_t)> source;
};

// Linear two-point problem on nodes [ia, n): q(r_ia) fixed, q' = -sqrt(coef) q
// at the last node. Returns q on [ia, n).
std::vector<double> solve_comparison(const FieldProfile& p, const LinearComparison& lc, std::size_t ia) {
    const std::size_t n = p.size();
    const std::size_t m = n - ia - 1;  // unknowns at ia+1 .. n-1
    std::vector<double> lo(m, 0), di(m, 0), up(m, 0), rhs(m, 0);
    const double seed = lc.quantity(ia);
    for (std::size_t j = 0; j + 1 < m; ++j) {
        const std::size_t i = ia + 1 + j;
        const Stencil w = second_central(p.r, i);
        lo[j] = w.w[0];
        di[j] = w.w[1] - lc.coef(i);
        up[j] = w.w[2];
        rhs[j] = lc.source(i);
    }
    rhs[0] -= lo[0] * seed;
    lo[0] = 0;
    const Stencil b = first_backward(p.r);
    const double rate = std::sqrt(std::max(lc.coef(n - 1), 0.0));
    // last row: b0 q[n-3] + b1 q[n-2] + (b2 + rate) q[n-1] = 0; drop q[n-3] using row n-2
    const std::size_t k = m - 1;
    const double f = b.w[0] / lo[k - 1];
    lo[k] = b.w[1] - f * di[k - 1];
    di[k] = b.w[2] + rate - f * up[k - 1];
    rhs[k] = -f * rhs[k - 1];
    for (std::size_t j = 1; j < m; ++j) {
        const double w = lo[j] / di[j - 1];
        di[j] -= w * up[j - 1];
        rhs[j] -= w * rhs[j - 1];
    }
    std::vector<double> q(m + 1);
    q[0] = seed;
    q[m] = rhs[m - 1] / di[m - 1];
    for (std::size_t j = m - 1; j-- > 0;) q[j + 1] = (rhs[j] - up[j] * q[j + 2]) / di[j];
    return q;
}

struct Window {
    std::size_t begin = 0, end = 0;  // [begin, end)
    double lo = 0, hi = 0;
};

Window window_nodes(const FieldProfile& p, FitWindow w) {
    Window out;
    const double rmax = p.r.back();
    out.lo = w.lo_frac * rmax;
    out.hi = w.hi_frac * rmax;
    out.begin = static_cast<std::size_t>(std::lower_bound(p.r.begin(), p.r.end(), out.lo) - p.r.begin());
    out.end = static_cast<std::size_t>(std::upper_bound(p.r.begin(), p.r.end(), out.hi) - p.r.begin());
    return out;
}

// A profile converged to `resolution` cannot resolve a field difference much
// below it, whatever the rounding floor says.
double usable_floor(double resolution) { return std::max(kSignalFloor, 100.0 * resolution); }

// The quantity on every node: profile values up to the seed radius, the
// comparison solution beyond it.
struct Resolved {
    std::vector<double> q;
    bool ok = false;
    bool direct = false;
};

Resolved resolve_quantity(const FieldProfile& p, const Window& w, const LinearComparison& lc, double floor) {
    Resolved out;
    const std::size_t n = p.size();
    out.q.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.q[i] = lc.quantity(i);
    std::size_t usable = 0;
    double first = 0, last = 0;
    for (std::size_t i = w.begin; i < w.end; ++i)
        if (std::abs(out.q[i]) >= floor) {
            if (usable++ == 0) first = p.r[i];
            last = p.r[i];
        }
    if (usable >= 8 && last - first >= 0.25 * (w.hi - w.lo)) {
        out.ok = out.direct = true;
        return out;
    }
    std::size_t ia = std::min(w.begin, n - 4);
    while (ia > 0 && std::abs(out.q[ia]) < floor) --ia;
    if (std::abs(out.q[ia]) < floor) return out;
    const std::vector<double> q = solve_comparison(p, lc, ia);
    for (std::size_t i = ia; i < n; ++i) out.q[i] = q[i - ia];
    out.ok = true;
    return out;
}

DecayFit fit_resolved(const FieldProfile& p, const Window& w, std::string name, double predicted,
                      const Resolved& res) {
    DecayFit fit;
    fit.quantity = std::move(name);
    fit.predicted_rate = predicted;
    fit.window_lo = w.lo;
    fit.window_hi = w.hi;
    if (!res.ok) {
        fit.status = FitStatus::InsufficientSignal;
        fit.method = "none";
        fit.pass = true;
        return fit;
    }
    fit.method = res.direct ? "direct" : "comparison_ode";
    std::vector<double> rr, qq;
    for (std::size_t i = w.begin; i < w.end; ++i) {
        rr.push_back(p.r[i]);
        qq.push_back(res.q[i]);
    }
    fit.points = static_cast<int>(rr.size());
    fit.fitted_rate = fit_log_slope_rate(rr, qq);
    fit.relative_gap = std::abs(fit.fitted_rate - predicted) / predicted;
    fit.pass = fit.relative_gap <= kDecayBand;
    return fit;
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    return sxy / sxx;
}

}  // namespace

const char* to_string(FitStatus s) { return s == FitStatus::Fitted ? "fitted" : "insufficient_signal"; }

double fit_log_slope_rate(const std::vector<double>& r, const std::vector<double>& q) {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < r.size() && i < q.size(); ++i)
        if (q[i] != 0 && std::isfinite(q[i])) {
            x.push_back(r[i]);
            y.push_back(std::log(std::abs(q[i])));
        }
    if (x.size() < 2 || x.front() == x.back()) throw Error(ErrorKind::Domain, "decay fit needs two distinct samples");
    return -slope(x, y);
}

std::vector<ClauseResult> check_theorem1(const FieldProfile& p, const DerivedConstants& c, double tol) {
    std::vector<ClauseResult> out;
    const auto& f = p.v(Field::f);
    const auto& h = p.v(Field::h);
    const auto& rho = p.v(Field::rho);
    const auto& A = p.v(Field::A);
    const auto& B = p.v(Field::B);
    const auto& sigma = p.v(Field::sigma);
    const auto& r = p.r;
    const double A0 = c.params.A0;

    {
        ClauseResult fin = make_clause("1.finite", 1);
        bool ok = true;
        for (std::size_t k = 0; k < kFieldCount; ++k)
            for (std::size_t i = 0; i < p.size(); ++i)
                if (!std::isfinite(p.value[k][i]) || !std::isfinite(p.deriv[k][i])) {
                    if (ok) fin.worst_radius = r[i];
                    ok = false;
                }
        fin.worst_margin = ok ? 0 : -kInf;
        fin.pass = ok;
        fin.detail = "values and derivatives finite on the grid";
        out.push_back(fin);
        for (Field fd : {Field::f, Field::h}) {
            ClauseResult o = make_clause(std::string("1.") + std::string(field_name(fd)) + "_prime_origin", 1);
            take(o, 10.0 * r[0] - std::abs(p.d(fd)[0]), r[0]);
            o.detail = "|field'(r_start)| <= 10 r_start";
            finish(o, tol);
            out.push_back(o);
        }
    }

    const double rho_bound = c.rho0 * c.rho0 + A0 * A0 / (2.0 * c.params.lambda);
    out.push_back(bound_clause("2.f_nonneg", p, tol, [&](std::size_t i) { return f[i]; }));
    out.push_back(bound_clause("2.f_le_1", p, tol, [&](std::size_t i) { return 1.0 - f[i]; }));
    out.push_back(bound_clause("2.h_nonneg", p, tol, [&](std::size_t i) { return h[i]; }));
    out.push_back(bound_clause("2.h_le_1", p, tol, [&](std::size_t i) { return 1.0 - h[i]; }));
    out.push_back(bound_clause("2.rho_sq_bound", p, tol, [&](std::size_t i) { return rho_bound - rho[i] * rho[i]; }));
    out.push_back(bound_clause("2.A_le_A0", p, tol, [&](std::size_t i) { return A0 - A[i]; }));
    out.push_back(bound_clause("2.B_le_A0", p, tol, [&](std::size_t i) { return A0 - B[i]; }));
    out.push_back(bound_clause("2.B_ge_A", p, tol, [&](std::size_t i) { return B[i] - A[i]; }));

    out.push_back(monotone_clause("3.r_rho_increasing", 3, p, tol, 1, [&](std::size_t i) { return r[i] * rho[i]; }));
    out.push_back(monotone_clause("3.r_A_increasing", 3, p, tol, 1, [&](std::size_t i) { return r[i] * A[i]; }));
    out.push_back(monotone_clause("3.r_B_increasing", 3, p, tol, 1, [&](std::size_t i) { return r[i] * B[i]; }));
    out.push_back(
        monotone_clause("3.r_sigma_increasing", 3, p, tol, 1, [&](std::size_t i) { return r[i] * sigma[i]; }));
    out.push_back(monotone_clause("3.f_decreasing", 3, p, tol, -1, [&](std::size_t i) { return f[i]; }));
    out.push_back(monotone_clause("3.h_decreasing", 3, p, tol, -1, [&](std::size_t i) { return h[i]; }));
    out.push_back(monotone_clause("3.A_over_r_decreasing", 3, p, tol, -1, [&](std::size_t i) { return A[i] / r[i]; }));
    out.push_back(monotone_clause("3.B_over_r_decreasing", 3, p, tol, -1, [&](std::size_t i) { return B[i] / r[i]; }));

    const double k = c.k_exp;
    out.push_back(monotone_clause(
        "4.rho_weighted_decreasing", 4, p, tol, -1, [&](std::size_t i) { return std::pow(r[i], -k) * rho[i]; },
        [&](std::size_t i) { return rho[i] <= c.rho0; }));
    out.push_back(monotone_clause(
        "4.sigma_weighted_decreasing", 4, p, tol, -1, [&](std::size_t i) { return sigma[i] / (r[i] * r[i]); },
        [&](std::size_t i) { return sigma[i] <= c.sigma0; }));

    out.push_back(origin_bounded("5.A_over_r_bounded", p, Field::A, tol));
    out.push_back(origin_bounded("5.B_over_r_bounded", p, Field::B, tol));
    return out;
}

std::vector<DecayFit> fit_decay(const FieldProfile& p, const DerivedConstants& c, FitWindow window,
                               double resolution) {
    const Parameters& pr = c.params;
    const auto& r = p.r;
    const auto& f = p.v(Field::f);
    const auto& h = p.v(Field::h);
    const auto& rho = p.v(Field::rho);
    const auto& A = p.v(Field::A);
    const auto& B = p.v(Field::B);
    const auto& sigma = p.v(Field::sigma);
    const Window w = window_nodes(p, window);
    const double g2 = pr.g * pr.g, gp2 = pr.g_prime * pr.g_prime;

    std::vector<DecayFit> out;
    if (w.end <= w.begin + 1) {
        for (const char* q : {"f", "rho", "A", "h", "B-A", "sigma"}) {
            DecayFit d;
            d.quantity = q;
            d.status = FitStatus::InsufficientSignal;
            d.method = "none";
            d.window_lo = w.lo;
            d.window_hi = w.hi;
            d.pass = true;
            out.push_back(d);
        }
        return out;
    }

    const double floor = usable_floor(resolution);

    const Resolved tau = resolve_quantity(
        p, w,
        {[&](std::size_t i) { return r[i] * (B[i] - A[i]); },
         [&](std::size_t i) { return (g2 + gp2) * rho[i] * rho[i] / 4; },
         [&](std::size_t i) { return 2 / r[i] * (h[i] * h[i] * B[i] - f[i] * f[i] * A[i]); }},
        floor);
    // B - A as seen by the other comparison equations
    auto b_minus_a = [&](std::size_t i) { return tau.ok ? tau.q[i] / r[i] : B[i] - A[i]; };

    out.push_back(fit_resolved(
        p, w, "f", c.kappa_decay,
        resolve_quantity(p, w,
                         {[&](std::size_t i) { return f[i]; },
                          [&](std::size_t i) {
                              return g2 * rho[i] * rho[i] / 4 - A[i] * A[i] + (f[i] * f[i] - 1) / (r[i] * r[i]);
                          },
                          [](std::size_t) { return 0.0; }},
                         floor)));

    {
        DecayFit d = fit_resolved(
            p, w, "rho", std::sqrt(2.0) * c.mu0,
            resolve_quantity(p, w,
                             {[&](std::size_t i) { return r[i] * (rho[i] - c.rho0); },
                              [&](std::size_t i) { return pr.lambda / 2 * (rho[i] + c.rho0) * rho[i]; },
                              [&](std::size_t i) {
                                  const double d = b_minus_a(i);
                                  return (f[i] * f[i] - r[i] * r[i] * d * d / 2) * rho[i] / (2 * r[i]);
                              }},
                             floor));
        const double alt = std::min({std::sqrt(2.0) * pr.mu, 2 * c.kappa_decay, 2 * c.nu0});
        d.alt_predicted_rate = alt;
        if (d.status == FitStatus::Fitted) d.alt_relative_gap = std::abs(d.fitted_rate - alt) / alt;
        out.push_back(d);
    }

    {
        DecayFit d;
        d.quantity = "A";
        d.method = "bound";
        d.window_lo = w.lo;
        d.window_hi = w.hi;
        std::vector<double> x, y;
        double sup = 0;
        for (std::size_t i = w.begin; i < w.end; ++i) {
            const double q = r[i] * std::abs(A[i] - pr.A0);
            sup = std::max(sup, q);
            if (q >= floor) {
                x.push_back(std::log(r[i]));
                y.push_back(std::log(q));
            }
        }
        d.bound = sup;
        if (x.size() < 2) {
            d.status = FitStatus::InsufficientSignal;
            d.pass = true;
        } else {
            // power-law exponent of r |A - A0|; 0 for a Coulomb tail
            d.fitted_rate = slope(x, y);
            d.predicted_rate = 0;
            d.relative_gap = std::abs(d.fitted_rate);
            d.points = static_cast<int>(x.size());
            const double first = std::exp(y.front());
            d.pass = std::isfinite(sup) && sup <= (1 + kDecayBand) * first;
        }
        out.push_back(d);
    }

    out.push_back(fit_resolved(
        p, w, "h", c.zeta,
        resolve_quantity(p, w,
                         {[&](std::size_t i) { return h[i]; },
                          [&](std::size_t i) {
                              return gp2 * sigma[i] * sigma[i] - B[i] * B[i] + (h[i] * h[i] - 1) / (r[i] * r[i]);
                          },
                          [](std::size_t) { return 0.0; }},
                         floor)));

    out.push_back(fit_resolved(p, w, "B-A", c.nu0, tau));

    out.push_back(fit_resolved(
        p, w, "sigma", std::sqrt(2.0) * c.xi,
        resolve_quantity(p, w,
                         {[&](std::size_t i) { return r[i] * (sigma[i] - c.sigma0); },
                          [&](std::size_t i) { return pr.kappa_param * (sigma[i] + c.sigma0) * sigma[i]; },
                          [&](std::size_t i) { return 2 / r[i] * h[i] * h[i] * sigma[i]; }},
                         floor)));
    return out;
}

std::vector<ClauseResult> check_origin_orders(const FieldProfile& p, const DerivedConstants& c) {
    std::vector<ClauseResult> out;
    const double r_hi = 10.0 * p.r.front();
    for (Field fd : kAllFields) {
        ClauseResult cl;
        cl.id = std::string("origin.") + std::string(field_name(fd));
        cl.group = 0;
        const double expected = fd == Field::rho ? c.k_exp : nominal_exponent(fd);
        const double offset = field_offset(fd);
        std::vector<double> x, y;
        for (std::size_t i = 0; i < p.size() && p.r[i] <= r_hi * (1 + 1e-12); ++i) {
            const double q = std::abs(p.v(fd)[i] - offset);
            if (q > 0 && q >= kSignalFloor * std::max(1.0, offset)) {
                x.push_back(std::log(p.r[i]));
                y.push_back(std::log(q));
            }
        }
        cl.worst_radius = p.r.front();
        if (x.size() < 2) {
            cl.pass = true;
            cl.worst_margin = 0;
            cl.detail = "field vanishes near the origin; order not measurable";
        } else {
            const double s = slope(x, y);
            const double rel = std::abs(s - expected) / expected;
            cl.worst_margin = kOriginBand - rel;
            cl.pass = rel <= kOriginBand;
            cl.detail = "slope " + std::to_string(s) + " against " + std::to_string(expected);
        }
        out.push_back(cl);
    }
    return out;
}

VerificationReport verify(const FieldProfile& p, const DerivedConstants& c, double tol, FitWindow window,
                          double resolution) {
    VerificationReport rep;
    rep.clauses = check_theorem1(p, c, tol);
    rep.decay_fits = fit_decay(p, c, window, resolution);
    rep.origin_orders = check_origin_orders(p, c);
    rep.overall = true;
    for (const auto& cl : rep.clauses) rep.overall = rep.overall && cl.pass;
    for (const auto& d : rep.decay_fits) rep.overall = rep.overall && d.pass;
    for (const auto& cl : rep.origin_orders) rep.overall = rep.overall && cl.pass;
    return rep;
}

}  // namespace dyon
