#include "dyon/shooting.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>

#include "dyon/errors.hpp"
#include "dyon/radial_system.hpp"
#include "dyon/tail.hpp"

namespace dyon {

const char* to_string(Classification c) {
    switch (c) {
        case Classification::Set1: return "SET1";
        case Classification::Set2: return "SET2";
        case Classification::Set3Candidate: return "SET3_CANDIDATE";
    }
    return "?";
}

double param_sign(Field fd) { return (fd == Field::f || fd == Field::h) ? -1.0 : 1.0; }

double field_scale(Field fd, const DerivedConstants& c) {
    switch (fd) {
        case Field::rho: return c.rho0;
        case Field::sigma: return c.sigma0;
        case Field::A:
        case Field::B: return std::max(c.params.A0, 1e-3);
        default: return 1.0;
    }
}

namespace {

// Blow-up threshold standing in for "becomes infinite".
double blow_threshold(Field fd, const DerivedConstants& c) {
    if (fd == Field::sigma) return 2.0 * c.sigma0;
    return 2.0 * std::sqrt(rho_sq_bound(c));
}

// Event functions; an event fires when its function becomes negative.
struct Events {
    Field fd;
    const FieldProfile* frozen;
    const DerivedConstants* c;
    double blow = 0;

    // SET1 (derivative band).
    double e1(double r, double u, double du) const {
        switch (fd) {
            case Field::f:
            case Field::h: return -du;
            case Field::B: return u - sample_value(*frozen, Field::A, r);
            default: return u + r * du;  // (r * field)'
        }
    }
    // SET2 (value band).
    double e2(double r, double u, double /*du*/) const {
        switch (fd) {
            case Field::f:
            case Field::h: return u + 1.0;
            case Field::B: return c->params.B0 - u;
            case Field::A: return sample_value(*frozen, Field::B, r) - u;
            default: return blow - u;
        }
    }
};

}  // namespace

ShootOutcome shoot(Field fd, double param, const FieldProfile& frozen, const DerivedConstants& c, double r_max,
                   const ShootOptions& opt) {
    const auto& grid = frozen.r;
    if (grid.size() < 2) throw Error(ErrorKind::InvalidGrid, "frozen profile has fewer than two nodes", fd);
    if (r_max > grid.back() * (1.0 + 1e-12)) throw Error(ErrorKind::InterpolationOutOfRange, "r_max beyond frozen grid", fd);
    const double r0 = grid.front();
    const double off = field_offset(fd);

    ShootOutcome out;
    out.field = fd;
    out.shoot_param = param;
    out.trajectory.reserve(grid.size());

    const SeriesValue sv = origin_series_eval(make_series(fd, param, r0), r0, frozen, c);
    std::array<double, 2> y0 = {sv.deviation, sv.derivative};

    const Events ev{fd, &frozen, &c, blow_threshold(fd, c)};
    auto record = [&](double r, double u, double du) {
        out.trajectory.push_back({r, u + off, du, u});
    };

    double m1 = ev.e1(r0, y0[0], y0[1]);
    double m2 = ev.e2(r0, y0[0], y0[1]);
    record(r0, y0[0], y0[1]);
    out.derivative_margin = m1;
    out.value_margin = m2;
    if (m1 < 0 || m2 < 0) {
        out.classification = (m1 < 0) ? Classification::Set1 : Classification::Set2;
        out.event_radius = r0;
        return out;
    }

    const std::size_t k = idx(fd);
    std::array<double, kFieldCount> others{};
    auto rhs = [&](double r, const std::array<double, 2>& y) -> std::array<double, 2> {
        sample_values(frozen, r, others);
        others[k] = y[0] + off;
        return {y[1], field_accel(fd, r, y[0], y[1], others, c).value};
    };

    std::size_t next = 1;
    while (next < grid.size() && grid[next] <= r0) ++next;
    out.classification = Classification::Set3Candidate;
    out.event_radius = r_max;

    integrate_dp45<2>(rhs, r0, r_max, y0, opt.integrator, [&](const DenseStep<2>& ds) {
        const double ra = ds.r0, rb = ds.r1();
        const auto yb = ds.eval(rb);
        const double g1b = ev.e1(rb, yb[0], yb[1]);
        const double g2b = ev.e2(rb, yb[0], yb[1]);
        double r_event = std::numeric_limits<double>::infinity();
        Classification cls = Classification::Set3Candidate;
        if (g1b < 0 || g2b < 0) {
            const auto ya = ds.eval(ra);
            if (g1b < 0) {
                auto g = [&](double r) {
                    const auto y = ds.eval(r);
                    return ev.e1(r, y[0], y[1]);
                };
                const double re = locate_crossing(g, ra, rb, ev.e1(ra, ya[0], ya[1]), g1b, opt.event_tol);
                r_event = re;
                cls = Classification::Set1;
            }
            if (g2b < 0) {
                auto g = [&](double r) {
                    const auto y = ds.eval(r);
                    return ev.e2(r, y[0], y[1]);
                };
                const double re = locate_crossing(g, ra, rb, ev.e2(ra, ya[0], ya[1]), g2b, opt.event_tol);
                if (re < r_event) {
                    r_event = re;
                    cls = Classification::Set2;
                }
            }
        }
        const double limit = std::min(rb, r_event);
        while (next < grid.size() && grid[next] <= limit) {
            const double rr = grid[next];
            const auto y = ds.eval(rr);
            record(rr, y[0], y[1]);
            out.derivative_margin = std::min(out.derivative_margin, ev.e1(rr, y[0], y[1]));
            out.value_margin = std::min(out.value_margin, ev.e2(rr, y[0], y[1]));
            ++next;
        }
        if (cls != Classification::Set3Candidate) {
            out.classification = cls;
            out.event_radius = r_event;
            return false;
        }
        out.derivative_margin = std::min(out.derivative_margin, g1b);
        out.value_margin = std::min(out.value_margin, g2b);
        return true;
    });
    return out;
}

std::vector<Classification> classify_sweep(Field fd, const std::vector<double>& params, const FieldProfile& frozen,
                                           const DerivedConstants& c, double r_max, Exec exec,
                                           const ShootOptions& opt) {
    std::vector<Classification> out(params.size());
    const long long n = static_cast<long long>(params.size());
    if (exec == Exec::Serial) {
        for (long long i = 0; i < n; ++i) out[i] = shoot(fd, params[i], frozen, c, r_max, opt).classification;
        return out;
    }
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < n; ++i) {
        try {
            out[i] = shoot(fd, params[i], frozen, c, r_max, opt).classification;
        } catch (...) {
#pragma omp critical
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
    return out;
}

BisectResult bisect(Field fd, double lo, double hi, const FieldProfile& frozen, const DerivedConstants& c,
                    double r_max, double tol, const ShootOptions& opt) {
    if (lo > hi) std::swap(lo, hi);
    BisectResult res;
    res.outcome_lo = shoot(fd, lo, frozen, c, r_max, opt);
    res.outcome_hi = shoot(fd, hi, frozen, c, r_max, opt);
    res.param_lo = lo;
    res.param_hi = hi;
    const auto cl = res.outcome_lo.classification, ch = res.outcome_hi.classification;
    if (cl == Classification::Set3Candidate || ch == Classification::Set3Candidate) {
        res.status = BisectStatus::NoDichotomy;
        const bool use_lo = cl == Classification::Set3Candidate;
        res.param_star = use_lo ? lo : hi;
        res.outcome_star = use_lo ? res.outcome_lo : res.outcome_hi;
        res.widths.push_back(hi - lo);
        return res;
    }
    if (cl == ch) {
        std::ostringstream os;
        os << "bracket [" << lo << ", " << hi << "] classifies " << to_string(cl) << " at both ends";
        throw Error(ErrorKind::InvalidBracket, os.str(), fd);
    }
    res.widths.push_back(hi - lo);
    while (hi - lo > tol) {
        const double mid = lo + 0.5 * (hi - lo);
        if (!(mid > lo && mid < hi)) break;
        ShootOutcome om = shoot(fd, mid, frozen, c, r_max, opt);
        ++res.iterations;
        if (om.classification == Classification::Set3Candidate) {
            res.param_lo = lo;
            res.param_hi = hi;
            res.param_star = mid;
            res.outcome_star = std::move(om);
            res.widths.push_back(0.0);
            return res;
        }
        if (om.classification == cl) {
            lo = mid;
            res.outcome_lo = std::move(om);
        } else {
            hi = mid;
            res.outcome_hi = std::move(om);
        }
        res.widths.push_back(hi - lo);
    }
    res.param_lo = lo;
    res.param_hi = hi;
    res.param_star = lo + 0.5 * (hi - lo);
    res.outcome_star = shoot(fd, res.param_star, frozen, c, r_max, opt);
    return res;
}

bool zero_solution(Field fd, const FieldProfile& frozen, const DerivedConstants& c) {
    if (fd != Field::A && fd != Field::B) return false;
    const double target = fd == Field::A ? c.params.A0 : c.params.B0;
    if (target != 0.0) return false;
    const Field partner = fd == Field::A ? Field::B : Field::A;
    const auto& v = frozen.v(partner);
    const auto& d = frozen.d(partner);
    return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; }) &&
           std::all_of(d.begin(), d.end(), [](double x) { return x == 0.0; });
}

Bracket auto_bracket(Field fd, const FieldProfile& frozen, const DerivedConstants& c, double r_max,
                     const BracketOptions& bopt, const ShootOptions& opt) {
    if (zero_solution(fd, frozen, c)) return {0.0, 0.0, true};
    const double s = param_sign(fd);
    double p = s * bopt.start;
    Classification cls = shoot(fd, p, frozen, c, r_max, opt).classification;
    auto sorted = [](double a, double b) { return Bracket{std::min(a, b), std::max(a, b), false}; };
    if (cls == Classification::Set3Candidate) return {p, p, false};
    // Larger |param| moves every field towards SET2.
    const bool grow = cls == Classification::Set1;
    for (int i = 0; i < bopt.max_doublings; ++i) {
        const double prev = p;
        p = grow ? p * bopt.ratio : p / bopt.ratio;
        const Classification cn = shoot(fd, p, frozen, c, r_max, opt).classification;
        if (cn == Classification::Set3Candidate) return {p, p, false};
        if (cn != cls) return sorted(prev, p);
    }
    std::ostringstream os;
    os << "no sign change for field " << field_name(fd) << " after " << bopt.max_doublings << " expansions from "
       << s * bopt.start;
    throw Error(ErrorKind::BracketNotFound, os.str(), fd);
}

FieldSolution solve_field(Field fd, const FieldProfile& frozen, const DerivedConstants& c,
                          const FieldSolveOptions& opt) {
    const auto& grid = frozen.r;
    const std::size_t n = grid.size();
    const double r_max = grid.back();
    const double off = field_offset(fd);
    FieldSolution sol;
    sol.value.assign(n, 0.0);
    sol.deriv.assign(n, 0.0);

    if (zero_solution(fd, frozen, c)) {
        sol.r_match = r_max;
        return sol;
    }

    Bracket br;
    bool have = false;
    if (opt.warm_start > 0) {
        try {
            br = auto_bracket(fd, frozen, c, r_max, {opt.warm_start, 1.05, 40}, opt.shoot);
            have = true;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::BracketNotFound) throw;
        }
    }
    if (!have) br = auto_bracket(fd, frozen, c, r_max, {}, opt.shoot);

    ShootOutcome lo_out, hi_out;
    if (br.lo == br.hi) {
        lo_out = shoot(fd, br.lo, frozen, c, r_max, opt.shoot);
        hi_out = lo_out;
        sol.param = br.lo;
    } else {
        BisectResult bs = bisect(fd, br.lo, br.hi, frozen, c, r_max, 0.0, opt.shoot);
        sol.param = bs.param_star;
        sol.bisect_iterations = bs.iterations;
        if (bs.outcome_star.classification == Classification::Set3Candidate) {
            lo_out = bs.outcome_star;
            hi_out = bs.outcome_star;
        } else {
            lo_out = std::move(bs.outcome_lo);
            hi_out = std::move(bs.outcome_hi);
        }
    }

    const auto& L = lo_out.trajectory;
    const auto& H = hi_out.trajectory;
    const std::size_t common = std::min(L.size(), H.size());
    const double scale = field_scale(fd, c);
    std::size_t i_match = 0;
    for (std::size_t j = 0; j < common; ++j) {
        const double dv = std::abs(L[j].deviation - H[j].deviation);
        const double dd = std::abs(L[j].derivative - H[j].derivative);
        const double dscale = std::max(scale, 0.5 * std::abs(L[j].derivative + H[j].derivative));
        if (dv > opt.match_tol * scale || dd > opt.match_tol * dscale) break;
        i_match = j;
    }
    for (std::size_t j = 0; j <= i_match; ++j) {
        sol.value[j] = off + 0.5 * (L[j].deviation + H[j].deviation);
        sol.deriv[j] = 0.5 * (L[j].derivative + H[j].derivative);
    }
    if (i_match + 1 < n) {
        i_match = std::min(i_match, n - 4);
        complete_tail(fd, frozen, c, i_match, sol.value, sol.deriv);
    }
    sol.r_match = grid[i_match];
    return sol;
}

}  // namespace dyon
