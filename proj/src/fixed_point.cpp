#include "dyon/fixed_point.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include <Eigen/Dense>

#include "dyon/shooting.hpp"

namespace dyon {

double weighted_norm(const std::vector<double>& r, const std::vector<double>& d_rho, const std::vector<double>& d_A,
                     const std::vector<double>& d_Phi, double alpha, Exec exec) {
    const std::size_t n = r.size();
    if (d_rho.size() != n || d_A.size() != n || d_Phi.size() != n)
        throw Error(ErrorKind::GridMismatch, "weighted_norm: deltas are not on the same grid");
    return kernels::weighted_sup(r.data(), d_rho.data(), d_A.data(), d_Phi.data(), n, alpha, exec);
}

namespace {

void check_precondition(const FieldProfile& p, double tol) {
    const auto& A = p.v(Field::A);
    const auto& B = p.v(Field::B);
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (B[i] - A[i] < -tol) {
            std::ostringstream os;
            os << "B < A at r = " << p.r[i] << " (B - A = " << B[i] - A[i] << ")";
            throw Error(ErrorKind::PreconditionViolation, os.str());
        }
    }
}

}  // namespace

FieldProfile schauder_step(const FieldProfile& profile, const DerivedConstants& c, StepInfo* info,
                           double precondition_tol) {
    const std::size_t n = profile.size();
    if (n < 4) throw Error(ErrorKind::InvalidGrid, "profile needs at least four nodes");
    for (std::size_t k = 0; k < kFieldCount; ++k)
        if (profile.value[k].size() != n || profile.deriv[k].size() != n)
            throw Error(ErrorKind::GridMismatch, "field arrays do not match the grid");
    check_precondition(profile, precondition_tol);

    FieldProfile work = profile;
    for (Field fd : kSolveOrder) {
        FieldSolveOptions opt;
        opt.warm_start = std::abs(profile.shoot_params[idx(fd)]);
        FieldSolution sol;
        try {
            sol = solve_field(fd, work, c, opt);
        } catch (const Error& e) {
            if (e.field()) throw;
            throw Error(e.kind(), std::string(field_name(fd)) + ": " + e.what(), fd);
        }
        work.v(fd) = std::move(sol.value);
        work.d(fd) = std::move(sol.deriv);
        work.shoot_params[idx(fd)] = sol.param;
        if (info) {
            info->r_match[idx(fd)] = sol.r_match;
            info->bisect_iterations[idx(fd)] = sol.bisect_iterations;
        }
    }
    return work;
}

FieldProfile initial_guess(const DerivedConstants& c, const std::vector<double>& grid) {
    FieldProfile p = FieldProfile::on_grid(grid);
    const Parameters& q = c.params;
    const double rm = 1.0 / c.kappa_decay;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double r = grid[i];
        const double x = r / rm;
        const double den = 1.0 + x * x;
        p.v(Field::f)[i] = p.v(Field::h)[i] = 1.0 / den;
        p.d(Field::f)[i] = p.d(Field::h)[i] = -2.0 * x / (rm * den * den);
        auto th = [&](Field fd, double amp, double rate) {
            const double t = std::tanh(rate * r);
            p.v(fd)[i] = amp * t;
            p.d(fd)[i] = amp * rate * (1.0 - t * t);
        };
        th(Field::rho, c.rho0, q.mu);
        th(Field::sigma, c.sigma0, c.xi);
        th(Field::A, q.A0, c.nu);
        th(Field::B, q.B0, c.nu);
    }
    return p;
}

std::vector<double> solver_grid(const DerivedConstants& c, const SolveOptions& opt) {
    const double r0 = opt.r_start.value_or(default_r_start(c));
    const double r1 = opt.r_max.value_or(default_r_max(c));
    return make_grid(r0, r1, opt.grid_n, opt.grid_scale);
}

namespace {

using Vec = Eigen::VectorXd;

// The map's state: rho, A and h (f, B and sigma are recomputed from it).
constexpr std::array<Field, 3> kState = {Field::rho, Field::A, Field::h};

Vec pack(const FieldProfile& p) {
    const std::size_t n = p.size();
    Vec v(static_cast<Eigen::Index>(2 * kState.size() * n));
    Eigen::Index o = 0;
    for (Field fd : kState) {
        for (std::size_t i = 0; i < n; ++i) v[o++] = p.v(fd)[i];
        for (std::size_t i = 0; i < n; ++i) v[o++] = p.d(fd)[i];
    }
    return v;
}

void unpack(const Vec& v, FieldProfile& p) {
    const std::size_t n = p.size();
    Eigen::Index o = 0;
    for (Field fd : kState) {
        for (std::size_t i = 0; i < n; ++i) p.v(fd)[i] = v[o++];
        for (std::size_t i = 0; i < n; ++i) p.d(fd)[i] = v[o++];
    }
}

// Least-squares weights: the norm weight on values, nothing on derivatives.
Vec ls_weights(const std::vector<double>& r, double alpha) {
    const std::size_t n = r.size();
    Vec w = Vec::Zero(static_cast<Eigen::Index>(2 * kState.size() * n));
    Eigen::Index o = 0;
    for (std::size_t k = 0; k < kState.size(); ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            const double ra = std::pow(r[i], alpha);
            w[o++] = (1.0 + ra) / ra;
        }
        o += static_cast<Eigen::Index>(n);
    }
    return w;
}

class Anderson {
public:
    Anderson(int depth, double beta, Vec weights) : depth_(depth), beta_(beta), w_(std::move(weights)) {}

    void reset() {
        xs_.clear();
        fs_.clear();
    }

    // x: current iterate, f = F(x) - x. Returns the next iterate.
    Vec next(const Vec& x, const Vec& f, bool& extrapolated) {
        xs_.push_back(x);
        fs_.push_back(f);
        while (static_cast<int>(xs_.size()) > depth_ + 1) {
            xs_.pop_front();
            fs_.pop_front();
        }
        const int m = static_cast<int>(xs_.size()) - 1;
        extrapolated = m > 0;
        if (m == 0) return x + beta_ * f;
        Eigen::MatrixXd dF(f.size(), m), dX(x.size(), m);
        for (int j = 0; j < m; ++j) {
            dF.col(j) = fs_[static_cast<std::size_t>(j + 1)] - fs_[static_cast<std::size_t>(j)];
            dX.col(j) = xs_[static_cast<std::size_t>(j + 1)] - xs_[static_cast<std::size_t>(j)];
        }
        const Eigen::MatrixXd wdF = w_.asDiagonal() * dF;
        const Vec wf = w_.asDiagonal() * f;
        const Vec gamma = wdF.colPivHouseholderQr().solve(wf);
        return x + beta_ * f - (dX + beta_ * dF) * gamma;
    }

private:
    int depth_;
    double beta_;
    Vec w_;
    std::deque<Vec> xs_, fs_;
};

IterationRecord make_record(const FieldProfile& x, const FieldProfile& y, double alpha, const StepInfo& info) {
    IterationRecord rec;
    std::vector<double> dphi(x.size()), drho(x.size()), dA(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        drho[i] = y.v(Field::rho)[i] - x.v(Field::rho)[i];
        dA[i] = y.v(Field::A)[i] - x.v(Field::A)[i];
        dphi[i] = (y.v(Field::h)[i] - 1.0) - (x.v(Field::h)[i] - 1.0);
    }
    rec.residual = weighted_norm(x.r, drho, dA, dphi, alpha);
    for (std::size_t k = 0; k < kFieldCount; ++k)
        rec.field_sup[k] = kernels::max_abs_diff(x.value[k].data(), y.value[k].data(), x.size(), Exec::Parallel).value;
    rec.params = y.shoot_params;
    rec.r_match = info.r_match;
    return rec;
}

}  // namespace

SolveResult solve_dyon(const Parameters& params, const SolveOptions& opt) {
    const ValidationResult vr = validate(params);
    if (!vr.ok()) {
        std::string msg = "invalid parameters:";
        for (const auto& v : vr.violations) msg += " [" + v.constraint + ": " + v.detail + "]";
        throw Error(ErrorKind::Domain, msg);
    }
    SolveResult res;
    res.consts = derive(params, opt.alpha);
    const DerivedConstants& c = res.consts;
    FixedPointTrace& trace = res.trace;
    trace.norm_alpha = c.alpha;
    trace.damping = opt.damping;
    trace.anderson_depth = opt.anderson_depth;

    FieldProfile x = initial_guess(c, solver_grid(c, opt));
    if (opt.max_iters <= 0) {
        res.profile = std::move(x);
        return res;
    }

    Anderson acc(opt.anderson_depth, opt.damping, ls_weights(x.r, c.alpha));
    std::string step_kind = "initial";
    double best = std::numeric_limits<double>::infinity();
    FieldProfile y;

    for (int it = 0; it < opt.max_iters; ++it) {
        StepInfo info;
        // Iterates after the first carry extrapolated (rho, A, h) next to
        // freshly solved (f, B, sigma), so B >= A is only checked on the
        // initial guess here and on the solved profiles by the verifier.
        y = schauder_step(x, c, &info, it == 0 ? opt.precondition_tol : std::numeric_limits<double>::infinity());
        IterationRecord rec = make_record(x, y, c.alpha, info);
        rec.step = step_kind;
        trace.iterations.push_back(rec);
        if (rec.residual < opt.fp_tol) {
            trace.converged = true;
            res.profile = std::move(y);
            return res;
        }
        const bool reset = rec.residual > 10.0 * best;
        if (reset) acc.reset();
        best = std::min(best, rec.residual);

        const Vec xv = pack(x), yv = pack(y);
        bool extrapolated = false;
        const Vec next = opt.anderson_depth > 0 ? acc.next(xv, yv - xv, extrapolated) : Vec(xv + opt.damping * (yv - xv));
        step_kind = reset ? "restart" : (extrapolated ? "anderson" : "damped");
        x = y;
        unpack(next, x);
    }
    std::ostringstream os;
    os << "fixed point not converged after " << opt.max_iters << " iterations (last residual "
       << trace.iterations.back().residual << ")";
    throw NotConvergedError(os.str(), trace, y);
}

}  // namespace dyon
