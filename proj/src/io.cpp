#include "dyon/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>

#include "dyon/errors.hpp"

namespace dyon {

namespace fs = std::filesystem;

namespace {

void reject_unknown(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw Error(ErrorKind::Config, where + " must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key())) throw Error(ErrorKind::Config, "unknown key '" + it.key() + "' in " + where);
}

double get_number(const json& obj, const std::string& key, const std::string& where) {
    const json& v = obj.at(key);
    if (!v.is_number()) throw Error(ErrorKind::Config, where + "." + key + " must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw Error(ErrorKind::Config, where + "." + key + " must be finite");
    return x;
}

long long get_integer(const json& obj, const std::string& key, const std::string& where) {
    const json& v = obj.at(key);
    if (!v.is_number_integer()) throw Error(ErrorKind::Config, where + "." + key + " must be an integer");
    return v.get<long long>();
}

void require_range(double x, double lo, double hi, const std::string& name) {
    if (!(x >= lo && x <= hi)) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s = %g outside [%g, %g]", name.c_str(), x, lo, hi);
        throw Error(ErrorKind::Config, buf);
    }
}

void write_row(std::FILE* f, const double* v, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) std::fprintf(f, i ? ",%.17g" : "%.17g", v[i]);
    std::fputc('\n', f);
}

struct File {
    std::FILE* f;
    explicit File(const fs::path& p) : f(std::fopen(p.c_str(), "w")) {
        if (!f) throw Error(ErrorKind::Io, "cannot open " + p.string() + " for writing");
    }
    ~File() {
        if (f) std::fclose(f);
    }
    void close() {
        const bool bad = std::ferror(f) != 0;
        const int rc = std::fclose(f);
        f = nullptr;
        if (bad || rc != 0) throw Error(ErrorKind::Io, "write failed");
    }
};

json nullable(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json clause_json(const ClauseResult& c) {
    return {{"id", c.id},
            {"group", c.group},
            {"pass", c.pass},
            {"worst_margin", nullable(c.worst_margin)},
            {"worst_radius", c.worst_radius},
            {"detail", c.detail}};
}

}  // namespace

RunConfig parse_config(const json& j) {
    RunConfig cfg;
    try {
        reject_unknown(j, "config", {"parameters", "solver", "flags", "output", "derived"});
        if (!j.contains("parameters")) throw Error(ErrorKind::Config, "missing 'parameters' block");

        const json& pj = j.at("parameters");
        reject_unknown(pj, "parameters", {"g", "g_prime", "lambda", "mu", "kappa_param", "m", "A0", "B0"});
        for (const char* key : {"g", "g_prime", "lambda", "mu", "kappa_param", "m", "A0", "B0"})
            if (!pj.contains(key)) throw Error(ErrorKind::Config, std::string("missing parameters.") + key);
        Parameters& p = cfg.params;
        p.g = get_number(pj, "g", "parameters");
        p.g_prime = get_number(pj, "g_prime", "parameters");
        p.lambda = get_number(pj, "lambda", "parameters");
        p.mu = get_number(pj, "mu", "parameters");
        p.kappa_param = get_number(pj, "kappa_param", "parameters");
        p.m = get_number(pj, "m", "parameters");
        p.A0 = get_number(pj, "A0", "parameters");
        p.B0 = get_number(pj, "B0", "parameters");

        if (j.contains("solver")) {
            const json& sj = j.at("solver");
            reject_unknown(sj, "solver",
                           {"alpha", "fp_tol", "max_iters", "damping", "grid_n", "r_start", "r_max", "grid_scale",
                            "anderson_depth"});
            SolveOptions& s = cfg.solver;
            if (sj.contains("alpha")) s.alpha = get_number(sj, "alpha", "solver");
            if (sj.contains("fp_tol")) {
                s.fp_tol = get_number(sj, "fp_tol", "solver");
                require_range(s.fp_tol, 1e-14, 1e-2, "solver.fp_tol");
            }
            if (sj.contains("max_iters")) {
                const long long it = get_integer(sj, "max_iters", "solver");
                require_range(static_cast<double>(it), 0, 1e6, "solver.max_iters");
                s.max_iters = static_cast<int>(it);
            }
            if (sj.contains("damping")) {
                s.damping = get_number(sj, "damping", "solver");
                if (!(s.damping > 0 && s.damping <= 1)) throw Error(ErrorKind::Config, "solver.damping must lie in (0, 1]");
            }
            if (sj.contains("grid_n")) {
                const long long n = get_integer(sj, "grid_n", "solver");
                require_range(static_cast<double>(n), 100, 1e6, "solver.grid_n");
                s.grid_n = static_cast<std::size_t>(n);
            }
            if (sj.contains("r_start")) {
                s.r_start = get_number(sj, "r_start", "solver");
                if (!(*s.r_start > 0)) throw Error(ErrorKind::Config, "solver.r_start must be positive");
            }
            if (sj.contains("r_max")) s.r_max = get_number(sj, "r_max", "solver");
            if (s.r_max && !(*s.r_max > s.r_start.value_or(0.0)))
                throw Error(ErrorKind::Config, "solver.r_max must exceed r_start");
            if (sj.contains("grid_scale")) {
                s.grid_scale = get_number(sj, "grid_scale", "solver");
                if (!(s.grid_scale > 0)) throw Error(ErrorKind::Config, "solver.grid_scale must be positive");
            }
            if (sj.contains("anderson_depth")) {
                const long long d = get_integer(sj, "anderson_depth", "solver");
                require_range(static_cast<double>(d), 0, 50, "solver.anderson_depth");
                s.anderson_depth = static_cast<int>(d);
            }
        }

        if (j.contains("flags")) {
            const json& fj = j.at("flags");
            reject_unknown(fj, "flags", {"oracle", "fit_window", "verify_tol"});
            if (fj.contains("oracle")) {
                if (!fj.at("oracle").is_boolean()) throw Error(ErrorKind::Config, "flags.oracle must be a boolean");
                cfg.oracle = fj.at("oracle").get<bool>();
            }
            if (fj.contains("fit_window")) {
                const json& w = fj.at("fit_window");
                if (!w.is_array() || w.size() != 2 || !w[0].is_number() || !w[1].is_number())
                    throw Error(ErrorKind::Config, "flags.fit_window must be [lo, hi]");
                cfg.window = {w[0].get<double>(), w[1].get<double>()};
                if (!(cfg.window.lo_frac > 0 && cfg.window.lo_frac < cfg.window.hi_frac && cfg.window.hi_frac <= 1))
                    throw Error(ErrorKind::Config, "flags.fit_window needs 0 < lo < hi <= 1");
            }
            if (fj.contains("verify_tol")) {
                cfg.verify_tol = get_number(fj, "verify_tol", "flags");
                require_range(cfg.verify_tol, 1e-14, 1e-2, "flags.verify_tol");
            }
        }

        if (j.contains("output")) {
            if (!j.at("output").is_string()) throw Error(ErrorKind::Config, "output must be a string");
            cfg.out_dir = j.at("output").get<std::string>();
        }
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Config, e.what());
    }
    return cfg;
}

RunConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot read config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::Config, std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

json params_json(const RunConfig& cfg, const DerivedConstants& c) {
    const Parameters& p = cfg.params;
    const SolveOptions& s = cfg.solver;
    json j;
    j["parameters"] = {{"g", p.g},         {"g_prime", p.g_prime},         {"lambda", p.lambda},
                       {"mu", p.mu},       {"kappa_param", p.kappa_param}, {"m", p.m},
                       {"A0", p.A0},       {"B0", p.B0}};
    j["solver"] = {{"alpha", c.alpha},
                   {"fp_tol", s.fp_tol},
                   {"max_iters", s.max_iters},
                   {"damping", s.damping},
                   {"grid_n", s.grid_n},
                   {"r_start", s.r_start.value_or(default_r_start(c))},
                   {"r_max", s.r_max.value_or(default_r_max(c))},
                   {"grid_scale", s.grid_scale},
                   {"anderson_depth", s.anderson_depth}};
    j["flags"] = {{"oracle", cfg.oracle},
                  {"fit_window", {cfg.window.lo_frac, cfg.window.hi_frac}},
                  {"verify_tol", cfg.verify_tol}};
    j["output"] = cfg.out_dir;
    j["derived"] = {{"rho0", c.rho0},   {"sigma0", c.sigma0}, {"k_exp", c.k_exp}, {"kappa_decay", c.kappa_decay},
                    {"zeta", c.zeta},   {"nu", c.nu},         {"nu0", c.nu0},     {"mu0", c.mu0},
                    {"xi", c.xi},       {"alpha", c.alpha}};
    return j;
}

json to_json(const FixedPointTrace& t) {
    json its = json::array();
    for (std::size_t i = 0; i < t.iterations.size(); ++i) {
        const IterationRecord& r = t.iterations[i];
        json sup, par, rm;
        for (Field fd : kAllFields) {
            const std::string name(field_name(fd));
            sup[name] = r.field_sup[idx(fd)];
            par[name] = r.params[idx(fd)];
            rm[name] = r.r_match[idx(fd)];
        }
        its.push_back({{"iteration", i},
                       {"residual", nullable(r.residual)},
                       {"step", r.step},
                       {"field_sup", sup},
                       {"shoot_params", par},
                       {"r_match", rm}});
    }
    return {{"converged", t.converged},
            {"iterations", t.iterations.size()},
            {"norm_alpha", t.norm_alpha},
            {"damping", t.damping},
            {"anderson_depth", t.anderson_depth},
            {"history", its}};
}

json to_json(const VerificationReport& r) {
    json clauses = json::array(), fits = json::array(), origin = json::array();
    for (const auto& c : r.clauses) clauses.push_back(clause_json(c));
    for (const auto& c : r.origin_orders) origin.push_back(clause_json(c));
    for (const auto& d : r.decay_fits) {
        json f = {{"quantity", d.quantity},
                  {"status", to_string(d.status)},
                  {"method", d.method},
                  {"fitted_rate", d.fitted_rate},
                  {"predicted_rate", d.predicted_rate},
                  {"relative_gap", d.relative_gap},
                  {"window", {d.window_lo, d.window_hi}},
                  {"points", d.points},
                  {"pass", d.pass}};
        if (d.alt_predicted_rate) f["proof_text_rate"] = *d.alt_predicted_rate;
        if (d.alt_relative_gap) f["proof_text_gap"] = *d.alt_relative_gap;
        if (d.bound) f["bound"] = *d.bound;
        fits.push_back(f);
    }
    return {{"overall", r.overall}, {"clauses", clauses}, {"decay_fits", fits}, {"origin_orders", origin}};
}

json to_json(const FieldGaps& g, double threshold) {
    json fields;
    for (Field fd : kAllFields)
        fields[std::string(field_name(fd))] = {{"gap", g.gap[idx(fd)]}, {"radius", g.radius[idx(fd)]}};
    return {{"fields", fields}, {"max_gap", g.max_gap()}, {"threshold", threshold},
            {"pass", g.max_gap() <= threshold}};
}

json to_json(const ValidationResult& v) {
    json a = json::array();
    for (const auto& x : v.violations) a.push_back({{"constraint", x.constraint}, {"detail", x.detail}});
    return a;
}

void write_profile_csv(const fs::path& path, const FieldProfile& p) {
    File f(path);
    std::fputs("r,f,rho,A,B,h,sigma,df,drho,dA,dB,dh,dsigma\n", f.f);
    double row[1 + 2 * kFieldCount];
    for (std::size_t i = 0; i < p.size(); ++i) {
        row[0] = p.r[i];
        for (std::size_t k = 0; k < kFieldCount; ++k) {
            row[1 + k] = p.value[k][i];
            row[1 + kFieldCount + k] = p.deriv[k][i];
        }
        write_row(f.f, row, 1 + 2 * kFieldCount);
    }
    f.close();
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

void emit_plot_data(const FieldProfile& p, const DerivedConstants& c, const fs::path& dir, FitWindow window) {
    if (p.empty()) throw Error(ErrorKind::Domain, "empty profile: nothing to plot");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());

    {
        File f(dir / "plotdata_fields.csv");
        std::fputs("r,f,rho,A,B,h,sigma\n", f.f);
        double row[1 + kFieldCount];
        for (std::size_t i = 0; i < p.size(); ++i) {
            row[0] = p.r[i];
            for (std::size_t k = 0; k < kFieldCount; ++k) row[1 + k] = p.value[k][i];
            write_row(f.f, row, 1 + kFieldCount);
        }
        f.close();
    }

    const auto& r = p.r;
    const auto& fv = p.v(Field::f);
    const auto& hv = p.v(Field::h);
    const auto& rho = p.v(Field::rho);
    const auto& A = p.v(Field::A);
    const auto& B = p.v(Field::B);
    const auto& sigma = p.v(Field::sigma);
    struct Quantity {
        const char* name;
        double rate;
        std::function<double(std::size_t)> q;
    };
    const Quantity qs[] = {
        {"f", c.kappa_decay, [&](std::size_t i) { return fv[i]; }},
        {"rho", std::sqrt(2.0) * c.mu0, [&](std::size_t i) { return r[i] * (rho[i] - c.rho0); }},
        {"A", 0.0, [&](std::size_t i) { return r[i] * (A[i] - c.params.A0); }},
        {"h", c.zeta, [&](std::size_t i) { return hv[i]; }},
        {"B-A", c.nu0, [&](std::size_t i) { return r[i] * (B[i] - A[i]); }},
        {"sigma", std::sqrt(2.0) * c.xi, [&](std::size_t i) { return r[i] * (sigma[i] - c.sigma0); }},
    };
    const double r_w = window.lo_frac * r.back();
    const std::size_t iw = std::min(locate(r, r_w) + 1, p.size() - 1);
    double offset[6];
    for (int k = 0; k < 6; ++k) offset[k] = std::log(std::abs(qs[k].q(iw))) + qs[k].rate * r[iw];

    File f(dir / "plotdata_decay.csv");
    std::fputs("r", f.f);
    for (const auto& q : qs) std::fprintf(f.f, ",log_%s,ref_%s", q.name, q.name);
    std::fputc('\n', f.f);
    double row[13];
    for (std::size_t i = 0; i < p.size(); ++i) {
        row[0] = r[i];
        for (int k = 0; k < 6; ++k) {
            row[1 + 2 * k] = std::log(std::abs(qs[k].q(i)));
            row[2 + 2 * k] = offset[k] - qs[k].rate * r[i];
        }
        write_row(f.f, row, 13);
    }
    f.close();
}

}  // namespace dyon
