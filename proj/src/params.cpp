#include "dyon/params.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dyon/errors.hpp"

namespace dyon {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Domain: return "DomainError";
        case ErrorKind::SingularRadius: return "SingularRadius";
        case ErrorKind::InterpolationOutOfRange: return "InterpolationOutOfRange";
        case ErrorKind::IntegratorStall: return "IntegratorStall";
        case ErrorKind::InvalidBracket: return "InvalidBracket";
        case ErrorKind::BracketNotFound: return "BracketNotFound";
        case ErrorKind::GridMismatch: return "GridMismatch";
        case ErrorKind::NotConverged: return "NotConverged";
        case ErrorKind::SingularJacobian: return "SingularJacobian";
        case ErrorKind::InvalidGrid: return "InvalidGrid";
        case ErrorKind::PreconditionViolation: return "PreconditionViolation";
        case ErrorKind::Config: return "ConfigError";
        case ErrorKind::Io: return "IoError";
    }
    return "Error";
}

double indicial_k() { return 0.5 * (std::sqrt(3.0) - 1.0); }

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

ValidationResult validate(const Parameters& p) {
    ValidationResult res;
    auto positive = [&](const char* name, double v) {
        if (!(v > 0) || !std::isfinite(v))
            res.violations.push_back({std::string(name) + " > 0", std::string(name) + " = " + fmt(v)});
    };
    positive("g", p.g);
    positive("g_prime", p.g_prime);
    positive("lambda", p.lambda);
    positive("mu", p.mu);
    positive("kappa_param", p.kappa_param);
    positive("m", p.m);
    if (!(p.A0 >= 0) || !std::isfinite(p.A0))
        res.violations.push_back({"A0 >= 0", "A0 = " + fmt(p.A0)});
    if (!(p.B0 >= 0) || !std::isfinite(p.B0))
        res.violations.push_back({"B0 >= 0", "B0 = " + fmt(p.B0)});
    if (!res.ok()) return res;

    const double rho0_sq = 2.0 * p.mu * p.mu / p.lambda;
    const double sigma0_sq = p.m * p.m / p.kappa_param;
    const double lhs1 = 0.25 * p.g * p.g * rho0_sq;
    if (!(lhs1 > p.A0 * p.A0))
        res.violations.push_back({"H1: g^2 rho0^2 / 4 > A0^2",
                                  fmt(lhs1) + " <= " + fmt(p.A0 * p.A0)});
    const double lhs2 = p.g_prime * p.g_prime * sigma0_sq;
    if (!(lhs2 > p.B0 * p.B0))
        res.violations.push_back({"H1: g'^2 sigma0^2 > B0^2",
                                  fmt(lhs2) + " <= " + fmt(p.B0 * p.B0)});
    if (p.A0 != p.B0)
        res.violations.push_back({"H2: B0 = A0", "A0 = " + fmt(p.A0) + ", B0 = " + fmt(p.B0)});
    return res;
}

DerivedConstants derive(const Parameters& p, std::optional<double> alpha) {
    DerivedConstants c;
    c.params = p;
    auto root = [](double v, const char* what) {
        if (!(v >= 0)) throw Error(ErrorKind::Domain, std::string("negative radicand in ") + what);
        return std::sqrt(v);
    };
    if (!(p.lambda > 0) || !(p.kappa_param > 0))
        throw Error(ErrorKind::Domain, "lambda and kappa_param must be positive");
    c.rho0 = p.mu * root(2.0 / p.lambda, "rho0");
    c.sigma0 = p.m / root(p.kappa_param, "sigma0");
    c.k_exp = indicial_k();
    c.kappa_decay = root(0.25 * p.g * p.g * c.rho0 * c.rho0 - p.A0 * p.A0, "kappa_decay");
    c.zeta = root(p.g_prime * p.g_prime * c.sigma0 * c.sigma0 - p.B0 * p.B0, "zeta");
    c.nu = 0.5 * c.rho0 * std::sqrt(p.g * p.g + p.g_prime * p.g_prime);
    c.nu0 = std::min(2.0 * c.kappa_decay, c.nu);
    c.mu0 = std::min({p.mu, std::sqrt(2.0) * c.kappa_decay, c.nu / std::sqrt(2.0)});
    c.xi = std::sqrt(p.kappa_param) * c.sigma0;
    c.alpha = alpha.value_or(0.5 * c.k_exp);
    if (!(c.alpha > 0 && c.alpha < c.k_exp))
        throw Error(ErrorKind::Domain, "alpha must lie in (0, k)");
    return c;
}

double default_r_max(const DerivedConstants& c) {
    const double rate = std::min({c.kappa_decay, c.zeta, c.nu0, c.mu0, c.xi});
    return 40.0 / rate;
}

double default_r_start(const DerivedConstants& c) {
    return 1e-3 * std::min(1.0, 1.0 / c.kappa_decay);
}

double rho_sq_bound(const DerivedConstants& c) {
    return c.rho0 * c.rho0 + c.params.A0 * c.params.A0 / (2.0 * c.params.lambda);
}

}  // namespace dyon
