#pragma once

#include <optional>
#include <string>
#include <vector>

namespace dyon {

struct Parameters {
    double g = 1.0;
    double g_prime = 1.0;
    double lambda = 2.0;
    double mu = 1.0;
    double kappa_param = 1.0;
    double m = 1.0;
    double A0 = 0.0;
    double B0 = 0.0;
};

struct Violation {
    std::string constraint;
    std::string detail;
};

struct ValidationResult {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

ValidationResult validate(const Parameters& p);

struct DerivedConstants {
    Parameters params;
    double rho0 = 0;
    double sigma0 = 0;
    double k_exp = 0;
    double kappa_decay = 0;
    double zeta = 0;
    double nu = 0;
    double nu0 = 0;
    double mu0 = 0;
    double xi = 0;
    double alpha = 0;
};

// Throws Error(Domain) on negative radicands or alpha outside (0, k).
DerivedConstants derive(const Parameters& p, std::optional<double> alpha = std::nullopt);

double indicial_k();

// Default truncation radius 40 / min(kappa, zeta, nu0, mu0, xi).
double default_r_max(const DerivedConstants& c);
// Default series hand-off radius 1e-3 * min(1, 1/kappa).
double default_r_start(const DerivedConstants& c);

// Upper bound of rho^2 from the bounds clause: rho0^2 + A0^2/(2 lambda).
double rho_sq_bound(const DerivedConstants& c);

}  // namespace dyon
