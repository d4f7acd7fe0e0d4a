#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "dyon/field.hpp"

namespace dyon {

// Radii uniform in x = ln r + r / scale: geometric near the origin,
// uniform once r >> scale. Endpoints are exact.
std::vector<double> make_grid(double r_start, double r_max, std::size_t n, double scale);

// Same mapping with every interval of `coarse` split in two.
std::vector<double> refine_grid(const std::vector<double>& coarse, double scale);

struct FieldProfile {
    std::vector<double> r;
    std::array<std::vector<double>, kFieldCount> value;
    std::array<std::vector<double>, kFieldCount> deriv;
    // Accepted shooting parameter per field (C, F, a, b, E, D in storage order).
    std::array<double, kFieldCount> shoot_params{};

    static FieldProfile on_grid(std::vector<double> grid);

    std::size_t size() const { return r.size(); }
    bool empty() const { return r.empty(); }
    std::vector<double>& v(Field fd) { return value[idx(fd)]; }
    const std::vector<double>& v(Field fd) const { return value[idx(fd)]; }
    std::vector<double>& d(Field fd) { return deriv[idx(fd)]; }
    const std::vector<double>& d(Field fd) const { return deriv[idx(fd)]; }
};

struct PointSample {
    std::array<double, kFieldCount> value{};
    std::array<double, kFieldCount> deriv{};
};

// Leading behaviour below the first node: field = offset + coef * r^exponent.
struct PowerLaw {
    double offset = 0;
    double coef = 0;
    double exponent = 1;
    double value(double r) const;
    double deriv(double r) const;
};

// Nominal leading exponent at the origin (2 for f, h; k for rho; 1 otherwise).
double nominal_exponent(Field fd);

// Power law through the first two nodes.
PowerLaw origin_model(const FieldProfile& p, Field fd);

// Index i with r[i] <= x <= r[i+1] (clamped to valid intervals).
std::size_t locate(const std::vector<double>& r, double x);

// Cubic Hermite interpolation with the stored derivatives. Radii below the
// first node use origin_model; radii beyond the last node throw
// InterpolationOutOfRange.
PointSample sample(const FieldProfile& p, double r);
double sample_value(const FieldProfile& p, Field fd, double r);

// Resample onto another grid inside the same span.
FieldProfile resample(const FieldProfile& p, const std::vector<double>& grid);

// Three-point finite-difference weights on a non-uniform grid.
struct Stencil {
    double w[3];
};
Stencil first_central(const std::vector<double>& r, std::size_t i);
Stencil second_central(const std::vector<double>& r, std::size_t i);
// Derivative at the last node from nodes n-3, n-2, n-1 (weights in that order).
Stencil first_backward(const std::vector<double>& r);

}  // namespace dyon

namespace dyon {
// Values of all six fields at r (one interval lookup).
void sample_values(const FieldProfile& p, double r, std::array<double, kFieldCount>& out);
}  // namespace dyon
