#pragma once

#include <array>

#include "dyon/field.hpp"
#include "dyon/params.hpp"
#include "dyon/power_series.hpp"
#include "dyon/profile.hpp"

namespace dyon {

inline constexpr double kMinRadius = 1e-12;

struct FieldState {
    double r = 1.0;
    std::array<double, kFieldCount> value{};
    std::array<double, kFieldCount> deriv{};
};

// Second derivatives of all six fields in explicit form.
std::array<double, kFieldCount> rhs_full(const FieldState& s, const DerivedConstants& c);

// Partial derivatives of rhs_full: d_value[i][j] = d(field_i'')/d(field_j).
struct RhsJacobian {
    std::array<std::array<double, kFieldCount>, kFieldCount> d_value{};
    std::array<std::array<double, kFieldCount>, kFieldCount> d_deriv{};
};
RhsJacobian rhs_full_jacobian(const FieldState& s, const DerivedConstants& c);

// One field's second derivative in the deviation variable u = field - offset
// (offset 1 for f and h), with the other fields held at `others` (bare values).
struct Accel {
    double value = 0;
    double d_u = 0;
    double d_du = 0;
};
Accel field_accel(Field fd, double r, double u, double du, const std::array<double, kFieldCount>& others,
                  const DerivedConstants& c);

// Same equation with the field's own value passed bare (no offset); used where
// f and h are small.
Accel field_accel_bare(Field fd, double r, double y, double dy, const std::array<double, kFieldCount>& others,
                       const DerivedConstants& c);

// Single-field equation with the other fields read from `frozen` at s.r.
// The field's own value and derivative are taken from s.
double rhs_single(Field fd, const FieldState& s, const FieldProfile& frozen, const DerivedConstants& c);

struct OriginSeries {
    Field field = Field::f;
    double shoot_param = 0;
    double leading_exponent = 2;
    double r_start = 1e-3;
};

OriginSeries make_series(Field fd, double shoot_param, double r_start);

struct SeriesValue {
    double value = 0;
    double derivative = 0;
    double deviation = 0;  // value - offset, without cancellation
};

// First Picard iterate of the field's integral equation, in closed form.
SeriesValue origin_series_eval(const OriginSeries& s, double r, const FieldProfile& frozen,
                               const DerivedConstants& c);

// The regular variable (psi, Phi, r*sigma, r*B, r*A or r*rho) as a power series.
PowerSeries origin_series_regular(const OriginSeries& s, const FieldProfile& frozen, const DerivedConstants& c);

}  // namespace dyon
