#include "dyon/profile.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dyon/errors.hpp"
#include "dyon/params.hpp"

namespace dyon {

namespace {

double map_x(double r, double scale) { return std::log(r) + r / scale; }

double invert_x(double x, double scale, double guess) {
    double r = guess;
    for (int it = 0; it < 100; ++it) {
        const double fx = map_x(r, scale) - x;
        const double step = fx / (1.0 / r + 1.0 / scale);
        double next = r - step;
        if (next <= 0) next = 0.5 * r;
        if (std::abs(next - r) <= 1e-15 * r) return next;
        r = next;
    }
    return r;
}

}  // namespace

std::vector<double> make_grid(double r_start, double r_max, std::size_t n, double scale) {
    if (n < 2 || !(r_start > 0) || !(r_max > r_start) || !(scale > 0))
        throw Error(ErrorKind::InvalidGrid, "grid needs n >= 2 and 0 < r_start < r_max");
    std::vector<double> r(n);
    const double x0 = map_x(r_start, scale);
    const double x1 = map_x(r_max, scale);
    r[0] = r_start;
    r[n - 1] = r_max;
    double guess = r_start;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double x = x0 + (x1 - x0) * static_cast<double>(i) / static_cast<double>(n - 1);
        guess = invert_x(x, scale, guess);
        r[i] = guess;
    }
    return r;
}

std::vector<double> refine_grid(const std::vector<double>& coarse, double scale) {
    if (coarse.size() < 2) throw Error(ErrorKind::InvalidGrid, "cannot refine a grid with < 2 nodes");
    std::vector<double> fine;
    fine.reserve(2 * coarse.size() - 1);
    for (std::size_t i = 0; i + 1 < coarse.size(); ++i) {
        fine.push_back(coarse[i]);
        const double xm = 0.5 * (map_x(coarse[i], scale) + map_x(coarse[i + 1], scale));
        fine.push_back(invert_x(xm, scale, coarse[i]));
    }
    fine.push_back(coarse.back());
    return fine;
}

FieldProfile FieldProfile::on_grid(std::vector<double> grid) {
    FieldProfile p;
    p.r = std::move(grid);
    for (auto& v : p.value) v.assign(p.r.size(), 0.0);
    for (auto& d : p.deriv) d.assign(p.r.size(), 0.0);
    return p;
}

double PowerLaw::value(double r) const {
    return coef == 0 ? offset : offset + coef * std::pow(r, exponent);
}

double PowerLaw::deriv(double r) const {
    return coef == 0 ? 0.0 : coef * exponent * std::pow(r, exponent - 1.0);
}

double nominal_exponent(Field fd) {
    switch (fd) {
        case Field::f:
        case Field::h: return 2.0;
        case Field::rho: return indicial_k();
        default: return 1.0;
    }
}

PowerLaw origin_model(const FieldProfile& p, Field fd) {
    PowerLaw law;
    law.offset = field_offset(fd);
    law.exponent = nominal_exponent(fd);
    if (p.size() < 2) return law;
    const double r0 = p.r[0], r1 = p.r[1];
    const double d0 = p.v(fd)[0] - law.offset;
    const double d1 = p.v(fd)[1] - law.offset;
    if (d0 == 0.0) return law;
    if (d0 * d1 > 0) {
        const double e = std::log(d1 / d0) / std::log(r1 / r0);
        if (std::isfinite(e)) law.exponent = std::max(e, 0.0);
    }
    law.coef = d0 / std::pow(r0, law.exponent);
    return law;
}

std::size_t locate(const std::vector<double>& r, double x) {
    auto it = std::upper_bound(r.begin(), r.end(), x);
    std::size_t i = static_cast<std::size_t>(it - r.begin());
    if (i == 0) return 0;
    i -= 1;
    if (i + 1 >= r.size()) i = r.size() - 2;
    return i;
}

PointSample sample(const FieldProfile& p, double r) {
    PointSample s;
    const std::size_t n = p.size();
    if (n < 2) throw Error(ErrorKind::InterpolationOutOfRange, "profile has fewer than two nodes");
    if (r < p.r[0]) {
        for (Field fd : kAllFields) {
            const PowerLaw law = origin_model(p, fd);
            s.value[idx(fd)] = law.value(r);
            s.deriv[idx(fd)] = law.deriv(r);
        }
        return s;
    }
    if (r > p.r[n - 1] * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "radius " << r << " beyond frozen grid end " << p.r[n - 1];
        throw Error(ErrorKind::InterpolationOutOfRange, os.str());
    }
    const std::size_t i = locate(p.r, r);
    const double h = p.r[i + 1] - p.r[i];
    const double t = (r - p.r[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    const double d00 = (6 * t2 - 6 * t) / h, d10 = 3 * t2 - 4 * t + 1;
    const double d01 = (-6 * t2 + 6 * t) / h, d11 = 3 * t2 - 2 * t;
    for (std::size_t k = 0; k < kFieldCount; ++k) {
        const double y0 = p.value[k][i], y1 = p.value[k][i + 1];
        const double m0 = p.deriv[k][i], m1 = p.deriv[k][i + 1];
        s.value[k] = h00 * y0 + h10 * h * m0 + h01 * y1 + h11 * h * m1;
        s.deriv[k] = d00 * y0 + d10 * m0 + d01 * y1 + d11 * m1;
    }
    return s;
}

double sample_value(const FieldProfile& p, Field fd, double r) {
    const std::size_t n = p.size();
    if (n < 2) throw Error(ErrorKind::InterpolationOutOfRange, "profile has fewer than two nodes");
    if (r < p.r[0]) return origin_model(p, fd).value(r);
    if (r > p.r[n - 1] * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "radius " << r << " beyond frozen grid end " << p.r[n - 1];
        throw Error(ErrorKind::InterpolationOutOfRange, os.str());
    }
    const std::size_t i = locate(p.r, r);
    const double h = p.r[i + 1] - p.r[i];
    const double t = (r - p.r[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    const auto& y = p.v(fd);
    const auto& m = p.d(fd);
    return (2 * t3 - 3 * t2 + 1) * y[i] + (t3 - 2 * t2 + t) * h * m[i] + (-2 * t3 + 3 * t2) * y[i + 1] +
           (t3 - t2) * h * m[i + 1];
}

FieldProfile resample(const FieldProfile& p, const std::vector<double>& grid) {
    FieldProfile out = FieldProfile::on_grid(grid);
    out.shoot_params = p.shoot_params;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const PointSample s = sample(p, grid[j]);
        for (std::size_t k = 0; k < kFieldCount; ++k) {
            out.value[k][j] = s.value[k];
            out.deriv[k][j] = s.deriv[k];
        }
    }
    return out;
}

Stencil first_central(const std::vector<double>& r, std::size_t i) {
    const double h1 = r[i] - r[i - 1], h2 = r[i + 1] - r[i];
    return {{-h2 / (h1 * (h1 + h2)), (h2 - h1) / (h1 * h2), h1 / (h2 * (h1 + h2))}};
}

Stencil second_central(const std::vector<double>& r, std::size_t i) {
    const double h1 = r[i] - r[i - 1], h2 = r[i + 1] - r[i];
    return {{2.0 / (h1 * (h1 + h2)), -2.0 / (h1 * h2), 2.0 / (h2 * (h1 + h2))}};
}

Stencil first_backward(const std::vector<double>& r) {
    const std::size_t n = r.size();
    const double a = r[n - 1] - r[n - 2], b = r[n - 2] - r[n - 3];
    return {{a / (b * (a + b)), -(a + b) / (a * b), 1.0 / a + 1.0 / (a + b)}};
}

}  // namespace dyon

namespace dyon {

void sample_values(const FieldProfile& p, double r, std::array<double, kFieldCount>& out) {
    const std::size_t n = p.size();
    if (n < 2) throw Error(ErrorKind::InterpolationOutOfRange, "profile has fewer than two nodes");
    if (r < p.r[0]) {
        for (Field fd : kAllFields) out[idx(fd)] = origin_model(p, fd).value(r);
        return;
    }
    if (r > p.r[n - 1] * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "radius " << r << " beyond frozen grid end " << p.r[n - 1];
        throw Error(ErrorKind::InterpolationOutOfRange, os.str());
    }
    const std::size_t i = locate(p.r, r);
    const double h = p.r[i + 1] - p.r[i];
    const double t = (r - p.r[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = (t3 - 2 * t2 + t) * h;
    const double h01 = -2 * t3 + 3 * t2, h11 = (t3 - t2) * h;
    for (std::size_t k = 0; k < kFieldCount; ++k)
        out[k] = h00 * p.value[k][i] + h10 * p.deriv[k][i] + h01 * p.value[k][i + 1] + h11 * p.deriv[k][i + 1];
}

}  // namespace dyon
