#include "dyon/power_series.hpp"

#include <cassert>
#include <cmath>

namespace dyon {

PowerSeries PowerSeries::monomial(double coef, double exponent) {
    PowerSeries s;
    s.push({coef, exponent, 0});
    return s;
}

PowerSeries PowerSeries::from_term(PowerTerm t) {
    PowerSeries s;
    s.push(t);
    return s;
}

void PowerSeries::push(PowerTerm t) {
    if (t.coef == 0.0) return;
    for (auto& e : terms_) {
        if (e.exponent == t.exponent && e.log_power == t.log_power) {
            e.coef += t.coef;
            return;
        }
    }
    terms_.push_back(t);
}

PowerSeries PowerSeries::operator+(const PowerSeries& o) const {
    PowerSeries s = *this;
    for (const auto& t : o.terms_) s.push(t);
    return s;
}

PowerSeries PowerSeries::operator-(const PowerSeries& o) const { return *this + o * -1.0; }

PowerSeries PowerSeries::operator*(const PowerSeries& o) const {
    PowerSeries s;
    for (const auto& a : terms_)
        for (const auto& b : o.terms_) s.push({a.coef * b.coef, a.exponent + b.exponent, a.log_power + b.log_power});
    return s;
}

PowerSeries PowerSeries::operator*(double k) const {
    PowerSeries s;
    for (auto t : terms_) {
        t.coef *= k;
        s.push(t);
    }
    return s;
}

PowerSeries PowerSeries::shifted(double e) const {
    PowerSeries s = *this;
    for (auto& t : s.terms_) t.exponent += e;
    return s;
}

double PowerSeries::value(double r) const {
    const double lr = std::log(r);
    double sum = 0;
    for (const auto& t : terms_) {
        double v = t.coef * std::pow(r, t.exponent);
        if (t.log_power > 0) v *= std::pow(lr, t.log_power);
        sum += v;
    }
    return sum;
}

double PowerSeries::deriv(double r) const {
    const double lr = std::log(r);
    double sum = 0;
    for (const auto& t : terms_) {
        const double base = t.coef * std::pow(r, t.exponent - 1.0);
        if (t.log_power == 0) {
            sum += base * t.exponent;
        } else {
            const double lp = std::pow(lr, t.log_power);
            const double lpm = std::pow(lr, t.log_power - 1);
            sum += base * (t.exponent * lp + t.log_power * lpm);
        }
    }
    return sum;
}

PowerSeries particular_solution(const PowerSeries& source, double p, double q) {
    constexpr double kResonance = 1e-9;
    PowerSeries out;
    for (const auto& t : source.terms()) {
        assert(t.log_power == 0);
        const double m = t.exponent + 2.0;
        if (std::abs(m - p) < kResonance)
            out = out + PowerSeries::from_term({t.coef / (p - q), p, 1});
        else if (std::abs(m - q) < kResonance)
            out = out + PowerSeries::from_term({t.coef / (q - p), q, 1});
        else
            out = out + PowerSeries::monomial(t.coef / ((m - p) * (m - q)), m);
    }
    return out;
}

}  // namespace dyon
