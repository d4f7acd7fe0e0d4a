#pragma once

#include <vector>

namespace dyon {

// Sum of terms coef * r^exponent * (ln r)^log_power, log_power in {0, 1}.
struct PowerTerm {
    double coef = 0;
    double exponent = 0;
    int log_power = 0;
};

class PowerSeries {
public:
    PowerSeries() = default;
    static PowerSeries monomial(double coef, double exponent);
    static PowerSeries constant(double c) { return monomial(c, 0.0); }
    static PowerSeries from_term(PowerTerm t);

    const std::vector<PowerTerm>& terms() const { return terms_; }

    PowerSeries operator+(const PowerSeries& o) const;
    PowerSeries operator-(const PowerSeries& o) const;
    PowerSeries operator*(const PowerSeries& o) const;
    PowerSeries operator*(double s) const;
    // Multiply by r^e.
    PowerSeries shifted(double e) const;

    double value(double r) const;
    double deriv(double r) const;

private:
    std::vector<PowerTerm> terms_;
    void push(PowerTerm t);
};

inline PowerSeries operator*(double s, const PowerSeries& p) { return p * s; }

// Particular solution of u'' - c u / r^2 = source, where the homogeneous
// solutions are r^p and r^q (p + q = 1, p q = -c). Each source term s^b maps
// to r^(b+2) / ((b+2-p)(b+2-q)); a resonant term picks up a logarithm.
PowerSeries particular_solution(const PowerSeries& source, double p, double q);

}  // namespace dyon
