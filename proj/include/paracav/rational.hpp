#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace paracav {

struct Fraction {
    std::int64_t num;
    std::int64_t den;
    double value() const { return static_cast<double>(num) / den; }
};

/// Continued-fraction convergents of x (x > 0), in order, stopping when the
/// denominator would exceed max_den or the expansion terminates.
inline std::vector<Fraction> continued_fraction_convergents(double x,
                                                            std::int64_t max_den) {
    std::vector<Fraction> out;
    std::int64_t p_prev = 1, q_prev = 0;  // convergent h_{-1}/k_{-1}
    std::int64_t p = 0, q = 1;            // would-be h_{-2}/k_{-2} ordering
    long double y = x;
    for (int it = 0; it < 64; ++it) {
        const long double fl = std::floor(y);
        if (fl > 4e18L) break;
        const std::int64_t a = static_cast<std::int64_t>(fl);
        const std::int64_t pn = a * p_prev + p;
        const std::int64_t qn = a * q_prev + q;
        if (qn > max_den || pn < 0 || qn < 0) break;
        out.push_back({pn, qn});
        p = p_prev;
        q = q_prev;
        p_prev = pn;
        q_prev = qn;
        const long double frac = y - fl;
        if (frac < 1e-15L) break;
        y = 1.0L / frac;
    }
    return out;
}

/// Best rational approximation of x with denominator <= max_den
/// (the final convergent inside the bound).
inline Fraction best_rational(double x, std::int64_t max_den) {
    const auto conv = continued_fraction_convergents(x, max_den);
    if (conv.empty()) return {static_cast<std::int64_t>(std::llround(x)), 1};
    return conv.back();
}

}  // namespace paracav
