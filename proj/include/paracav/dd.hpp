#pragma once

#include <cmath>

// Double-double arithmetic (~31 significant digits) built on error-free
// transformations. Used internally by the confluent hypergeometric series,
// whose alternating terms cancel by up to e^|z| on the imaginary axis; plain
// doubles would lose the result entirely beyond |z| ~ 35.

namespace paracav::detail {

struct DD {
    double hi{0}, lo{0};
    DD() = default;
    DD(double h) : hi(h) {}
    DD(double h, double l) : hi(h), lo(l) {}
};

inline DD two_sum(double a, double b) {
    const double s = a + b;
    const double bb = s - a;
    return {s, (a - (s - bb)) + (b - bb)};
}

inline DD quick_two_sum(double a, double b) {
    const double s = a + b;
    return {s, b - (s - a)};
}

inline DD two_prod(double a, double b) {
    const double p = a * b;
    return {p, std::fma(a, b, -p)};
}

inline DD operator+(DD a, DD b) {
    DD s = two_sum(a.hi, b.hi);
    s.lo += a.lo + b.lo;
    return quick_two_sum(s.hi, s.lo);
}

inline DD operator-(DD a) { return {-a.hi, -a.lo}; }
inline DD operator-(DD a, DD b) { return a + (-b); }

inline DD operator*(DD a, DD b) {
    DD p = two_prod(a.hi, b.hi);
    p.lo += a.hi * b.lo + a.lo * b.hi;
    return quick_two_sum(p.hi, p.lo);
}

inline DD operator/(DD a, DD b) {
    const double q1 = a.hi / b.hi;
    DD r = a - b * DD(q1);
    const double q2 = r.hi / b.hi;
    r = r - b * DD(q2);
    const double q3 = r.hi / b.hi;
    DD q = quick_two_sum(q1, q2);
    return q + DD(q3);
}

inline double to_double(DD a) { return a.hi + a.lo; }

/// Complex double-double.
struct CDD {
    DD re, im;
    CDD() = default;
    CDD(DD r, DD i) : re(r), im(i) {}
    CDD(double r, double i = 0.0) : re(r), im(i) {}
};

inline CDD operator+(CDD a, CDD b) { return {a.re + b.re, a.im + b.im}; }
inline CDD operator-(CDD a, CDD b) { return {a.re - b.re, a.im - b.im}; }

inline CDD operator*(CDD a, CDD b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

inline CDD operator/(CDD a, CDD b) {
    const DD den = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / den, (a.im * b.re - a.re * b.im) / den};
}

/// Magnitude estimate (double precision is plenty for stopping tests).
inline double abs_estimate(const CDD& a) { return std::hypot(a.re.hi, a.im.hi); }

}  // namespace paracav::detail
