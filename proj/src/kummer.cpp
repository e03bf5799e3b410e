#include "paracav/kummer.hpp"

#include <cmath>
#include <vector>

#include "paracav/dd.hpp"
#include "paracav/errors.hpp"

namespace paracav {

using detail::CDD;
using detail::DD;
using detail::abs_estimate;

namespace {

constexpr double kDirectRadius = 30.0;  // direct series up to here, then continue

bool is_nonpositive_integer(Complex b) {
    return b.imag() == 0.0 && b.real() <= 0.0 && b.real() == std::floor(b.real());
}

Complex to_complex(const CDD& v) {
    return {detail::to_double(v.re), detail::to_double(v.im)};
}

struct SeriesResult {
    CDD value;      // M(a, b, z)
    CDD derivative; // dM/dz = (a/b) M(a+1, b+1, z), filled on request
};

// Direct Taylor sum of M(a,b,z) with the incremental term recurrence
// term_{n+1} = term_n (a+n) z / ((b+n)(n+1)).
CDD series_sum(const CDD& a, const CDD& b, const CDD& z, const SpecFunDomain& dom) {
    CDD term(1.0, 0.0);
    CDD sum(1.0, 0.0);
    int quiet = 0;
    for (int n = 0; n < dom.max_terms; ++n) {
        const CDD num = (a + CDD(static_cast<double>(n), 0.0)) * z;
        const CDD den = (b + CDD(static_cast<double>(n), 0.0)) *
                        CDD(static_cast<double>(n + 1), 0.0);
        term = term * (num / den);
        sum = sum + term;
        if (!std::isfinite(abs_estimate(sum)))
            throw NonConvergence("kummer_m: series diverged");
        if (abs_estimate(term) < dom.series_tol * abs_estimate(sum)) {
            if (++quiet >= 3) return sum;
        } else {
            quiet = 0;
        }
    }
    throw NonConvergence("kummer_m: series did not converge in max_terms");
}

// One Taylor step of z w'' + (b - z) w' - a w = 0 from expansion point p to
// p + h, advancing (w, w'). Coefficients c_j of w(p + h) obey
//   c_{j+2} = [ (j + a) c_j - (j+1)(j + b - p) c_{j+1} ] / ( p (j+2)(j+1) ).
void taylor_step(const CDD& a, const CDD& b, const CDD& p, const CDD& h, CDD& w,
                 CDD& wp, const SpecFunDomain& dom) {
    CDD cj = w;        // c_j
    CDD cj1 = wp;      // c_{j+1}
    CDD hpow(1.0, 0.0);  // h^j
    CDD sum = cj;
    CDD dsum = cj1;    // sum of (j+1) c_{j+1} h^j
    int quiet = 0;
    const int cap = 600;
    for (int j = 0; j < cap; ++j) {
        const double dj = static_cast<double>(j);
        const CDD cj2 = ((CDD(dj, 0.0) + a) * cj -
                         CDD(dj + 1.0, 0.0) * ((CDD(dj, 0.0) + b - p) * cj1)) /
                        (p * CDD((dj + 2.0) * (dj + 1.0), 0.0));
        hpow = hpow * h;  // h^{j+1}
        const CDD t = cj1 * hpow;
        sum = sum + t;
        dsum = dsum + CDD(dj + 2.0, 0.0) * (cj2 * hpow);
        if (!std::isfinite(abs_estimate(sum)))
            throw NonConvergence("kummer_m: continuation step diverged");
        const double tn = abs_estimate(t);
        if (tn < dom.series_tol * abs_estimate(sum) &&
            abs_estimate(cj2 * (hpow * h)) < dom.series_tol * abs_estimate(sum)) {
            if (++quiet >= 3) break;
        } else {
            quiet = 0;
        }
        cj = cj1;
        cj1 = cj2;
        if (j == cap - 1)
            throw NonConvergence("kummer_m: continuation step did not converge");
    }
    w = sum;
    wp = dsum;
}

CDD evaluate(const CDD& a, const CDD& b, Complex zc, const SpecFunDomain& dom) {
    const double r = std::abs(zc);
    const CDD z(zc.real(), zc.imag());
    if (r <= kDirectRadius) return series_sum(a, b, z, dom);

    // start on the ray at the direct-series radius
    const Complex dir = zc / r;
    Complex pc = dir * kDirectRadius;
    CDD p(pc.real(), pc.imag());
    CDD w = series_sum(a, b, p, dom);
    // w' = (a/b) M(a+1, b+1, p)
    CDD wp = (a / b) * series_sum(a + CDD(1.0, 0.0), b + CDD(1.0, 0.0), p, dom);

    double rp = kDirectRadius;
    while (rp < r) {
        const double rn = std::min(r, 1.35 * rp);
        const Complex pn = dir * rn;
        const CDD h(pn.real() - pc.real(), pn.imag() - pc.imag());
        taylor_step(a, b, p, h, w, wp, dom);
        pc = pn;
        p = CDD(pc.real(), pc.imag());
        rp = rn;
    }
    return w;
}

}  // namespace

Complex kummer_m(Complex a, Complex b, Complex z, const SpecFunDomain& dom) {
    if (is_nonpositive_integer(b))
        throw PoleInB("kummer_m: b is a nonpositive integer");
    if (std::abs(z) > dom.max_abs_z)
        throw DomainExceeded("kummer_m: |z| exceeds the certified domain");
    // Left half-plane: M decays like e^{Re z} while the series terms peak at
    // e^{|z|}, so flip with the Kummer transformation M(a,b,z) = e^z M(b-a,b,-z)
    // and sum where the result carries the dominant exponential.
    if (z.real() < 0)
        return std::exp(z) *
               to_complex(evaluate(CDD(b.real() - a.real(), b.imag() - a.imag()),
                                   CDD(b.real(), b.imag()), -z, dom));
    return to_complex(
        evaluate(CDD(a.real(), a.imag()), CDD(b.real(), b.imag()), z, dom));
}

Complex whittaker_m(Complex kappa, Complex mu, Complex z, const SpecFunDomain& dom) {
    const Complex b = 1.0 + 2.0 * mu;
    if (is_nonpositive_integer(b))
        throw PoleInB("whittaker_m: 1 + 2 mu is a nonpositive integer");
    if (std::abs(z) > dom.max_abs_z)
        throw DomainExceeded("whittaker_m: |z| exceeds the certified domain");
    const Complex a = mu - kappa + 0.5;
    const Complex m = kummer_m(a, b, z, dom);
    // principal branch of z^{mu + 1/2}
    const Complex prefactor = std::exp(-0.5 * z + (mu + 0.5) * std::log(z));
    return prefactor * m;
}

}  // namespace paracav
