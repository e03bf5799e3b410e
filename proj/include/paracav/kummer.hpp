#pragma once

#include <complex>

namespace paracav {

using Complex = std::complex<double>;

/// Accuracy contract of the confluent hypergeometric kernel. Inside
/// |z| <= max_abs_z the relative error of kummer_m is certified <= 1e-12
/// (whittaker_m <= 1e-11); beyond it DomainExceeded is thrown rather than
/// degrading silently.
struct SpecFunDomain {
    double max_abs_z = 80.0;
    double series_tol = 1e-15;  // term-to-sum stopping ratio
    int max_terms = 2000;
};

/// Kummer confluent hypergeometric M(a,b,z) = sum (a)_n z^n / ((b)_n n!).
///
/// Evaluated in double-double arithmetic; for |z| > 30 the series result at
/// |z| = 30 is carried outward along the ray by Taylor steps of the defining
/// ODE z w'' + (b - z) w' - a w = 0, which keeps the certified accuracy where
/// raw summation would cancel catastrophically.
///
/// Throws PoleInB (b a nonpositive integer), DomainExceeded (|z| too large),
/// NonConvergence.
Complex kummer_m(Complex a, Complex b, Complex z,
                 const SpecFunDomain& domain = {});

/// Whittaker function M_{kappa,mu}(z) = e^{-z/2} z^{mu+1/2}
/// M(mu-kappa+1/2, 1+2mu, z) with principal-branch power.
Complex whittaker_m(Complex kappa, Complex mu, Complex z,
                    const SpecFunDomain& domain = {});

}  // namespace paracav
