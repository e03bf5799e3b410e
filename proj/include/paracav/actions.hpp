#pragma once

#include "paracav/geometry.hpp"

namespace paracav {

/// Action variables of the separable coordinates. J_sigma and J_tau are the
/// (1/2pi) loop integrals over one radial oscillation; J_phi equals Lz.
struct ActionTriple {
    double J_sigma;
    double J_tau;
    double J_phi;
};

/// All three actions from the closed forms; sign picks the circulation of Lz.
ActionTriple action_triple(const Cavity& cavity, double alpha, double beta,
                           double P = 1, int sign = +1);

/// Shared auxiliaries of the closed-form action and its derivatives for a
/// wall parameter w (sigma0 or tau0 after the tau substitution):
///   G = sqrt(w^4 + alpha w^2 - beta),  A = G - w^2,
///   Delta = sqrt(alpha^2 + 4 beta),    A_w = 2 w^2 + alpha.
/// On the admissible region G >= 0, Delta <= A_w, and
/// (alpha - 2A)(A_w + 2G) = Delta^2, the identity used to keep the logarithm
/// argument (A_w + 2G)/Delta >= 1 free of cancellation.
struct ClosedFormAux {
    double G;
    double A;
    double delta;
    double A_wall;

    ClosedFormAux(double wall, double alpha, double beta);
};

/// J_sigma by adaptive quadrature of (P/pi) * integral sqrt(s^2 - beta/s^2 + alpha)
/// over [sigma_c, sigma0] to 1e-12 absolute. The square-root turning point at
/// sigma_c is removed by the substitution s = sigma_c + u^2.
/// Throws EmptyInterval when sigma_c > sigma0.
double action_sigma_quadrature(double sigma0, double alpha, double beta, double P = 1);

/// Closed-form J_sigma, equal to the quadrature on the admissible region.
/// beta < 1e-14 and Delta < 1e-12 route to their analytic limits.
double action_sigma_closed(double sigma0, double alpha, double beta, double P = 1);

/// J_tau = J_sigma(tau0; -alpha, beta) (same code path).
double action_tau(double tau0, double alpha, double beta, double P = 1);

/// J_phi = sign * P * sqrt(beta) = Lz.
double action_phi(double beta, double P = 1, int sign = +1);

/// Analytic d J / d alpha:
///   sigma wall: +(P/4pi) ln((2 sigma0^2 + alpha + 2G)/Delta)  >= 0
///   tau wall:   -(P/4pi) ln((2 tau0^2  - alpha + 2G)/Delta)   <= 0
/// Diverges logarithmically at Delta -> 0 (returned as +-infinity).
double dJ_dalpha(WallId wall, const Cavity& cavity, double alpha, double beta,
                 double P = 1);

/// Winding number w = |dJ_tau/dalpha| / |dJ_sigma/dalpha|; w(0,0) := 1 (limit).
double winding_number(const Cavity& cavity, double alpha, double beta);

/// Azimuthal advance fractions, values in [0, 1/2]:
///   theta_sigma = (1/pi) atan sqrt( (Delta+alpha)(A_sigma-Delta) /
///                                   ((Delta-alpha)(A_sigma+Delta)) )
/// and the mirrored form for theta_tau. Both factors of each product are
/// nonnegative on the admissible region, which fixes the 0/0 sign ambiguity
/// of the raw arctangent arguments at the region boundary.
double theta_sigma(const Cavity& cavity, double alpha, double beta);
double theta_tau(const Cavity& cavity, double alpha, double beta);

/// Residuals of the two closure conditions for orbit indices (s, t, l):
///   r1 = w(alpha, beta) - s/t
///   r2 = s theta_sigma + t theta_tau - l
/// At beta = 0 the azimuthal condition degenerates (meridional orbits make no
/// revolutions) and r2 is reported as -l.
struct ClosureResidual {
    double r1;
    double r2;
};

ClosureResidual closure_residual(const Cavity& cavity, double alpha, double beta,
                                 int s, int t, int l);

}  // namespace paracav
