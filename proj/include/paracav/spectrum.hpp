#pragma once

#include <optional>
#include <string>
#include <vector>

#include "paracav/dynamics.hpp"
#include "paracav/geometry.hpp"
#include "paracav/kummer.hpp"

namespace paracav {

/// One Dirichlet eigenpair: separation constant a and wavenumber k, labeled
/// by the interior node counts l (of S on (0, sigma0)) and n (of T on
/// (0, tau0)) and the azimuthal number m. Energy is k^2 in units hbar = 1,
/// 2M = 1.
struct EigenPair {
    int l;
    int n;
    int m;
    double a;
    double k;

    double k2() const { return k * k; }
};

/// Normalized eigenmode psi = N S(sigma) T(tau) e^{i m phi},
/// integral |psi|^2 dV = 1 with dV = sigma tau (sigma^2 + tau^2) dsigma dtau dphi.
struct Eigenmode {
    EigenPair pair;
    Cavity cavity;
    double normalization;
};

/// Constants of motion carried by an eigenstate: alpha_q = 2a/k,
/// beta_q = m^2/k^2, C_q = 2 k a, Lz_q = m (hbar = 1). penetration is the
/// probability fraction inside the classically forbidden region; it is NaN
/// until evaluated from a normalized mode.
struct QuantumConstants {
    double alpha_q;
    double beta_q;
    double C_q;
    int Lz_q;
    double penetration;
};

/// Radial factor S(sigma; a, k, |m|), real by construction:
/// sigma^|m| Re[ e^{-i k sigma^2 / 2} M(mu + 1/2 + i a/(2k), 2 mu + 1, i k sigma^2) ]
/// with mu = |m|/2. The imaginary part vanishes identically (Kummer-transform
/// self-conjugacy) and is asserted < 1e-9 of the magnitude.
/// T is the same function with a -> -a.
double radial_S(double sigma, double a, double k, int m_abs,
                const SpecFunDomain& domain = {});
double radial_T(double tau, double a, double k, int m_abs,
                const SpecFunDomain& domain = {});

/// Dirichlet residuals (S(sigma0), T(tau0)) whose simultaneous zeros are the
/// eigenpairs.
std::pair<double, double> boundary_residuals(double a, double k, const Cavity& cavity,
                                             int m);

struct EigenSearchOptions {
    int k_samples = 200;
    int a_samples = 200;
    double newton_tol = 1e-10;
    /// re-scan at doubled resolution and warn if extra roots appear
    bool refinement_guard = true;
};

struct EigenSearchResult {
    std::vector<EigenPair> pairs;  // sorted by k
    std::vector<std::string> warnings;
};

/// All eigenpairs with 0 < k <= k_max for azimuthal number m: scans the
/// (a, k) rectangle over the oscillation band of a (outside it one of the
/// radial coefficients is negative up to the wall and no Dirichlet zero can
/// form), refines cells where both residuals change sign by damped 2D
/// Newton, and labels by node counts.
EigenSearchResult find_eigenpairs(const Cavity& cavity, int m, double k_max,
                                  const EigenSearchOptions& opts = {});

/// Normalization by tensor Gauss-Legendre quadrature (phi integral analytic);
/// node doubling must move the integral by < 1e-6 relative.
Eigenmode normalize(const EigenPair& pair, const Cavity& cavity);

/// psi at a parabolic point; zero outside the cavity (hard walls).
Complex eigenmode_eval(const Eigenmode& mode, const ParabolicPoint& p);

/// Quadrature of psi1* psi2 dV; exactly zero for m1 != m2.
Complex inner_product(const Eigenmode& mode1, const Eigenmode& mode2);

QuantumConstants quantum_constants(const EigenPair& pair);

/// Constants including the penetration ratio of the mode.
QuantumConstants quantum_constants(const Eigenmode& mode);

/// Probability fraction inside the classically forbidden region
/// {sigma < sigma_c} union {tau < tau_c} with caustics from (alpha_q, beta_q).
/// Quadrature panels split at the caustics.
double penetration_ratio(const Eigenmode& mode);

struct DeformationRow {
    double ratio;  // sigma0 / tau0
    int l, n, m;
    double a, k, k2;
};

struct LevelCrossing {
    int l1, n1, m1;
    int l2, n2, m2;
    double ratio;
};

struct DeformationScan {
    std::vector<DeformationRow> rows;
    std::vector<LevelCrossing> crossings;
    std::vector<std::string> warnings;
};

/// Spectrum versus cavity deformation sigma0/tau0 at fixed tau0: recomputes
/// the lowest states_per_m eigenpairs per m at each ratio sample and locates
/// level crossings by sign change of the energy difference plus secant
/// refinement.
DeformationScan spectrum_vs_deformation(double tau0, double ratio_min,
                                        double ratio_max, int n_samples, int m_max,
                                        int states_per_m);

/// Classical data matched to an eigenstate through its constants of motion.
struct Correspondence {
    MotionConstants constants;  // P = k, alpha_q, beta_q
    double winding;
    bool has_orbit;  // false when (alpha, beta) leaves the open triangle
    int s, t, l;     // best rational winding s/t and nearest closure integer l
    double winding_residual;  // w - s/t
    double closure_residual;  // s theta_sigma + t theta_tau - l
};

Correspondence correspond(const EigenPair& pair, const Cavity& cavity,
                          int max_denominator);

}  // namespace paracav
