#pragma once

#include <array>
#include <vector>

#include "paracav/geometry.hpp"

namespace paracav {

/// The three constants that determine a trajectory: momentum magnitude P,
/// alpha = C/P^2 (length, signed) and beta = Lz^2/P^2 (length^2, >= 0).
struct MotionConstants {
    double P;
    double alpha;
    double beta;
};

/// Caustic paraboloids sigma_c, tau_c bounding the motion,
/// with Delta = sqrt(alpha^2 + 4 beta) = sigma_c^2 + tau_c^2.
struct CausticPair {
    double sigma_c;
    double tau_c;
    double delta;
};

struct PhaseState {
    CartesianPoint position;
    Vec3 momentum;
};

/// Canonical parabolic momenta (p_sigma, p_tau, p_phi).
struct ParabolicMomenta {
    double p_sigma;
    double p_tau;
    double p_phi;
};

/// One wall collision along a simulated trajectory.
struct BounceRecord {
    CartesianPoint point;
    WallId wall;
    Vec3 momentum_in;
    Vec3 momentum_out;
    double cumulative_length;    // path length from the initial state
    MotionConstants constants;   // recomputed after the bounce (drift monitor)
    double phi_unwrapped;        // accumulated azimuthal angle at this bounce
};

struct Trajectory {
    PhaseState initial;
    MotionConstants constants;
    std::vector<BounceRecord> bounces;
    double total_length{0};
    /// worst relative drift of (P, alpha, beta) seen over all bounces
    double max_drift{0};
};

/// Admissible (alpha, beta) region for a cavity: the triangle with vertices
/// (-sigma0^2, 0), (tau0^2, 0), (tau0^2 - sigma0^2, sigma0^2 tau0^2).
struct AdmissibleTriangle {
    std::array<std::array<double, 2>, 3> vertices;
    double sigma0, tau0;

    bool contains(double alpha, double beta, double margin = 0.0) const;
    /// Upper beta boundary min(sigma0^4 + alpha sigma0^2, tau0^4 - alpha tau0^2).
    double beta_max(double alpha) const;
};

MotionConstants constants_from_state(const PhaseState& state);

/// Third constant of motion C = alpha P^2 in Cartesian form.
double constant_C(const PhaseState& state);

/// C evaluated from the parabolic representation of the same state
/// (identity check; equals constant_C off-axis).
double constant_C_parabolic(const PhaseState& state);

CausticPair caustics(double alpha, double beta);

AdmissibleTriangle admissible_region(const Cavity& cavity);

/// Parabolic canonical momenta at p for given constants and sign choices.
/// Throws ForbiddenRegion when a radicand is negative beyond tolerance;
/// radicands in [-1e-12 * P^2 * scale, 0) clamp to zero (caustic tangency).
ParabolicMomenta canonical_momenta(const ParabolicPoint& p, const MotionConstants& mc,
                                   int sign_sigma, int sign_tau, int sign_phi);

/// Parabolic momenta derived from a Cartesian phase state.
ParabolicMomenta parabolic_momenta(const PhaseState& state);

/// Cartesian momentum assembled from parabolic momenta at a point.
Vec3 cartesian_momentum(const ParabolicPoint& p, const ParabolicMomenta& pm);

/// Specular elastic reflection p' = p - 2 (p.n) n for unit normal n.
Vec3 reflect(const Vec3& momentum, const Vec3& unit_normal);

struct SimulateOptions {
    double drift_abort = 1e-6;  // relative drift of (P, alpha, beta) that aborts
};

/// Propagate an initial state for n_bounces elastic wall collisions.
Trajectory simulate(const Cavity& cavity, const PhaseState& initial, int n_bounces,
                    const SimulateOptions& opts = {});

/// Deterministic starting state for given constants: the sigma-wall point at
/// phi = 0 with tau at the midpoint of [tau_c, tau0], momenta signed
/// (inward, -, +). For the degenerate pair alpha = beta = 0 the axis state
/// (0, 0, tau0^2/2) moving toward -z is used instead.
PhaseState standard_start(const Cavity& cavity, const MotionConstants& mc);

enum class SectionPlane { SigmaPlane, TauPlane };
enum class SolveFor { Alpha, Beta };

/// Poincare phase-map field value at one (coordinate, momentum) point.
/// For the sigma plane: alpha(s,ps; beta,P) = ps^2/P^2 - s^2 + beta/s^2 and
/// beta(s,ps; alpha,P) = s^2 (s^2 - ps^2/P^2 + alpha); tau-plane analogues
/// carry the opposite alpha sign. Throws DomainError at q = 0 with beta > 0.
double poincare_value(SectionPlane plane, SolveFor field, double q, double p,
                      double fixed_constant, double P);

struct PoincareGrid {
    SectionPlane plane;
    SolveFor field;
    std::vector<double> q;       // coordinate samples
    std::vector<double> p;       // momentum samples
    std::vector<double> values;  // row-major, values[i*q.size()+j] = f(q[j], p[i])
};

PoincareGrid poincare_field(SectionPlane plane, SolveFor field, double fixed_constant,
                            double P, double q_min, double q_max, int nq,
                            double p_min, double p_max, int np);

/// Conserved quantity of the planar (beta = 0) billiard,
/// (tau^2 p_sigma^2 - sigma^2 p_tau^2)/(sigma^2 + tau^2) = alpha P^2.
/// Throws NotPlanar if the state carries angular momentum.
double planar_constant(const PhaseState& state);

}  // namespace paracav
