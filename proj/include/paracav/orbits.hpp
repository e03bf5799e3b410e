#pragma once

#include <vector>

#include "paracav/actions.hpp"
#include "paracav/dynamics.hpp"

namespace paracav {

/// Orbit indices: s bounces on the sigma wall and t on the tau wall per
/// period, with l full revolutions about the z axis (0 <= l <= lmax(s,t)).
struct OrbitSpec {
    int s;
    int t;
    int l;

    OrbitSpec(int s_, int t_, int l_);
};

/// Largest revolution count compatible with s+t bounces: floor((s+t)/2).
int lmax(int s, int t);

/// One root of the closure system for a given spec.
struct OrbitRoot {
    MotionConstants constants;
    ClosureResidual residual;
    /// Whether the orbit built from this root closes after s+t bounces.
    /// Meridional (l = 0) orbits that cross the z axis an odd number of times
    /// per (s,t) cycle only close after a doubled period; such roots solve the
    /// closure equations but are not primitive.
    bool primitive;
    /// Degenerate axis orbit covered multiple times (s = t > 1 only).
    bool degenerate;
};

/// All closure-system roots for the spec inside the admissible triangle,
/// primitive roots first. For l = 0 the system restricts to the beta = 0 edge
/// (meridional orbits); the degenerate pair (alpha, beta) = (0, 0) — the
/// bouncing-axis orbit — is included for s = t, where the winding number
/// attains its limit value 1.
std::vector<OrbitRoot> solve_orbit_all(const Cavity& cavity, const OrbitSpec& spec,
                                       double P = 1);

/// Preferred root of solve_orbit_all (primitive and non-degenerate first).
/// Throws NoSolution if the spec admits no root.
MotionConstants solve_orbit(const Cavity& cavity, const OrbitSpec& spec, double P = 1);

struct PeriodicOrbit {
    OrbitSpec spec;
    MotionConstants constants;
    double length;             // closed-form path length (Maupertuis)
    Trajectory trajectory;     // one full period, s+t bounces
    double closure_error;      // position + momentum return mismatch (length units)
    int sigma_bounces;
    int tau_bounces;
    double azimuthal_advance;  // accumulated phi over the period
    bool meridional;           // beta = 0 orbit confined to a meridional plane
};

/// Construct and verify the orbit for solved constants: simulates s+t bounces
/// from the standard starting state and checks closure, per-wall bounce counts
/// and (for l >= 1) azimuthal advance 2 pi l. Throws ClosureFailure when the
/// constants do not produce the requested primitive orbit.
PeriodicOrbit build_orbit(const Cavity& cavity, const OrbitSpec& spec,
                          const MotionConstants& constants);

/// Closed-form orbit length (2 pi / P)(s J_sigma + t J_tau + l J_phi).
double orbit_length(const Cavity& cavity, const OrbitSpec& spec,
                    const MotionConstants& constants);

}  // namespace paracav
