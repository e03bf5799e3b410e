#pragma once

#include "paracav/vec3.hpp"

namespace paracav {

/// Cartesian position; spherical radius r and cylindrical radius rho are
/// derived via free functions.
using CartesianPoint = Vec3;

inline double spherical_radius(const CartesianPoint& c) { return c.norm(); }
inline double cylindrical_radius(const CartesianPoint& c) {
    return std::hypot(c.x, c.y);
}

/// Point in parabolic coordinates (sigma, tau, phi).
///
/// x = sigma*tau*cos(phi), y = sigma*tau*sin(phi), z = (tau^2 - sigma^2)/2,
/// with sigma, tau >= 0 (units of sqrt(length)) and phi in [0, 2pi).
/// On-axis points have undefined phi; the convention here is phi = 0.
struct ParabolicPoint {
    double sigma{0};
    double tau{0};
    double phi{0};

    ParabolicPoint() = default;
    ParabolicPoint(double s, double t, double p);
};

/// Metric scale factors h_sigma = h_tau = sqrt(sigma^2+tau^2), h_phi = sigma*tau.
struct ScaleFactors {
    double h_sigma;
    double h_tau;
    double h_phi;
};

enum class WallId { SigmaWall, TauWall };

inline const char* wall_name(WallId w) {
    return w == WallId::SigmaWall ? "sigma" : "tau";
}

/// Cavity bounded by the confocal paraboloids sigma = sigma0 and tau = tau0.
///
/// In Cartesian form the walls are the quadrics
///   sigma wall:  x^2 + y^2 =  2 sigma0^2 z + sigma0^4   (vertex z = -sigma0^2/2)
///   tau wall:    x^2 + y^2 = -2 tau0^2  z + tau0^4      (vertex z = +tau0^2/2)
/// They intersect in a circle of radius rho0 = sigma0*tau0 at height
/// z0 = (tau0^2 - sigma0^2)/2, where the reflection law is undefined.
struct Cavity {
    double sigma0;
    double tau0;
    double rim_radius;         // sigma0 * tau0
    double rim_height;         // (tau0^2 - sigma0^2)/2
    double rim_exclusion_eps;  // hits closer than this to the rim raise RimHit

    Cavity(double sigma0_, double tau0_);
    Cavity(double sigma0_, double tau0_, double rim_eps);

    /// Characteristic squared-coordinate scale sigma0^2 + tau0^2 (a length).
    double scale() const { return sigma0 * sigma0 + tau0 * tau0; }
};

ParabolicPoint to_parabolic(const CartesianPoint& c);
CartesianPoint to_cartesian(const ParabolicPoint& p);
ScaleFactors scale_factors(const ParabolicPoint& p);

/// true iff sigma(point) <= sigma0 and tau(point) <= tau0 (closed region).
bool contains(const Cavity& cavity, const CartesianPoint& point);

struct Hit {
    CartesianPoint point;
    WallId wall;
    double path_length;
};

/// First intersection of the ray origin + t*direction (t > 0) with either wall.
///
/// direction must be unit norm and the origin inside the cavity (or on a wall
/// moving inward). Throws RimHit if the hit lies within rim_exclusion_eps of
/// the wall intersection circle, NoHit if no forward intersection exists.
/// Rays grazing a wall tangentially (|direction . normal| < 1e-12) pass on to
/// the next intersection instead of reflecting.
Hit wall_intersection(const CartesianPoint& origin, const Vec3& direction,
                      const Cavity& cavity);

/// Inward unit normal of the given wall at a point lying on it (to 1e-8 of
/// the quadric residual scale). Throws OffSurface otherwise.
Vec3 surface_normal(const CartesianPoint& point, WallId wall, const Cavity& cavity);

/// Signed quadric residual x^2+y^2 -+ 2 w^2 z - w^4 (negative inside).
double wall_residual(const CartesianPoint& point, WallId wall, const Cavity& cavity);

}  // namespace paracav
