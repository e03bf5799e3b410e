#include "paracav/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "paracav/errors.hpp"

namespace paracav {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_phi(double phi) {
    phi = std::fmod(phi, kTwoPi);
    if (phi < 0) phi += kTwoPi;
    // fmod can return exactly 2pi after the correction when phi was a tiny
    // negative number
    if (phi >= kTwoPi) phi -= kTwoPi;
    return phi;
}

}  // namespace

ParabolicPoint::ParabolicPoint(double s, double t, double p)
    : sigma(s), tau(t), phi(wrap_phi(p)) {
    if (!(sigma >= 0) || !(tau >= 0))
        throw DomainError("ParabolicPoint: sigma and tau must be nonnegative");
}

Cavity::Cavity(double sigma0_, double tau0_)
    : Cavity(sigma0_, tau0_, 1e-9 * (sigma0_ * sigma0_ + tau0_ * tau0_)) {}

Cavity::Cavity(double sigma0_, double tau0_, double rim_eps)
    : sigma0(sigma0_),
      tau0(tau0_),
      rim_radius(sigma0_ * tau0_),
      rim_height(0.5 * (tau0_ * tau0_ - sigma0_ * sigma0_)),
      rim_exclusion_eps(rim_eps) {
    if (!(sigma0 > 0) || !(tau0 > 0))
        throw DomainError("Cavity: wall parameters must be positive");
}

CartesianPoint to_cartesian(const ParabolicPoint& p) {
    const double rho = p.sigma * p.tau;
    return {rho * std::cos(p.phi), rho * std::sin(p.phi),
            0.5 * (p.tau * p.tau - p.sigma * p.sigma)};
}

ParabolicPoint to_parabolic(const CartesianPoint& c) {
    const double rho2 = c.x * c.x + c.y * c.y;
    const double r = std::sqrt(rho2 + c.z * c.z);
    // sigma^2 = r - z and tau^2 = r + z; evaluate the cancelling one through
    // rho^2 / (r +- z) so that points near the axis keep full precision.
    double s2, t2;
    if (c.z >= 0) {
        t2 = r + c.z;
        s2 = (t2 > 0) ? rho2 / t2 : 0.0;
    } else {
        s2 = r - c.z;
        t2 = (s2 > 0) ? rho2 / s2 : 0.0;
    }
    const double sigma = std::sqrt(std::max(0.0, s2));
    const double tau = std::sqrt(std::max(0.0, t2));
    const double phi = (rho2 > 0) ? wrap_phi(std::atan2(c.y, c.x)) : 0.0;
    return {sigma, tau, phi};
}

ScaleFactors scale_factors(const ParabolicPoint& p) {
    const double h = std::sqrt(p.sigma * p.sigma + p.tau * p.tau);
    return {h, h, p.sigma * p.tau};
}

bool contains(const Cavity& cavity, const CartesianPoint& point) {
    const ParabolicPoint p = to_parabolic(point);
    return p.sigma <= cavity.sigma0 && p.tau <= cavity.tau0;
}

double wall_residual(const CartesianPoint& c, WallId wall, const Cavity& cavity) {
    const double rho2 = c.x * c.x + c.y * c.y;
    if (wall == WallId::SigmaWall) {
        const double w2 = cavity.sigma0 * cavity.sigma0;
        return rho2 - 2.0 * w2 * c.z - w2 * w2;
    }
    const double w2 = cavity.tau0 * cavity.tau0;
    return rho2 + 2.0 * w2 * c.z - w2 * w2;
}

namespace {

// Quadric coefficients of Q(origin + t dir) = a t^2 + b t + c for one wall.
struct WallQuadratic {
    double a, b, c;
};

WallQuadratic ray_coeffs(const CartesianPoint& o, const Vec3& d, WallId wall,
                         const Cavity& cavity) {
    const double sgn = (wall == WallId::SigmaWall) ? -1.0 : 1.0;
    const double w2 = (wall == WallId::SigmaWall) ? cavity.sigma0 * cavity.sigma0
                                                  : cavity.tau0 * cavity.tau0;
    WallQuadratic q;
    q.a = d.x * d.x + d.y * d.y;
    q.b = 2.0 * (o.x * d.x + o.y * d.y) + sgn * 2.0 * w2 * d.z;
    q.c = o.x * o.x + o.y * o.y + sgn * 2.0 * w2 * o.z - w2 * w2;
    return q;
}

// Forward roots of one wall quadratic, smaller first; NaN-free.
int forward_roots(const WallQuadratic& q, double tmin, double out[2]) {
    int n = 0;
    if (std::abs(q.a) < 1e-300) {
        if (q.b != 0) {
            const double t = -q.c / q.b;
            if (t > tmin) out[n++] = t;
        }
        return n;
    }
    const double disc = q.b * q.b - 4.0 * q.a * q.c;
    if (disc < 0) return 0;
    const double sq = std::sqrt(disc);
    // stable quadratic roots
    const double qq = -0.5 * (q.b + std::copysign(sq, q.b));
    double r1 = qq / q.a;
    double r2 = (qq != 0) ? q.c / qq : r1;
    if (r1 > r2) std::swap(r1, r2);
    if (r1 > tmin) out[n++] = r1;
    if (r2 > tmin) out[n++] = r2;
    return n;
}

}  // namespace

Hit wall_intersection(const CartesianPoint& origin, const Vec3& direction,
                      const Cavity& cavity) {
    const double t_eps = 1e-12 * cavity.scale();

    struct Candidate {
        double t;
        WallId wall;
    };
    Candidate cands[4];
    int ncand = 0;
    for (WallId wall : {WallId::SigmaWall, WallId::TauWall}) {
        double roots[2];
        const int n = forward_roots(ray_coeffs(origin, direction, wall, cavity),
                                    t_eps, roots);
        for (int i = 0; i < n; ++i) cands[ncand++] = {roots[i], wall};
    }
    std::sort(cands, cands + ncand,
              [](const Candidate& a, const Candidate& b) { return a.t < b.t; });

    for (int i = 0; i < ncand; ++i) {
        const CartesianPoint hit = origin + cands[i].t * direction;
        // the cavity is convex, so a legal segment keeps its midpoint inside;
        // a far-away quadric crossing reached from outside is not a wall hit
        const CartesianPoint mid = origin + (0.5 * cands[i].t) * direction;
        const double out_tol = 1e-9 * cavity.scale() * cavity.scale();
        if (wall_residual(mid, WallId::SigmaWall, cavity) > out_tol ||
            wall_residual(mid, WallId::TauWall, cavity) > out_tol)
            break;
        const Vec3 grad = (cands[i].wall == WallId::SigmaWall)
                              ? Vec3{2 * hit.x, 2 * hit.y,
                                     -2 * cavity.sigma0 * cavity.sigma0}
                              : Vec3{2 * hit.x, 2 * hit.y,
                                     2 * cavity.tau0 * cavity.tau0};
        // grazing contact: the ray only touches this wall, keep going
        if (std::abs(direction.dot(grad.normalized())) < 1e-12) continue;

        const double rim_dist = std::hypot(cylindrical_radius(hit) - cavity.rim_radius,
                                           hit.z - cavity.rim_height);
        if (rim_dist < cavity.rim_exclusion_eps)
            throw RimHit("wall_intersection: trajectory meets the wall "
                         "intersection circle where reflection is undefined");
        return {hit, cands[i].wall, cands[i].t};
    }
    throw NoHit("wall_intersection: no forward wall crossing (state outside cavity?)");
}

Vec3 surface_normal(const CartesianPoint& point, WallId wall, const Cavity& cavity) {
    const double scale = cavity.scale();
    if (std::abs(wall_residual(point, wall, cavity)) > 1e-8 * scale * scale)
        throw OffSurface("surface_normal: point is not on the requested wall");
    // inward = against the outward quadric gradient
    Vec3 grad = (wall == WallId::SigmaWall)
                    ? Vec3{2 * point.x, 2 * point.y, -2 * cavity.sigma0 * cavity.sigma0}
                    : Vec3{2 * point.x, 2 * point.y, 2 * cavity.tau0 * cavity.tau0};
    return (-grad).normalized();
}

}  // namespace paracav
