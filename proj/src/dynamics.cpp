#include "paracav/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "paracav/errors.hpp"

namespace paracav {

namespace {
constexpr double kPi = std::numbers::pi;
}

bool AdmissibleTriangle::contains(double alpha, double beta, double margin) const {
    const double s02 = sigma0 * sigma0, t02 = tau0 * tau0;
    return beta >= -margin && beta <= s02 * s02 + alpha * s02 + margin &&
           beta <= t02 * t02 - alpha * t02 + margin;
}

double AdmissibleTriangle::beta_max(double alpha) const {
    const double s02 = sigma0 * sigma0, t02 = tau0 * tau0;
    return std::min(s02 * s02 + alpha * s02, t02 * t02 - alpha * t02);
}

AdmissibleTriangle admissible_region(const Cavity& cavity) {
    const double s02 = cavity.sigma0 * cavity.sigma0;
    const double t02 = cavity.tau0 * cavity.tau0;
    AdmissibleTriangle tri;
    tri.vertices = {{{-s02, 0.0}, {t02, 0.0}, {t02 - s02, s02 * t02}}};
    tri.sigma0 = cavity.sigma0;
    tri.tau0 = cavity.tau0;
    return tri;
}

double constant_C(const PhaseState& s) {
    const auto& r = s.position;
    const auto& p = s.momentum;
    return 2.0 * (p.x * p.x + p.y * p.y) * r.z - 2.0 * (r.x * p.x + r.y * p.y) * p.z;
}

double constant_C_parabolic(const PhaseState& s) {
    const ParabolicPoint q = to_parabolic(s.position);
    const ParabolicMomenta pm = parabolic_momenta(s);
    const double P2 = s.momentum.norm2();
    const double rho2 = q.sigma * q.sigma * q.tau * q.tau;
    const double centrifugal = (rho2 > 0) ? pm.p_phi * pm.p_phi / rho2 : 0.0;
    return 0.5 * (pm.p_sigma * pm.p_sigma - pm.p_tau * pm.p_tau) +
           0.5 * (q.tau * q.tau - q.sigma * q.sigma) * (P2 + centrifugal);
}

MotionConstants constants_from_state(const PhaseState& s) {
    const double P = s.momentum.norm();
    if (!(P > 0)) throw ZeroMomentum("constants_from_state: |p| must be positive");
    const double Lz = s.position.x * s.momentum.y - s.position.y * s.momentum.x;
    return {P, constant_C(s) / (P * P), (Lz / P) * (Lz / P)};
}

CausticPair caustics(double alpha, double beta) {
    if (beta < 0) throw DomainError("caustics: beta must be nonnegative");
    const double delta = std::sqrt(alpha * alpha + 4.0 * beta);
    return {std::sqrt(std::max(0.0, 0.5 * (delta - alpha))),
            std::sqrt(std::max(0.0, 0.5 * (delta + alpha))), delta};
}

ParabolicMomenta canonical_momenta(const ParabolicPoint& p, const MotionConstants& mc,
                                   int s1, int s2, int s3) {
    const double scale = p.sigma * p.sigma + p.tau * p.tau;
    const double tol = 1e-12 * std::max(scale, 1.0);

    auto radial = [&](double q, double sign_alpha) {
        const double centrifugal = (mc.beta > 0) ? mc.beta / (q * q) : 0.0;
        double rad = q * q - centrifugal + sign_alpha * mc.alpha;
        if (rad < -tol)
            throw ForbiddenRegion("canonical_momenta: coordinate outside the "
                                  "classically allowed interval");
        return std::sqrt(std::max(0.0, rad));
    };

    return {s1 * mc.P * radial(p.sigma, +1.0), s2 * mc.P * radial(p.tau, -1.0),
            s3 * mc.P * std::sqrt(mc.beta)};
}

ParabolicMomenta parabolic_momenta(const PhaseState& s) {
    const ParabolicPoint q = to_parabolic(s.position);
    const double c = std::cos(q.phi), sn = std::sin(q.phi);
    const auto& p = s.momentum;
    // p_q = p . dr/dq for the parabolic chart
    return {p.x * q.tau * c + p.y * q.tau * sn - p.z * q.sigma,
            p.x * q.sigma * c + p.y * q.sigma * sn + p.z * q.tau,
            s.position.x * p.y - s.position.y * p.x};
}

Vec3 cartesian_momentum(const ParabolicPoint& q, const ParabolicMomenta& pm) {
    const double h2 = q.sigma * q.sigma + q.tau * q.tau;
    const double c = std::cos(q.phi), sn = std::sin(q.phi);
    const double radial = (pm.p_sigma * q.tau + pm.p_tau * q.sigma) / h2;
    const double rho = q.sigma * q.tau;
    const double azim = (rho > 0) ? pm.p_phi / rho : 0.0;
    return {radial * c - azim * sn, radial * sn + azim * c,
            (pm.p_tau * q.tau - pm.p_sigma * q.sigma) / h2};
}

Vec3 reflect(const Vec3& p, const Vec3& n) { return p - 2.0 * p.dot(n) * n; }

namespace {

double relative_drift(const MotionConstants& a, const MotionConstants& b,
                      double scale) {
    // alpha and beta drifts are scaled by the cavity size so that values near
    // zero do not blow up the relative measure
    const double dP = std::abs(a.P - b.P) / b.P;
    const double da = std::abs(a.alpha - b.alpha) / std::max(std::abs(b.alpha), scale);
    const double db =
        std::abs(a.beta - b.beta) / std::max(std::abs(b.beta), scale * scale);
    return std::max({dP, da, db});
}

double wrap_delta(double d) {
    while (d > kPi) d -= 2 * kPi;
    while (d < -kPi) d += 2 * kPi;
    return d;
}

}  // namespace

Trajectory simulate(const Cavity& cavity, const PhaseState& initial, int n_bounces,
                    const SimulateOptions& opts) {
    Trajectory traj;
    traj.initial = initial;
    traj.constants = constants_from_state(initial);
    traj.bounces.reserve(static_cast<size_t>(std::max(0, n_bounces)));

    const double P = traj.constants.P;
    CartesianPoint pos = initial.position;
    Vec3 mom = initial.momentum;
    double length = 0;
    double phi_acc = to_parabolic(pos).phi;
    double phi_prev = phi_acc;

    for (int i = 0; i < n_bounces; ++i) {
        const Vec3 dir = mom / P;
        const Hit hit = wall_intersection(pos, dir, cavity);
        length += hit.path_length;

        const double phi_here = to_parabolic(hit.point).phi;
        phi_acc += wrap_delta(phi_here - phi_prev);
        phi_prev = phi_here;

        const Vec3 n = surface_normal(hit.point, hit.wall, cavity);
        const Vec3 mom_out = reflect(mom, n);

        BounceRecord rec;
        rec.point = hit.point;
        rec.wall = hit.wall;
        rec.momentum_in = mom;
        rec.momentum_out = mom_out;
        rec.cumulative_length = length;
        rec.constants = constants_from_state({hit.point, mom_out});
        rec.phi_unwrapped = phi_acc;
        const double drift =
            relative_drift(rec.constants, traj.constants, cavity.scale());
        traj.max_drift = std::max(traj.max_drift, drift);
        traj.bounces.push_back(rec);

        if (drift > opts.drift_abort)
            throw AbortOnDrift("simulate: constants of motion drifted beyond " +
                               std::to_string(opts.drift_abort));

        pos = hit.point;
        mom = mom_out;
    }
    traj.total_length = length;
    return traj;
}

PhaseState standard_start(const Cavity& cavity, const MotionConstants& mc) {
    const double scale = cavity.scale();
    if (std::abs(mc.alpha) < 1e-9 * scale && mc.beta < 1e-9 * scale * scale) {
        // degenerate axial family: start at the tau vertex moving down the axis
        return {{0, 0, 0.5 * cavity.tau0 * cavity.tau0}, {0, 0, -mc.P}};
    }
    const CausticPair cp = caustics(mc.alpha, mc.beta);
    const double tau_start =
        std::clamp(0.5 * (cp.tau_c + cavity.tau0), cp.tau_c, cavity.tau0);
    const ParabolicPoint q(cavity.sigma0, tau_start, 0.0);
    // p_sigma points inward (off the sigma wall), p_phi carries Lz >= 0
    const ParabolicMomenta pm = canonical_momenta(q, mc, -1, -1, +1);
    return {to_cartesian(q), cartesian_momentum(q, pm)};
}

double poincare_value(SectionPlane plane, SolveFor field, double q, double p,
                      double fixed, double P) {
    if (!(P > 0)) throw DomainError("poincare_value: P must be positive");
    const double kin = (p * p) / (P * P);
    if (plane == SectionPlane::SigmaPlane) {
        if (field == SolveFor::Alpha) {
            if (q == 0 && fixed > 0)
                throw DomainError("poincare_value: beta/sigma^2 diverges at sigma=0");
            const double cent = (fixed != 0) ? fixed / (q * q) : 0.0;
            return kin - q * q + cent;
        }
        return q * q * (q * q - kin + fixed);
    }
    if (field == SolveFor::Alpha) {
        if (q == 0 && fixed > 0)
            throw DomainError("poincare_value: beta/tau^2 diverges at tau=0");
        const double cent = (fixed != 0) ? fixed / (q * q) : 0.0;
        return -kin + q * q - cent;
    }
    return q * q * (q * q - kin - fixed);
}

PoincareGrid poincare_field(SectionPlane plane, SolveFor field, double fixed, double P,
                            double q_min, double q_max, int nq, double p_min,
                            double p_max, int np) {
    if (nq < 2 || np < 2) throw DomainError("poincare_field: grid needs >= 2 samples");
    PoincareGrid g;
    g.plane = plane;
    g.field = field;
    g.q.resize(nq);
    g.p.resize(np);
    for (int j = 0; j < nq; ++j)
        g.q[j] = q_min + (q_max - q_min) * j / static_cast<double>(nq - 1);
    for (int i = 0; i < np; ++i)
        g.p[i] = p_min + (p_max - p_min) * i / static_cast<double>(np - 1);
    g.values.resize(static_cast<size_t>(nq) * np);
    for (int i = 0; i < np; ++i)
        for (int j = 0; j < nq; ++j)
            g.values[static_cast<size_t>(i) * nq + j] =
                poincare_value(plane, field, g.q[j], g.p[i], fixed, P);
    return g;
}

double planar_constant(const PhaseState& state) {
    const ParabolicPoint q = to_parabolic(state.position);
    const ParabolicMomenta pm = parabolic_momenta(state);
    const double P = state.momentum.norm();
    const double h2 = q.sigma * q.sigma + q.tau * q.tau;
    if (std::abs(pm.p_phi) / P > 1e-10 * h2)
        throw NotPlanar("planar_constant: state carries angular momentum");
    return (q.tau * q.tau * pm.p_sigma * pm.p_sigma -
            q.sigma * q.sigma * pm.p_tau * pm.p_tau) /
           h2;
}

}  // namespace paracav
