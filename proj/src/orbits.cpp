#include "paracav/orbits.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "paracav/errors.hpp"

namespace paracav {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

OrbitSpec::OrbitSpec(int s_, int t_, int l_) : s(s_), t(t_), l(l_) {
    if (s < 1 || t < 1) throw DomainError("OrbitSpec: s and t must be >= 1");
    if (l < 0 || l > lmax(s, t))
        throw DomainError("OrbitSpec: l must lie in [0, floor((s+t)/2)]");
}

int lmax(int s, int t) { return (s + t) / 2; }

namespace {

// Axis crossings per (s,t) cycle of a meridional orbit; spatial closure after
// s+t bounces requires an even count. The bouncing-axis orbit (alpha = 0)
// is its own case: primitive only as (1,1).
bool planar_primitive(double alpha, int s, int t, double scale) {
    if (std::abs(alpha) < 1e-9 * scale) return s == 1 && t == 1;
    const int crossings = alpha < 0 ? t : s;
    return crossings % 2 == 0;
}

struct TriangleBox {
    double alpha_min, alpha_max;
    const AdmissibleTriangle tri;
};

// Clip a point into the open triangle with a relative margin; near the
// vertices (where beta_max shrinks below the margin) fall back to the center
// of the remaining sliver.
void clip_into_triangle(const AdmissibleTriangle& tri, double margin, double& alpha,
                        double& beta) {
    const double s02 = tri.sigma0 * tri.sigma0, t02 = tri.tau0 * tri.tau0;
    const double scale = s02 + t02;
    alpha = std::clamp(alpha, -s02 + margin * scale, t02 - margin * scale);
    const double bmax = tri.beta_max(alpha);
    const double lo = std::min(margin * scale * scale, 0.25 * bmax);
    const double hi = std::max(bmax - lo, lo);
    beta = std::clamp(beta, lo, hi);
}

}  // namespace

std::vector<OrbitRoot> solve_orbit_all(const Cavity& cavity, const OrbitSpec& spec,
                                       double P) {
    const AdmissibleTriangle tri = admissible_region(cavity);
    const double s02 = cavity.sigma0 * cavity.sigma0;
    const double t02 = cavity.tau0 * cavity.tau0;
    const double scale = s02 + t02;
    const double ratio = static_cast<double>(spec.s) / spec.t;

    std::vector<OrbitRoot> roots;
    auto add_root = [&](double alpha, double beta, bool degenerate) {
        for (const OrbitRoot& r : roots)
            if (std::abs(r.constants.alpha - alpha) < 1e-6 * scale &&
                std::abs(r.constants.beta - beta) < 1e-6 * scale * scale)
                return;
        OrbitRoot root;
        root.constants = {P, alpha, beta};
        root.residual = closure_residual(cavity, alpha, beta, spec.s, spec.t, spec.l);
        root.degenerate = degenerate;
        root.primitive = spec.l > 0 || planar_primitive(alpha, spec.s, spec.t, scale);
        roots.push_back(root);
    };

    if (spec.l == 0) {
        // meridional sector: solve w(alpha, 0) = s/t on the beta = 0 edge
        auto f = [&](double a) { return winding_number(cavity, a, 0.0) - ratio; };
        const int n = 4096;
        const double lo = -s02 * (1.0 - 1e-10), hi = t02 * (1.0 - 1e-10);
        double prev_a = lo, prev_f = f(lo);
        for (int i = 1; i <= n; ++i) {
            const double a = lo + (hi - lo) * i / n;
            const double fa = f(a);
            if (std::isfinite(prev_f) && std::isfinite(fa) && prev_f * fa <= 0 &&
                !(prev_f == 0 && fa == 0)) {
                double x0 = prev_a, x1 = a, f0 = prev_f;
                for (int it = 0; it < 200; ++it) {
                    const double xm = 0.5 * (x0 + x1);
                    const double fm = f(xm);
                    if (f0 * fm <= 0) x1 = xm;
                    else { x0 = xm; f0 = fm; }
                    if (x1 - x0 < 1e-15 * scale) break;
                }
                const double a_root = 0.5 * (x0 + x1);
                if (std::abs(a_root) > 1e-9 * scale) add_root(a_root, 0.0, false);
            }
            prev_a = a;
            prev_f = fa;
        }
        // the degenerate (0,0) pair satisfies the w -> 1 limit for s = t
        if (spec.s == spec.t) add_root(0.0, 0.0, spec.s > 1);
    } else {
        // interior roots of (w - s/t, s theta_sigma + t theta_tau - l)
        auto resid = [&](double a, double b) {
            return closure_residual(cavity, a, b, spec.s, spec.t, spec.l);
        };
        auto norm_of = [&](double a, double b) {
            const ClosureResidual r = resid(a, b);
            if (!std::isfinite(r.r1) || !std::isfinite(r.r2)) return 1e30;
            return std::abs(r.r1) + std::abs(r.r2);
        };

        const int N = 96;
        std::vector<double> norms(static_cast<size_t>(N - 1) * (N - 1));
        std::vector<std::pair<double, double>> pts(norms.size());
        for (int i = 1; i < N; ++i) {
            const double a = -s02 + (t02 + s02) * i / N;
            const double bmax = tri.beta_max(a);
            for (int j = 1; j < N; ++j) {
                const double b = bmax * j / N;
                const size_t idx = static_cast<size_t>(i - 1) * (N - 1) + (j - 1);
                norms[idx] = norm_of(a, b);
                pts[idx] = {a, b};
            }
        }
        // all local minima below threshold are Newton-polished
        std::vector<size_t> seeds;
        for (int i = 0; i < N - 1; ++i)
            for (int j = 0; j < N - 1; ++j) {
                const size_t idx = static_cast<size_t>(i) * (N - 1) + j;
                bool is_min = norms[idx] < 0.1;
                for (int di = -1; di <= 1 && is_min; ++di)
                    for (int dj = -1; dj <= 1 && is_min; ++dj) {
                        if (di == 0 && dj == 0) continue;
                        const int ni = i + di, nj = j + dj;
                        if (ni < 0 || nj < 0 || ni >= N - 1 || nj >= N - 1) continue;
                        if (norms[static_cast<size_t>(ni) * (N - 1) + nj] < norms[idx])
                            is_min = false;
                    }
                if (is_min) seeds.push_back(idx);
            }

        // damped Newton polish of one seed; nullopt when it stalls or escapes
        auto polish = [&](double a, double b) -> std::optional<std::pair<double, double>> {
            for (int it = 0; it < 120; ++it) {
                const ClosureResidual r = resid(a, b);
                const double ha = 1e-7 * scale;
                const double hb = 1e-7 * scale * scale;
                auto eval = [&](double aa, double bb) {
                    clip_into_triangle(tri, 1e-12, aa, bb);
                    return resid(aa, bb);
                };
                const ClosureResidual rpa = eval(a + ha, b), rma = eval(a - ha, b);
                const ClosureResidual rpb = eval(a, b + hb), rmb = eval(a, b - hb);
                const double j11 = (rpa.r1 - rma.r1) / (2 * ha);
                const double j12 = (rpb.r1 - rmb.r1) / (2 * hb);
                const double j21 = (rpa.r2 - rma.r2) / (2 * ha);
                const double j22 = (rpb.r2 - rmb.r2) / (2 * hb);
                const double det = j11 * j22 - j12 * j21;
                if (det == 0 || !std::isfinite(det)) return std::nullopt;
                const double da = (r.r1 * j22 - r.r2 * j12) / det;
                const double db = (r.r2 * j11 - r.r1 * j21) / det;
                double lam = 1.0;
                const double n0 = std::abs(r.r1) + std::abs(r.r2);
                double na = a, nb = b;
                for (int k = 0; k < 40; ++k, lam *= 0.5) {
                    na = a - lam * da;
                    nb = b - lam * db;
                    clip_into_triangle(tri, 1e-9, na, nb);
                    if (norm_of(na, nb) < n0) break;
                }
                const double step = std::abs(na - a) / scale +
                                    std::abs(nb - b) / (scale * scale);
                a = na;
                b = nb;
                if (step < 1e-14) return std::make_pair(a, b);
            }
            return std::nullopt;
        };

        for (size_t seed : seeds) {
            std::optional<std::pair<double, double>> root;
            try {
                root = polish(pts[seed].first, pts[seed].second);
            } catch (const DomainError&) {
                continue;  // iterate escaped the triangle; drop this seed
            }
            if (!root) continue;
            const auto [a, b] = *root;
            const ClosureResidual r = resid(a, b);
            if (std::abs(r.r1) < 1e-10 && std::abs(r.r2) < 1e-10 &&
                tri.contains(a, b) && b > 0)
                add_root(a, b, false);
        }
    }

    std::sort(roots.begin(), roots.end(), [](const OrbitRoot& x, const OrbitRoot& y) {
        if (x.primitive != y.primitive) return x.primitive;
        if (x.degenerate != y.degenerate) return !x.degenerate;
        return x.constants.alpha < y.constants.alpha;
    });
    return roots;
}

MotionConstants solve_orbit(const Cavity& cavity, const OrbitSpec& spec, double P) {
    const std::vector<OrbitRoot> roots = solve_orbit_all(cavity, spec, P);
    if (roots.empty())
        throw NoSolution("solve_orbit: no closure root inside the admissible "
                         "triangle for this (s,t,l)");
    return roots.front().constants;
}

double orbit_length(const Cavity& cavity, const OrbitSpec& spec,
                    const MotionConstants& mc) {
    const ActionTriple J = action_triple(cavity, mc.alpha, mc.beta, mc.P, +1);
    return kTwoPi / mc.P * (spec.s * J.J_sigma + spec.t * J.J_tau + spec.l * J.J_phi);
}

PeriodicOrbit build_orbit(const Cavity& cavity, const OrbitSpec& spec,
                          const MotionConstants& mc) {
    const double scale = cavity.scale();
    PeriodicOrbit orbit{spec, mc, 0.0, {}, 0.0, 0, 0, 0.0, false};
    orbit.meridional = mc.beta < 1e-9 * scale * scale;

    const PhaseState start = standard_start(cavity, mc);
    orbit.trajectory = simulate(cavity, start, spec.s + spec.t);

    for (const BounceRecord& b : orbit.trajectory.bounces)
        (b.wall == WallId::SigmaWall ? orbit.sigma_bounces : orbit.tau_bounces)++;

    const BounceRecord& last = orbit.trajectory.bounces.back();
    const double phi0 = to_parabolic(start.position).phi;
    orbit.azimuthal_advance = last.phi_unwrapped - phi0;

    auto state_gap = [&](const CartesianPoint& rp, const Vec3& pp) {
        const double pos = (rp - start.position).norm();
        const double mom = (pp - start.momentum).norm() / mc.P;
        return std::max(pos, mom * scale);
    };
    orbit.closure_error = state_gap(last.point, last.momentum_out);
    if (orbit.meridional) {
        // meridional orbits may return to the pi-rotated image; accept only
        // same-plane closure as primitive but report the better of the two
        const CartesianPoint mirrored{-last.point.x, -last.point.y, last.point.z};
        const Vec3 mom_mirrored{-last.momentum_out.x, -last.momentum_out.y,
                                last.momentum_out.z};
        const double mirror_gap = state_gap(mirrored, mom_mirrored);
        if (mirror_gap < orbit.closure_error && orbit.closure_error > 1e-6 * scale)
            throw ClosureFailure("build_orbit: meridional orbit returns on the "
                                 "opposite half-plane; (s,t) cycle is half of the "
                                 "primitive period");
    }

    if (orbit.closure_error > 1e-6 * scale)
        throw ClosureFailure("build_orbit: trajectory does not close after s+t "
                             "bounces");
    if (orbit.sigma_bounces != spec.s || orbit.tau_bounces != spec.t)
        throw ClosureFailure("build_orbit: wall bounce counts do not match (s,t)");
    if (!orbit.meridional &&
        std::abs(orbit.azimuthal_advance - kTwoPi * spec.l) > 1e-6)
        throw ClosureFailure("build_orbit: azimuthal advance differs from 2 pi l");

    orbit.length = orbit_length(cavity, spec, mc);
    return orbit;
}

}  // namespace paracav
