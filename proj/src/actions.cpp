#include "paracav/actions.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "paracav/dynamics.hpp"
#include "paracav/errors.hpp"
#include "paracav/quadrature.hpp"

namespace paracav {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kBetaEps = 1e-14;
constexpr double kDeltaEps = 1e-12;
}  // namespace

ClosedFormAux::ClosedFormAux(double wall, double alpha, double beta) {
    const double w2 = wall * wall;
    const double rad = w2 * w2 + alpha * w2 - beta;
    if (rad < -1e-12 * w2 * w2)
        throw DomainError("ClosedFormAux: (alpha, beta) outside the admissible "
                          "region of this wall");
    G = std::sqrt(std::max(0.0, rad));
    A = G - w2;
    delta = std::sqrt(alpha * alpha + 4.0 * beta);
    A_wall = 2.0 * w2 + alpha;
}

double action_sigma_quadrature(double sigma0, double alpha, double beta, double P) {
    const CausticPair cp = caustics(alpha, beta);
    if (cp.sigma_c > sigma0) {
        if (cp.sigma_c * cp.sigma_c - sigma0 * sigma0 < 1e-12 * sigma0 * sigma0)
            return 0.0;
        throw EmptyInterval("action_sigma_quadrature: caustic beyond the wall");
    }
    const double sc = cp.sigma_c;
    if (sigma0 - sc <= 0) return 0.0;

    auto integrand = [&](double s) {
        const double cent = (beta > 0) ? beta / (s * s) : 0.0;
        return std::sqrt(std::max(0.0, s * s - cent + alpha));
    };

    double value;
    if (sc > 0 || alpha < 0) {
        // sqrt turning point at sigma_c: substitute s = sc + u^2
        auto g = [&](double u) { return 2.0 * u * integrand(sc + u * u); };
        value = integrate_adaptive(g, 0.0, std::sqrt(sigma0 - sc), 1e-13);
    } else {
        // sigma_c = 0 with alpha >= 0: integrand is smooth down to 0
        value = integrate_adaptive(integrand, 0.0, sigma0, 1e-13);
    }
    return P / kPi * value;
}

double action_sigma_closed(double sigma0, double alpha, double beta, double P) {
    const double w2 = sigma0 * sigma0;
    if (w2 * w2 + alpha * w2 - beta < -1e-12 * w2 * w2) {
        // caustic beyond the wall: empty oscillation interval
        const CausticPair cp = caustics(alpha, beta);
        if (cp.sigma_c > sigma0)
            throw EmptyInterval("action_sigma_closed: caustic beyond the wall");
    }
    const ClosedFormAux aux(sigma0, alpha, beta);

    double value = 0.5 * aux.G;
    // (alpha/4) ln((A_w + 2G)/Delta); the limit alpha ln(1/Delta) -> 0 makes the
    // term vanish with alpha, so Delta ~ 0 only matters when alpha != 0
    if (alpha != 0.0) {
        if (aux.delta < kDeltaEps) {
            // Delta >= |alpha| so this cannot be reached with alpha != 0
            throw DomainError("action_sigma_closed: inconsistent Delta");
        }
        value += 0.25 * alpha * std::log((aux.A_wall + 2.0 * aux.G) / aux.delta);
    }
    if (beta > kBetaEps) {
        // -(sqrt(beta)/2) (asin(Y) + pi/2), Y = (alpha w^2 - 2 beta)/(w^2 Delta);
        // |Y| <= 1 on the admissible region with equality only on its boundary
        double Y = (alpha * w2 - 2.0 * beta) / (w2 * aux.delta);
        Y = std::clamp(Y, -1.0, 1.0);
        value -= 0.5 * std::sqrt(beta) * (std::asin(Y) + 0.5 * kPi);
    }
    return P / kPi * value;
}

double action_tau(double tau0, double alpha, double beta, double P) {
    return action_sigma_closed(tau0, -alpha, beta, P);
}

double action_phi(double beta, double P, int sign) {
    if (beta < 0) throw DomainError("action_phi: beta must be nonnegative");
    return sign * P * std::sqrt(beta);
}

ActionTriple action_triple(const Cavity& cavity, double alpha, double beta, double P,
                           int sign) {
    return {action_sigma_closed(cavity.sigma0, alpha, beta, P),
            action_tau(cavity.tau0, alpha, beta, P), action_phi(beta, P, sign)};
}

double dJ_dalpha(WallId wall, const Cavity& cavity, double alpha, double beta,
                 double P) {
    const bool sigma_side = wall == WallId::SigmaWall;
    const double w = sigma_side ? cavity.sigma0 : cavity.tau0;
    const double a = sigma_side ? alpha : -alpha;
    const ClosedFormAux aux(w, a, beta);
    if (aux.delta < kDeltaEps)
        return sigma_side ? std::numeric_limits<double>::infinity()
                          : -std::numeric_limits<double>::infinity();
    const double val = P / (4.0 * kPi) * std::log((aux.A_wall + 2.0 * aux.G) / aux.delta);
    return sigma_side ? val : -val;
}

double winding_number(const Cavity& cavity, double alpha, double beta) {
    const ClosedFormAux as(cavity.sigma0, alpha, beta);
    const ClosedFormAux at(cavity.tau0, -alpha, beta);
    if (as.delta < kDeltaEps) return 1.0;  // both logs diverge with ratio 1
    const double num = std::log((at.A_wall + 2.0 * at.G) / at.delta);
    const double den = std::log((as.A_wall + 2.0 * as.G) / as.delta);
    if (den <= 0) return std::numeric_limits<double>::infinity();
    return num / den;
}

namespace {

// (1/pi) atan sqrt(num/den) with clamped nonnegative factors; den -> 0 is
// the divergent-argument limit 1/2 (the beta = 0 boundary).
double theta_from_products(double f1, double f2, double g1, double g2) {
    const double num = std::max(0.0, f1) * std::max(0.0, f2);
    const double den = g1 * g2;
    if (den <= 0) return 0.5;
    return std::atan(std::sqrt(num / den)) / kPi;
}

}  // namespace

double theta_sigma(const Cavity& cavity, double alpha, double beta) {
    const ClosedFormAux aux(cavity.sigma0, alpha, beta);
    if (aux.delta < kDeltaEps) return 0.25;  // symmetric corner limit along beta->0
    return theta_from_products(aux.delta + alpha, aux.A_wall - aux.delta,
                               aux.delta - alpha, aux.A_wall + aux.delta);
}

double theta_tau(const Cavity& cavity, double alpha, double beta) {
    const ClosedFormAux aux(cavity.tau0, -alpha, beta);
    if (aux.delta < kDeltaEps) return 0.25;
    return theta_from_products(aux.delta - alpha, aux.A_wall - aux.delta,
                               aux.delta + alpha, aux.A_wall + aux.delta);
}

ClosureResidual closure_residual(const Cavity& cavity, double alpha, double beta,
                                 int s, int t, int l) {
    const double r1 = winding_number(cavity, alpha, beta) - static_cast<double>(s) / t;
    // Meridional orbits (beta = 0) make no revolutions about the axis; the
    // azimuthal condition degenerates there and l = 0 is the matching index.
    const double scale2 = cavity.scale() * cavity.scale();
    if (beta < kBetaEps * scale2) return {r1, -static_cast<double>(l)};
    return {r1, s * theta_sigma(cavity, alpha, beta) +
                    t * theta_tau(cavity, alpha, beta) - static_cast<double>(l)};
}

}  // namespace paracav
