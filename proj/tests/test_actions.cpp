#include "paracav/actions.hpp"

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "paracav/dynamics.hpp"
#include "paracav/errors.hpp"
#include "test_helpers.hpp"

using namespace paracav;
using testing_support::central_diff;
using testing_support::tanh_sinh;
using testing_support::uniform;

namespace {
constexpr double kPi = std::numbers::pi;

// Independent action oracle: tanh-sinh quadrature straight on the radial
// integrand, endpoint singularity included.
double action_oracle(double wall, double alpha, double beta, double P = 1) {
    const CausticPair cp = caustics(alpha, beta);
    if (cp.sigma_c >= wall) return 0.0;
    auto f = [&](double s) {
        const double cent = beta > 0 ? beta / (s * s) : 0.0;
        return std::sqrt(std::max(0.0, s * s - cent + alpha));
    };
    return P / kPi * tanh_sinh(f, cp.sigma_c, wall);
}

// Random strictly admissible (alpha, beta) for the (3,2) cavity.
std::pair<double, double> random_admissible(const AdmissibleTriangle& tri) {
    while (true) {
        const double alpha = uniform(-8.9, 3.9);
        const double bmax = tri.beta_max(alpha);
        const double beta = uniform(0.01, 0.95) * bmax;
        if (tri.contains(alpha, beta, -1e-9)) return {alpha, beta};
    }
}
}  // namespace

TEST_CASE("quadrature action reference cases") {
    // alpha = beta = 0: integrand reduces to sigma
    CHECK(action_sigma_quadrature(3.0, 0.0, 0.0) ==
          doctest::Approx(4.5 / kPi).epsilon(1e-12));
    // caustic at the wall: empty range
    CHECK(action_sigma_quadrature(3.0, -9.0, 0.0) == doctest::Approx(0.0));
    CHECK_THROWS_AS(action_sigma_quadrature(3.0, -9.5, 0.0), EmptyInterval);

    // two independent quadrature rules agree
    const double mine = action_sigma_quadrature(3.0, 0.0, 1.0);
    const double oracle = action_oracle(3.0, 0.0, 1.0);
    CHECK(mine == doctest::Approx(oracle).epsilon(1e-11));
}

TEST_CASE("closed form agrees with quadrature across the admissible region") {
    const Cavity cav(3.0, 2.0);
    const AdmissibleTriangle tri = admissible_region(cav);

    // spot values including the beta -> 0 limit
    CHECK(action_sigma_closed(3.0, 0.0, 0.0) ==
          doctest::Approx(4.5 / kPi).epsilon(1e-13));
    CHECK(action_sigma_closed(3.0, 0.0, 1e-15) ==
          doctest::Approx(4.5 / kPi).epsilon(1e-7));
    CHECK(action_sigma_closed(3.0, -5.0, 1.0) ==
          doctest::Approx(action_sigma_quadrature(3.0, -5.0, 1.0)).epsilon(1e-10));

    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto [alpha, beta] = random_admissible(tri);
        const double closed = action_sigma_closed(3.0, alpha, beta);
        const double quad = action_sigma_quadrature(3.0, alpha, beta);
        worst = std::max(worst, std::abs(closed - quad));
    }
    CHECK(worst < 1e-9);

    // P enters linearly
    CHECK(action_sigma_closed(3.0, -2.0, 1.0, 2.5) ==
          doctest::Approx(2.5 * action_sigma_closed(3.0, -2.0, 1.0)).epsilon(1e-14));
}

TEST_CASE("action_tau duality and edge values") {
    // symmetric cavity at alpha = 0: J_tau = J_sigma
    CHECK(action_tau(2.0, 0.0, 0.7) ==
          doctest::Approx(action_sigma_closed(2.0, 0.0, 0.7)));
    // caustic at the wall
    CHECK(action_tau(2.0, 4.0, 0.0) == doctest::Approx(0.0));
    // against quadrature of the tau integrand
    const double q = action_oracle(2.0, +1.0, 0.5);  // J_tau(alpha=-1) = J_sigma(+1)
    CHECK(action_tau(2.0, -1.0, 0.5) == doctest::Approx(q).epsilon(1e-10));
}

TEST_CASE("action_phi") {
    CHECK(action_phi(0.0) == 0.0);
    CHECK(action_phi(1.0, 1.0, +1) == doctest::Approx(1.0));
    const double beta = uniform(0.1, 5.0), P = uniform(0.5, 2.0);
    const double Lz = action_phi(beta, P, -1);
    CHECK(Lz * Lz == doctest::Approx(beta * P * P).epsilon(1e-14));
}

TEST_CASE("dJ/dalpha matches finite differences and keeps its sign") {
    const Cavity cav(3.0, 2.0);
    const AdmissibleTriangle tri = admissible_region(cav);

    const double fd = central_diff(
        [&](double a) { return action_sigma_quadrature(3.0, a, 1.0); }, 0.0, 1e-5);
    CHECK(dJ_dalpha(WallId::SigmaWall, cav, 0.0, 1.0) ==
          doctest::Approx(fd).epsilon(1e-6));

    for (int i = 0; i < 200; ++i) {
        const auto [alpha, beta] = random_admissible(tri);
        CHECK(dJ_dalpha(WallId::SigmaWall, cav, alpha, beta) >= 0);
        CHECK(dJ_dalpha(WallId::TauWall, cav, alpha, beta) <= 0);
    }

    // symmetric cavity, alpha = 0: the two derivatives mirror
    const Cavity sym(2.0, 2.0);
    CHECK(dJ_dalpha(WallId::SigmaWall, sym, 0.0, 1.0) ==
          doctest::Approx(-dJ_dalpha(WallId::TauWall, sym, 0.0, 1.0)).epsilon(1e-13));

    // Delta -> 0 sentinel
    CHECK(std::isinf(dJ_dalpha(WallId::SigmaWall, cav, 0.0, 0.0)));
}

TEST_CASE("stability identity (alpha - 2A)(A_w + 2G) = Delta^2") {
    const Cavity cav(3.0, 2.0);
    const AdmissibleTriangle tri = admissible_region(cav);
    for (int i = 0; i < 300; ++i) {
        const auto [alpha, beta] = random_admissible(tri);
        const ClosedFormAux aux(3.0, alpha, beta);
        const double lhs = (alpha - 2 * aux.A) * (aux.A_wall + 2 * aux.G);
        CHECK(lhs == doctest::Approx(aux.delta * aux.delta).epsilon(1e-10));
        CHECK(aux.delta <= aux.A_wall + 1e-12);
    }
}

TEST_CASE("winding number limits and frequency-ratio oracle") {
    const Cavity cav(3.0, 2.0);
    CHECK(winding_number(cav, 0.0, 0.0) == doctest::Approx(1.0));

    const Cavity sym(2.0, 2.0);
    CHECK(winding_number(sym, 0.0, 0.9) == doctest::Approx(1.0).epsilon(1e-13));

    // w = |dJ_tau/dalpha| / |dJ_sigma/dalpha| with the derivatives taken by
    // finite differences of the quadrature actions
    const double num = -central_diff(
        [&](double a) { return action_sigma_quadrature(2.0, -a, 1.0); }, 0.0, 1e-6);
    const double den = central_diff(
        [&](double a) { return action_sigma_quadrature(3.0, a, 1.0); }, 0.0, 1e-6);
    CHECK(winding_number(cav, 0.0, 1.0) ==
          doctest::Approx(std::abs(num) / std::abs(den)).epsilon(1e-8));

    // w = 1 exactly on the line alpha = tau0^2 - sigma0^2
    CHECK(winding_number(cav, -5.0, 9.0) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("theta functions: range, limits, and the dJ/dbeta identity") {
    const Cavity cav(3.0, 2.0);
    const AdmissibleTriangle tri = admissible_region(cav);

    // beta = 0 limits
    CHECK(theta_sigma(cav, -2.0, 0.0) == doctest::Approx(0.0));
    CHECK(theta_tau(cav, -2.0, 0.0) == doctest::Approx(0.5));
    CHECK(theta_sigma(cav, 2.0, 0.0) == doctest::Approx(0.5));
    CHECK(theta_tau(cav, 2.0, 0.0) == doctest::Approx(0.0));

    // symmetric cavity at alpha = 0
    const Cavity sym(2.0, 2.0);
    CHECK(theta_sigma(sym, 0.0, 1.0) == doctest::Approx(theta_tau(sym, 0.0, 1.0)));

    for (int i = 0; i < 300; ++i) {
        const auto [alpha, beta] = random_admissible(tri);
        const double ts = theta_sigma(cav, alpha, beta);
        const double tt = theta_tau(cav, alpha, beta);
        CHECK(ts >= 0.0);
        CHECK(ts <= 0.5);
        CHECK(tt >= 0.0);
        CHECK(tt <= 0.5);
    }

    // theta_sigma = -(2 sqrt(beta)/P) dJ_sigma/dbeta against the quadrature action
    for (const auto& [alpha, beta] :
         std::vector<std::pair<double, double>>{{-2, 2}, {0, 1}, {1, 0.5}, {-5, 1}}) {
        const double dJdb = central_diff(
            [&, a = alpha](double b) { return action_sigma_quadrature(3.0, a, b); },
            beta, 1e-6);
        CHECK(theta_sigma(cav, alpha, beta) ==
              doctest::Approx(-2.0 * std::sqrt(beta) * dJdb).epsilon(1e-7));
        const double dJtdb = central_diff(
            [&, a = alpha](double b) { return action_sigma_quadrature(2.0, -a, b); },
            beta, 1e-6);
        CHECK(theta_tau(cav, alpha, beta) ==
              doctest::Approx(-2.0 * std::sqrt(beta) * dJtdb).epsilon(1e-7));
    }
}

TEST_CASE("closure residuals") {
    const Cavity sym(2.0, 2.0);
    const ClosureResidual r = closure_residual(sym, 0.0, 0.0, 1, 1, 0);
    CHECK(r.r1 == doctest::Approx(0.0));
    CHECK(r.r2 == doctest::Approx(0.0));  // beta = 0 meridional convention

    const Cavity cav(3.0, 2.0);
    const double alpha = -1.7, beta = 2.3;
    const double w = winding_number(cav, alpha, beta);
    // definitional: r1 vanishes when s/t is w itself
    const ClosureResidual r2 = closure_residual(cav, alpha, beta, 1, 1, 0);
    CHECK(r2.r1 == doctest::Approx(w - 1.0));
}
