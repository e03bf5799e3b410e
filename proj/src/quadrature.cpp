#include "paracav/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "paracav/errors.hpp"

namespace paracav {

namespace {

GaussLegendreRule compute_rule(int n) {
    GaussLegendreRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    // Newton iteration on P_n from the Chebyshev-angle initial guess
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

}  // namespace

const GaussLegendreRule& gauss_legendre(int n) {
    static std::map<int, GaussLegendreRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_rule(n)).first;
    return it->second;
}

double integrate_gl(const std::function<double(double)>& f, double a, double b,
                    int n) {
    const GaussLegendreRule& rule = gauss_legendre(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double sum = 0;
    for (int i = 0; i < n; ++i)
        sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return sum * half;
}

namespace {

double adapt(const std::function<double(double)>& f, double a, double b,
             double abs_tol, int n, int depth, int max_depth) {
    const double coarse = integrate_gl(f, a, b, n);
    const double fine = integrate_gl(f, a, b, 2 * n);
    if (std::abs(fine - coarse) <= abs_tol || depth >= max_depth) {
        if (depth >= max_depth && std::abs(fine - coarse) > abs_tol)
            throw QuadratureNotConverged("integrate_adaptive: tolerance not reached");
        return fine;
    }
    const double mid = 0.5 * (a + b);
    return adapt(f, a, mid, 0.5 * abs_tol, n, depth + 1, max_depth) +
           adapt(f, mid, b, 0.5 * abs_tol, n, depth + 1, max_depth);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, int n, int max_depth) {
    if (a == b) return 0.0;
    return adapt(f, a, b, abs_tol, n, 0, max_depth);
}

}  // namespace paracav
