#pragma once

#include <functional>
#include <vector>

namespace paracav {

/// Gauss-Legendre nodes and weights on [-1, 1]; cached per order.
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

const GaussLegendreRule& gauss_legendre(int n);

/// Fixed-order Gauss-Legendre integral of f over [a, b].
double integrate_gl(const std::function<double(double)>& f, double a, double b,
                    int n = 48);

/// Adaptive panel-splitting Gauss-Legendre integration to an absolute
/// tolerance. Panels compare order n against order 2n and bisect on
/// disagreement. Throws QuadratureNotConverged past max_depth.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, int n = 24, int max_depth = 28);

}  // namespace paracav
