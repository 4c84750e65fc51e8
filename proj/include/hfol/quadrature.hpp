#pragma once

#include <functional>
#include <vector>

namespace hfol {

/// Gauss-Legendre rule on [-1,1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Nodes and weights of order n, cached per order; thread-safe.
const GaussRule& gauss_legendre(int n);

struct SimpsonResult {
    double value = 0.0;
    double error_estimate = 0.0;
    long evaluations = 0;
    bool depth_limited = false;
};

/**
 * Adaptive Simpson quadrature of g over [a,b] to absolute tolerance tol.
 * Interior breakpoints (kinks, ramp edges) start their own panels, so
 * features narrower than the initial spacing are not stepped over.
 */
SimpsonResult adaptive_simpson(const std::function<double(double)>& g, double a, double b,
                               double tol, std::vector<double> breakpoints = {},
                               int max_depth = 48, int initial_panels = 8);

} // namespace hfol
