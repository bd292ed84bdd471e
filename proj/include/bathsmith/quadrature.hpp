// quadrature.hpp - Adaptive integration and composite Gauss-Legendre node sets

#pragma once

#include <functional>
#include <span>
#include <vector>

namespace bathsmith::quad {

struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
    std::size_t size() const { return nodes.size(); }
};

// n-point Gauss-Legendre rule on [-1, 1] (Newton iteration on P_n).
Rule gauss_legendre(int n);

struct Result {
    double value = 0.0;
    double error = 0.0;
};

// Adaptive Gauss-Kronrod integration of f over [a, b]; b may be +infinity.
// Throws NumericError when the error estimate exceeds
// max(rel_tol * |value|, abs_tol).
Result integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-10, double abs_tol = 0.0);

// Integrates piecewise between sorted breakpoints (duplicates and points
// outside [a, b] are ignored) so that narrow features are never skipped.
Result integrate_with_breaks(const std::function<double(double)>& f, double a, double b,
                             std::span<const double> breaks, double rel_tol = 1e-10);

// Composite Gauss-Legendre rule over consecutive intervals [edges[i], edges[i+1]].
Rule composite(std::span<const double> edges, int points_per_panel);

// Panel edges over [lo, hi]: no panel wider than max_width, and panels no
// wider than fine_width(x) near features; fine_width is queried at panel starts.
std::vector<double> graded_edges(double lo, double hi, double max_width,
                                 const std::function<double(double)>& local_width);

} // namespace bathsmith::quad
