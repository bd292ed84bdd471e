// quadrature.cpp - Gauss-Legendre rules and Boost-backed adaptive Gauss-Kronrod

#include "bathsmith/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "bathsmith/error.hpp"

namespace bathsmith::quad {

Rule gauss_legendre(int n) {
    if (n < 1) throw ConfigError("gauss_legendre: n must be >= 1");
    Rule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    const double pi = std::acos(-1.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) { p1 = x; p0 = 1.0; }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // recompute derivative at the converged node
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        r.weights[i] = w;
        r.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) r.nodes[n / 2] = 0.0;
    return r;
}

Result integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol, double abs_tol) {
    using boost::math::quadrature::gauss_kronrod;
    Result out;
    if (a == b) return out;
    double err = 0.0;
    double l1 = 0.0;
    out.value = gauss_kronrod<double, 61>::integrate(f, a, b, 20, rel_tol, &err, &l1);
    out.error = err;
    if (!std::isfinite(out.value)) {
        std::ostringstream os;
        os << "quadrature produced a non-finite value on [" << a << ", " << b << "]";
        throw NumericError(os.str());
    }
    // Boost reports a Gauss/Kronrod difference; flag only gross failures,
    // callers needing certified accuracy verify by refinement.
    const double limit = std::max(std::sqrt(rel_tol) * std::max(std::abs(out.value), l1), abs_tol);
    if (err > limit && err > 1e-300) {
        std::ostringstream os;
        os << "quadrature did not converge on [" << a << ", " << b << "]: value "
           << out.value << ", error estimate " << err << ", requested relative " << rel_tol;
        throw NumericError(os.str());
    }
    return out;
}

Result integrate_with_breaks(const std::function<double(double)>& f, double a, double b,
                             std::span<const double> breaks, double rel_tol) {
    std::vector<double> pts{a};
    for (double x : breaks)
        if (x > a && x < b) pts.push_back(x);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    pts.push_back(b);
    Result total;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        auto piece = integrate(f, pts[i], pts[i + 1], rel_tol, 0.0);
        total.value += piece.value;
        total.error += piece.error;
    }
    return total;
}

Rule composite(std::span<const double> edges, int points_per_panel) {
    const Rule base = gauss_legendre(points_per_panel);
    Rule r;
    if (edges.size() < 2) return r;
    r.nodes.reserve((edges.size() - 1) * base.size());
    r.weights.reserve((edges.size() - 1) * base.size());
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        const double half = 0.5 * (edges[p + 1] - edges[p]);
        const double mid = 0.5 * (edges[p + 1] + edges[p]);
        for (std::size_t k = 0; k < base.size(); ++k) {
            r.nodes.push_back(mid + half * base.nodes[k]);
            r.weights.push_back(half * base.weights[k]);
        }
    }
    return r;
}

std::vector<double> graded_edges(double lo, double hi, double max_width,
                                 const std::function<double(double)>& local_width) {
    std::vector<double> edges{lo};
    double x = lo;
    while (x < hi) {
        double w = std::min(max_width, local_width(x));
        // look ahead so a panel never straddles a narrower region
        w = std::min(w, local_width(std::min(hi, x + w)));
        w = std::max(w, 1e-9 * std::max(1.0, std::abs(x)));
        x = std::min(hi, x + w);
        if (hi - x < 1e-9 * w) x = hi;
        edges.push_back(x);
    }
    return edges;
}

} // namespace bathsmith::quad
