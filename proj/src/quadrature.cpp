#include "stiga/quadrature.hpp"

#include "stiga/error.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace stiga {

ReferenceRule gauss_legendre_reference(int n) {
    if (n < 1 || n > 16) {
        throw ArgumentError("Gauss-Legendre order must be in [1,16], got " + std::to_string(n));
    }
    ReferenceRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    // Newton on P_n from the Chebyshev-like initial guesses; roots come out
    // in decreasing order and are mirrored.
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) <= 1e-15) break;
        }
        // recompute the derivative at the converged root
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = pk;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        const auto lo = static_cast<std::size_t>(i);
        const auto hi = static_cast<std::size_t>(n - 1 - i);
        rule.nodes[lo] = -x;
        rule.nodes[hi] = x;
        rule.weights[lo] = w;
        rule.weights[hi] = w;
    }
    if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
    return rule;
}

QuadratureRule1D per_span_rule(const KnotVector& kv, int points_per_span) {
    const auto ref = gauss_legendre_reference(points_per_span);
    QuadratureRule1D rule;
    rule.points_per_span = points_per_span;
    for (const int i : kv.nonempty_spans()) {
        const double a = kv[static_cast<std::size_t>(i)];
        const double b = kv[static_cast<std::size_t>(i + 1)];
        rule.spans.push_back({i, a, b});
        const double half = 0.5 * (b - a);
        const double mid = 0.5 * (a + b);
        for (int q = 0; q < points_per_span; ++q) {
            rule.nodes.push_back(mid + half * ref.nodes[static_cast<std::size_t>(q)]);
            rule.weights.push_back(half * ref.weights[static_cast<std::size_t>(q)]);
        }
    }
    return rule;
}

}  // namespace stiga
