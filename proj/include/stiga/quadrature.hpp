#pragma once

// Gauss-Legendre rules, reference and per knot span.

#include "stiga/bspline.hpp"

#include <vector>

namespace stiga {

struct ReferenceRule {
    std::vector<double> nodes;    ///< on [-1,1], increasing
    std::vector<double> weights;  ///< sum to 2
};

/// n-point Gauss-Legendre rule, 1 <= n <= 16 (ArgumentError otherwise).
[[nodiscard]] ReferenceRule gauss_legendre_reference(int n);

/// Reference rule mapped into every nonempty span of a knot vector.
struct QuadratureRule1D {
    struct Span {
        int knot_index;  ///< i with knots[i] < knots[i+1]
        double lower;
        double upper;
    };

    int points_per_span = 0;
    std::vector<Span> spans;
    std::vector<double> nodes;    ///< spans.size() * points_per_span, span-major
    std::vector<double> weights;

    [[nodiscard]] std::size_t size() const noexcept { return nodes.size(); }
    [[nodiscard]] std::size_t span_of_node(std::size_t q) const noexcept {
        return q / static_cast<std::size_t>(points_per_span);
    }
};

[[nodiscard]] QuadratureRule1D per_span_rule(const KnotVector& kv, int points_per_span);

}  // namespace stiga
