#pragma once

// Basis values and first derivatives at the nodes of a per-span rule.

#include "stiga/bspline.hpp"
#include "stiga/quadrature.hpp"

#include <vector>

namespace stiga::detail {

struct Tabulated1D {
    QuadratureRule1D rule;
    int width = 0;
    std::vector<int> first;   // index of the first active basis function per node
    std::vector<double> val;  // node * width + a
    std::vector<double> der;

    [[nodiscard]] double value(std::size_t q, int a) const {
        return val[q * static_cast<std::size_t>(width) + static_cast<std::size_t>(a)];
    }
    [[nodiscard]] double deriv(std::size_t q, int a) const {
        return der[q * static_cast<std::size_t>(width) + static_cast<std::size_t>(a)];
    }
};

inline Tabulated1D tabulate(const SplineSpace1D& space, int points) {
    Tabulated1D tab;
    tab.rule = per_span_rule(space.knots(), points);
    tab.width = space.degree() + 1;
    const std::size_t n = tab.rule.size();
    const auto w = static_cast<std::size_t>(tab.width);
    tab.first.resize(n);
    tab.val.resize(n * w);
    tab.der.resize(n * w);
    for (std::size_t q = 0; q < n; ++q) {
        const int span = tab.rule.spans[tab.rule.span_of_node(q)].knot_index;
        const auto d = eval_basis_derivs(space.knots(), span, tab.rule.nodes[q], 1);
        tab.first[q] = d.first();
        for (int a = 0; a < tab.width; ++a) {
            tab.val[q * w + static_cast<std::size_t>(a)] = d(0, a);
            tab.der[q * w + static_cast<std::size_t>(a)] = d(1, a);
        }
    }
    return tab;
}

}  // namespace stiga::detail
