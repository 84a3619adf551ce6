#include "stiga/bspline.hpp"

#include "stiga/error.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <string>

namespace stiga {
namespace {

// Cox-de Boor quotient with the convention 0/0 := 0.
inline double ratio(double num, double den) noexcept { return den == 0.0 ? 0.0 : num / den; }

void check_parameter(double t) {
    if (!(t >= 0.0 && t <= 1.0)) {
        throw DomainError("B-spline parameter " + std::to_string(t) + " outside [0,1]");
    }
}

}  // namespace

KnotVector::KnotVector(std::vector<double> knots, int degree, double beta_warning)
    : knots_(std::move(knots)), degree_(degree) {
    if (degree_ < 1) throw ArgumentError("B-spline degree must be >= 1, got " + std::to_string(degree_));
    const auto p = static_cast<std::size_t>(degree_);
    if (knots_.size() < 2 * p + 2) {
        throw ArgumentError("knot vector of degree " + std::to_string(degree_) + " needs at least " +
                            std::to_string(2 * p + 2) + " knots");
    }
    for (std::size_t i = 0; i <= p; ++i) {
        if (knots_[i] != 0.0 || knots_[knots_.size() - 1 - i] != 1.0) {
            throw ArgumentError("knot vector is not open on [0,1]");
        }
    }
    for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
        if (!(knots_[i] <= knots_[i + 1])) throw ArgumentError("knot vector is not nondecreasing");
    }
    double smallest = 1.0;
    for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
        const double len = knots_[i + 1] - knots_[i];
        if (len > 0.0) {
            spans_.push_back(static_cast<int>(i));
            h_ = std::max(h_, len);
            smallest = std::min(smallest, len);
        }
    }
    beta_ = smallest / h_;
    if (beta_ < beta_warning) {
        std::clog << "warning: knot vector is not quasi-uniform (beta = " << beta_ << ")\n";
    }
}

KnotVector uniform_open_knots(int num_elements, int degree) {
    if (num_elements < 1) throw ArgumentError("number of elements must be >= 1");
    if (degree < 1) throw ArgumentError("B-spline degree must be >= 1");
    std::vector<double> knots;
    knots.reserve(static_cast<std::size_t>(num_elements + 2 * degree + 1));
    knots.insert(knots.end(), static_cast<std::size_t>(degree), 0.0);
    for (int e = 0; e <= num_elements; ++e) {
        knots.push_back(static_cast<double>(e) / num_elements);
    }
    knots.back() = 1.0;
    knots.insert(knots.end(), static_cast<std::size_t>(degree), 1.0);
    return KnotVector(std::move(knots), degree);
}

int find_span(const KnotVector& kv, double t) {
    check_parameter(t);
    const auto& spans = kv.nonempty_spans();
    if (t >= 1.0) return spans.back();
    const auto knots = kv.knots();
    // last knot index i with knots[i] <= t
    const auto it = std::upper_bound(knots.begin(), knots.end(), t);
    return static_cast<int>(it - knots.begin()) - 1;
}

BasisDerivatives eval_basis_derivs(const KnotVector& kv, int span, double t, int n) {
    check_parameter(t);
    const int p = kv.degree();
    const int nn = std::min(n, p);
    BasisDerivatives out(span - p, n, p + 1);

    // ndu holds basis values in its upper triangle and knot differences below.
    std::vector<double> ndu(static_cast<std::size_t>((p + 1) * (p + 1)), 0.0);
    auto at = [&](int r, int c) -> double& { return ndu[static_cast<std::size_t>(r * (p + 1) + c)]; };
    std::vector<double> left(static_cast<std::size_t>(p + 1)), right(static_cast<std::size_t>(p + 1));
    at(0, 0) = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[j] = t - kv[static_cast<std::size_t>(span + 1 - j)];
        right[j] = kv[static_cast<std::size_t>(span + j)] - t;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            at(j, r) = right[r + 1] + left[j - r];
            const double temp = ratio(at(r, j - 1), at(j, r));
            at(r, j) = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        at(j, j) = saved;
    }
    for (int j = 0; j <= p; ++j) out(0, j) = at(j, p);

    std::vector<double> a(static_cast<std::size_t>(2 * (p + 1)), 0.0);
    auto coef = [&](int s, int c) -> double& { return a[static_cast<std::size_t>(s * (p + 1) + c)]; };
    for (int r = 0; r <= p; ++r) {
        int s1 = 0;
        int s2 = 1;
        coef(0, 0) = 1.0;
        for (int k = 1; k <= nn; ++k) {
            double d = 0.0;
            const int rk = r - k;
            const int pk = p - k;
            if (r >= k) {
                coef(s2, 0) = ratio(coef(s1, 0), at(pk + 1, rk));
                d = coef(s2, 0) * at(rk, pk);
            }
            const int j1 = rk >= -1 ? 1 : -rk;
            const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
            for (int j = j1; j <= j2; ++j) {
                coef(s2, j) = ratio(coef(s1, j) - coef(s1, j - 1), at(pk + 1, rk + j));
                d += coef(s2, j) * at(rk + j, pk);
            }
            if (r <= pk) {
                coef(s2, k) = ratio(-coef(s1, k - 1), at(pk + 1, r));
                d += coef(s2, k) * at(r, pk);
            }
            out(k, r) = d;
            std::swap(s1, s2);
        }
    }
    double factor = p;
    for (int k = 1; k <= nn; ++k) {
        for (int j = 0; j <= p; ++j) out(k, j) *= factor;
        factor *= (p - k);
    }
    return out;
}

BasisDerivatives eval_basis_derivs(const KnotVector& kv, double t, int n) {
    return eval_basis_derivs(kv, find_span(kv, t), t, n);
}

std::vector<double> eval_basis(const KnotVector& kv, int span, double t) {
    const auto d = eval_basis_derivs(kv, span, t, 0);
    const auto row = d.row(0);
    return {row.begin(), row.end()};
}

std::vector<double> eval_basis(const KnotVector& kv, double t) { return eval_basis(kv, find_span(kv, t), t); }

std::vector<double> greville_points(const KnotVector& kv) {
    const int p = kv.degree();
    std::vector<double> g(static_cast<std::size_t>(kv.size()));
    for (int j = 0; j < kv.size(); ++j) {
        double s = 0.0;
        for (int k = 1; k <= p; ++k) s += kv[static_cast<std::size_t>(j + k)];
        g[static_cast<std::size_t>(j)] = s / p;
    }
    return g;
}

SplineSpace1D::SplineSpace1D(KnotVector kv, Constraint constraint) : kv_(std::move(kv)), constraint_(constraint) {
    const int l = kv_.size();
    switch (constraint_) {
    case Constraint::none:
        offset_ = 0;
        dof_count_ = l;
        break;
    case Constraint::zero_at_both_ends:
        offset_ = 1;
        dof_count_ = l - 2;
        break;
    case Constraint::zero_at_left_end:
        offset_ = 1;
        dof_count_ = l - 1;
        break;
    }
    if (dof_count_ < 1) throw ArgumentError("constrained spline space has no degrees of freedom");
}

}  // namespace stiga
