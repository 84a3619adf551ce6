#pragma once

// Univariate B-spline bases on open knot vectors over [0,1].

#include <cstddef>
#include <span>
#include <vector>

namespace stiga {

/// Open knot vector on [0,1] together with its polynomial degree.
///
/// The first and last degree+1 knots are 0 and 1.  The mesh size h is the
/// largest knot span and beta = (smallest nonempty span) / h records the
/// quasi-uniformity constant of the mesh.
class KnotVector {
public:
    /// Validates openness and monotonicity; throws ArgumentError otherwise.
    /// A warning is written to std::clog when beta < beta_warning.
    KnotVector(std::vector<double> knots, int degree, double beta_warning = 1e-2);

    [[nodiscard]] int degree() const noexcept { return degree_; }
    /// Number of basis functions l (knots().size() == l + p + 1).
    [[nodiscard]] int size() const noexcept { return static_cast<int>(knots_.size()) - degree_ - 1; }
    [[nodiscard]] std::span<const double> knots() const noexcept { return knots_; }
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return knots_[i]; }
    [[nodiscard]] double mesh_size() const noexcept { return h_; }
    [[nodiscard]] double beta() const noexcept { return beta_; }

    /// Knot indices i with knots[i] < knots[i+1], in increasing order.
    [[nodiscard]] const std::vector<int>& nonempty_spans() const noexcept { return spans_; }

private:
    std::vector<double> knots_;
    int degree_;
    double h_ = 0.0;
    double beta_ = 1.0;
    std::vector<int> spans_;
};

/// Open knot vector with num_elements equal spans and simple interior knots.
[[nodiscard]] KnotVector uniform_open_knots(int num_elements, int degree);

/// Index i with knots[i] <= t < knots[i+1]; t == 1 maps to the last nonempty span.
[[nodiscard]] int find_span(const KnotVector& kv, double t);

/// Values of the p+1 basis functions that are nonzero on `span`, i.e.
/// functions span-p .. span, evaluated at t.
[[nodiscard]] std::vector<double> eval_basis(const KnotVector& kv, int span, double t);
[[nodiscard]] std::vector<double> eval_basis(const KnotVector& kv, double t);

/// Values and derivatives up to order n of the p+1 nonzero functions.
/// Row-major (n+1) x (p+1); rows above the degree are exact zeros.
class BasisDerivatives {
public:
    BasisDerivatives() = default;
    BasisDerivatives(int first, int orders, int width)
        : first_(first), width_(width), data_(static_cast<std::size_t>((orders + 1) * width), 0.0) {}

    /// Index of the basis function in column 0.
    [[nodiscard]] int first() const noexcept { return first_; }
    [[nodiscard]] int width() const noexcept { return width_; }
    [[nodiscard]] int orders() const noexcept {
        return width_ == 0 ? 0 : static_cast<int>(data_.size()) / width_ - 1;
    }
    [[nodiscard]] double operator()(int order, int j) const noexcept {
        return data_[static_cast<std::size_t>(order * width_ + j)];
    }
    double& operator()(int order, int j) noexcept { return data_[static_cast<std::size_t>(order * width_ + j)]; }
    [[nodiscard]] std::span<const double> row(int order) const noexcept {
        return std::span<const double>(data_).subspan(static_cast<std::size_t>(order * width_),
                                                      static_cast<std::size_t>(width_));
    }

private:
    int first_ = 0;
    int width_ = 0;
    std::vector<double> data_;
};

[[nodiscard]] BasisDerivatives eval_basis_derivs(const KnotVector& kv, int span, double t, int n);
[[nodiscard]] BasisDerivatives eval_basis_derivs(const KnotVector& kv, double t, int n);

/// Knot averages (xi_{j+1} + ... + xi_{j+p}) / p, one per basis function.
[[nodiscard]] std::vector<double> greville_points(const KnotVector& kv);

enum class Constraint {
    none,
    zero_at_both_ends,  ///< drop the first and last function (homogeneous Dirichlet in space)
    zero_at_left_end,   ///< drop the first function (zero initial value in time)
};

/// A univariate spline space: the span of the basis of a knot vector minus
/// the functions removed by the constraint.  Degrees of freedom are numbered
/// 0 .. dof_count()-1 in increasing basis-function order.
class SplineSpace1D {
public:
    SplineSpace1D(KnotVector kv, Constraint constraint);

    [[nodiscard]] const KnotVector& knots() const noexcept { return kv_; }
    [[nodiscard]] Constraint constraint() const noexcept { return constraint_; }
    [[nodiscard]] int degree() const noexcept { return kv_.degree(); }
    [[nodiscard]] int dof_count() const noexcept { return dof_count_; }

    /// Degree of freedom carried by basis function j, or -1 if j was removed.
    [[nodiscard]] int dof_of_function(int j) const noexcept {
        const int d = j - offset_;
        return (d >= 0 && d < dof_count_) ? d : -1;
    }
    [[nodiscard]] int function_of_dof(int d) const noexcept { return d + offset_; }

private:
    KnotVector kv_;
    Constraint constraint_;
    int offset_ = 0;
    int dof_count_ = 0;
};

}  // namespace stiga
