#pragma once

// Analytic parametrizations of the spatial domain from the unit square.

#include <array>
#include <string>
#include <string_view>

namespace stiga {

using Vec2 = std::array<double, 2>;

/// 2x2 matrix stored row-major: m[r][c].
struct Mat2 {
    std::array<std::array<double, 2>, 2> m{};

    [[nodiscard]] double det() const noexcept { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }
};

struct Jacobian {
    Mat2 matrix;  ///< d x_r / d zeta_c
    double det = 0.0;
};

enum class GeometryKind { unit_square, quarter_annulus };

class GeometryMap {
public:
    static GeometryMap unit_square() { return GeometryMap(GeometryKind::unit_square, 0.0, 0.0); }
    /// First-quadrant annulus r_in < r < r_out; zeta_1 is radial, zeta_2 angular.
    static GeometryMap quarter_annulus(double r_in, double r_out);
    /// "square" or "ring" (the quarter annulus with radii 1 and 2).
    static GeometryMap from_name(std::string_view name);

    [[nodiscard]] GeometryKind kind() const noexcept { return kind_; }
    [[nodiscard]] double inner_radius() const noexcept { return r_in_; }
    [[nodiscard]] double outer_radius() const noexcept { return r_out_; }
    [[nodiscard]] std::string name() const;

    [[nodiscard]] Vec2 map_point(const Vec2& zeta) const noexcept;
    [[nodiscard]] Jacobian jacobian(const Vec2& zeta) const noexcept;

    /// J^{-T} g: physical gradient of a function whose parametric gradient is g.
    /// Throws NumericalError if |det J| <= 1e-14 at zeta.
    [[nodiscard]] Vec2 pullback_gradient(const Vec2& zeta, const Vec2& parametric_grad) const;

private:
    GeometryMap(GeometryKind kind, double r_in, double r_out) : kind_(kind), r_in_(r_in), r_out_(r_out) {}

    GeometryKind kind_;
    double r_in_;
    double r_out_;
};

/// J^{-T} g for a precomputed Jacobian; throws NumericalError when singular.
[[nodiscard]] Vec2 pullback_gradient(const Jacobian& jac, const Vec2& parametric_grad);

}  // namespace stiga
