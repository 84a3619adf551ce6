#include "stiga/geometry.hpp"

#include "stiga/error.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace stiga {

GeometryMap GeometryMap::quarter_annulus(double r_in, double r_out) {
    if (!(r_in > 0.0 && r_in < r_out)) {
        throw ArgumentError("quarter annulus requires 0 < r_in < r_out");
    }
    return GeometryMap(GeometryKind::quarter_annulus, r_in, r_out);
}

GeometryMap GeometryMap::from_name(std::string_view name) {
    if (name == "square") return unit_square();
    if (name == "ring") return quarter_annulus(1.0, 2.0);
    throw ArgumentError("unknown geometry '" + std::string(name) + "' (expected square or ring)");
}

std::string GeometryMap::name() const {
    if (kind_ == GeometryKind::unit_square) return "square";
    if (r_in_ == 1.0 && r_out_ == 2.0) return "ring";
    std::ostringstream os;
    os << "quarter_annulus(" << r_in_ << "," << r_out_ << ")";
    return os.str();
}

Vec2 GeometryMap::map_point(const Vec2& zeta) const noexcept {
    if (kind_ == GeometryKind::unit_square) return zeta;
    const double r = r_in_ + zeta[0] * (r_out_ - r_in_);
    const double theta = 0.5 * std::numbers::pi * zeta[1];
    return {r * std::cos(theta), r * std::sin(theta)};
}

Jacobian GeometryMap::jacobian(const Vec2& zeta) const noexcept {
    Jacobian jac;
    if (kind_ == GeometryKind::unit_square) {
        jac.matrix.m = {{{1.0, 0.0}, {0.0, 1.0}}};
        jac.det = 1.0;
        return jac;
    }
    const double dr = r_out_ - r_in_;
    const double r = r_in_ + zeta[0] * dr;
    const double dtheta = 0.5 * std::numbers::pi;
    const double theta = dtheta * zeta[1];
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    jac.matrix.m = {{{dr * c, -r * dtheta * s}, {dr * s, r * dtheta * c}}};
    jac.det = dr * dtheta * r;
    return jac;
}

Vec2 pullback_gradient(const Jacobian& jac, const Vec2& g) {
    if (!(std::abs(jac.det) > 1e-14)) {
        throw NumericalError("singular geometry Jacobian (det = " + std::to_string(jac.det) + ")");
    }
    const auto& m = jac.matrix.m;
    // J^{-T} = (1/det) [[ m11, -m10], [-m01, m00]]
    return {(m[1][1] * g[0] - m[1][0] * g[1]) / jac.det, (-m[0][1] * g[0] + m[0][0] * g[1]) / jac.det};
}

Vec2 GeometryMap::pullback_gradient(const Vec2& zeta, const Vec2& parametric_grad) const {
    const auto jac = jacobian(zeta);
    try {
        return stiga::pullback_gradient(jac, parametric_grad);
    } catch (const NumericalError& e) {
        std::ostringstream os;
        os << e.what() << " at zeta = (" << zeta[0] << ", " << zeta[1] << ")";
        throw NumericalError(os.str());
    }
}

}  // namespace stiga
