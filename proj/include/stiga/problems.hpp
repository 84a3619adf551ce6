#pragma once

// Manufactured solutions for  d_t u + Lap^2 u - Lap u = f,  v = -Lap u,
// with u = Lap u = 0 on the lateral boundary and u(., 0) = 0.

#include "stiga/assembly.hpp"
#include "stiga/geometry.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace stiga {

using VectorField = std::function<Vec2(double, double, double)>;

struct ManufacturedProblem {
    std::string name;
    GeometryMap geometry = GeometryMap::unit_square();
    double final_time = 1.0;
    ScalarField u;
    VectorField grad_u;
    ScalarField dt_u;
    ScalarField v;  ///< -Lap u
    VectorField grad_v;
    ScalarField forcing;  ///< d_t u + Lap^2 u - Lap u
};

/// u = sin(pi t) sin(pi x) sin(pi y) on the unit square, T = 1.
[[nodiscard]] ManufacturedProblem example1();
/// u = t x^3 y^3 (x^2+y^2-1)^3 (x^2+y^2-4)^3 on the quarter annulus 1 < r < 2, T = 1.
[[nodiscard]] ManufacturedProblem example2();
/// "example1" or "example2"; ArgumentError otherwise.
[[nodiscard]] ManufacturedProblem problem_by_name(const std::string& name);

struct SpaceTimePoint {
    double x;
    double y;
    double t;
};

/// Distance from (x, y) to the spatial boundary of the problem's domain.
[[nodiscard]] double boundary_distance(const ManufacturedProblem& problem, double x, double y);

/// Uniform random points in Omega x (0,T), at least `margin` from every face.
[[nodiscard]] std::vector<SpaceTimePoint> interior_samples(const ManufacturedProblem& problem, int count,
                                                           double margin, std::uint64_t seed);

/// Random points on the lateral boundary of the problem's domain.
[[nodiscard]] std::vector<SpaceTimePoint> boundary_samples(const ManufacturedProblem& problem, int count,
                                                           std::uint64_t seed);

/// Finite-difference step used by pde_residual_oracle; samples must keep
/// 5 steps of distance from the boundary of Q_T.
inline constexpr double residual_oracle_step = 6e-3;

/// max |(d_t u + Lap^2 u - Lap u) - f| / (1 + |f|) over the samples, with all
/// derivatives of problem.u taken by Richardson-extrapolated central
/// differences.  ArgumentError if a sample is too close to the boundary.
[[nodiscard]] double pde_residual_oracle(const ManufacturedProblem& problem, const std::vector<SpaceTimePoint>& points);

}  // namespace stiga
