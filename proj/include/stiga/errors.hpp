#pragma once

// Discrete solutions, relative error norms, observed rates and the discrete
// inf-sup constant.

#include "stiga/assembly.hpp"
#include "stiga/geometry.hpp"
#include "stiga/problems.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <vector>

namespace stiga {

enum class Field { u, v };

/// Coefficients of (u_h, v_h) in the basis of a SpaceTimeSpace.
class DiscreteSolution {
public:
    /// Throws ArgumentError unless both vectors have length N and are finite.
    DiscreteSolution(SpaceTimeSpace space, std::vector<double> u, std::vector<double> v);

    [[nodiscard]] const SpaceTimeSpace& space() const noexcept { return space_; }
    [[nodiscard]] const std::vector<double>& u() const noexcept { return u_; }
    [[nodiscard]] const std::vector<double>& v() const noexcept { return v_; }
    [[nodiscard]] const std::vector<double>& coefficients(Field f) const noexcept { return f == Field::u ? u_ : v_; }

private:
    SpaceTimeSpace space_;
    std::vector<double> u_;
    std::vector<double> v_;
};

struct PointEvaluation {
    double value = 0.0;
    Vec2 grad{0.0, 0.0};  ///< physical spatial gradient
    double dt = 0.0;      ///< derivative in physical time t = T tau
};

/// Evaluate u_h or v_h at the parametric point (zeta, tau) in [0,1]^3.
[[nodiscard]] PointEvaluation eval_solution(const DiscreteSolution& sol, Field field, const Vec2& zeta, double tau);

struct ErrorReport {
    double e_u1 = 0.0;  ///< (grad, d_t) norm of u - u_h relative to u
    double e_u2 = 0.0;  ///< L2(L2) of u - u_h relative to u
    double e_v1 = 0.0;  ///< gradient L2(L2) of v - v_h relative to v
    double e_v2 = 0.0;  ///< L2(L2) of v - v_h relative to v
    double h = 0.0;
    int p = 0;
    long dof = 0;  ///< unknowns of the block system, 2N
};

/// Relative errors by tensor Gauss quadrature; quad_points == 0 selects p + 2
/// per span.  Throws NumericalError when an exact norm is below 1e-14.
[[nodiscard]] ErrorReport error_norms(const DiscreteSolution& sol, const ManufacturedProblem& problem,
                                      int quad_points = 0);

struct RatePair {
    std::optional<double> u1;
    std::optional<double> u2;
    std::optional<double> v1;
    std::optional<double> v2;
};

/// Observed orders log2(E(h) / E(h/2)) for consecutive reports; entry i
/// compares reports i and i+1.  A pair that does not halve h, or has a zero
/// error, yields nullopt.  Needs at least two reports.
[[nodiscard]] std::vector<RatePair> convergence_rates(std::span<const ErrorReport> reports);

/// log2(coarse / fine), or nullopt if either is zero or non-finite.
[[nodiscard]] std::optional<double> observed_rate(double coarse, double fine);

inline constexpr int infsup_max_dofs = 400;

/// Smallest singular value of G_W^{-1/2} A G_V^{-1/2} with
/// A = [[W, K+M], [K, -M]], G_W = diag(K, K), G_V = diag(W^T K^{-1} W + K, K).
[[nodiscard]] double infsup_constant(const Eigen::MatrixXd& W, const Eigen::MatrixXd& K, const Eigen::MatrixXd& M);

/// Discrete inf-sup constant of the space (N <= infsup_max_dofs, GuardError otherwise).
[[nodiscard]] double discrete_infsup_constant(const SpaceTimeSpace& space);

/// L2(Q) projection of a space-time function onto the space.
[[nodiscard]] std::vector<double> project_l2(const SpaceTimeSpace& space, const ScalarField& f, int quad_points = 0);

}  // namespace stiga
