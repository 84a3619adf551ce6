#pragma once

// Solver for the saddle-point system
//
//   [ W   K + M ] [u]   [f]
//   [ K    -M   ] [v] = [0]

#include "stiga/assembly.hpp"
#include "stiga/preconditioner.hpp"

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace stiga {

struct BlockSystem {
    SpaceTimeOperators operators;
    std::vector<double> rhs;  ///< f, length N
    /// When present the solver uses the fast-diagonalization preconditioner.
    std::optional<SeparableSpatialModel> separable;

    [[nodiscard]] int size() const noexcept { return operators.size(); }
};

[[nodiscard]] BlockSystem make_block_system(const DiscreteSystem& discrete);

struct SolveReport {
    int iterations = 0;
    double relative_residual = 0.0;  ///< ||b - A z|| / ||b||, recomputed after the solve
    double seconds = 0.0;
    std::string method;
};

struct SolveResult {
    std::vector<double> u;
    std::vector<double> v;
    SolveReport report;
};

struct SolveOptions {
    double tol = 1e-10;
    int max_iter = 0;  ///< 0 selects 10 * (2N)
    int restart = 100;
    std::vector<double> initial_guess;  ///< [u; v] or empty for zero
};

/// [W u + K v + M v; K u - M v] using Kronecker matvecs only.
void block_matvec(const SpaceTimeOperators& ops, std::span<const double> z, std::span<double> out);
[[nodiscard]] std::vector<double> block_matvec(const SpaceTimeOperators& ops, std::span<const double> z);

/// Relative residual of z = [u; v] for right-hand side [f; 0].
[[nodiscard]] double relative_residual(const BlockSystem& system, std::span<const double> z);

/// Right-preconditioned restarted GMRES.  Throws ConvergenceError carrying the
/// best residual when max_iter is exhausted, NumericalError on breakdown.
[[nodiscard]] SolveResult solve(const BlockSystem& system, const SolveOptions& options = {});

inline constexpr int dense_solve_max_dofs = 400;

/// Materialized 2N x 2N block matrix (N <= dense_solve_max_dofs).
[[nodiscard]] Eigen::MatrixXd dense_block_matrix(const SpaceTimeOperators& ops);

/// Direct LU solve of the materialized block matrix; the acceptance oracle.
[[nodiscard]] SolveResult solve_dense(const BlockSystem& system);

}  // namespace stiga
