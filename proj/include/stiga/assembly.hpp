#pragma once

// Space-time spline spaces and the matrices of the discrete mixed system
//
//   W u + (K + M) v = f,   K u - M v = 0,
//
// with W = W_t (x) M_s, K = M_t (x) K_s, M = M_t (x) M_s.

#include "stiga/bspline.hpp"
#include "stiga/geometry.hpp"
#include "stiga/sparse.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace stiga {

/// f(x, y, t) in physical coordinates.
using ScalarField = std::function<double(double, double, double)>;

/// Tensor-product space V_h = V_{h_s} (x) V_{h_t} over the mapped cylinder
/// Omega x (0,T).  Spatial dofs are numbered i_s = i_x + n_x * i_y and global
/// dofs i = i_t * n_s + i_s.
class SpaceTimeSpace {
public:
    SpaceTimeSpace(SplineSpace1D x, SplineSpace1D y, SplineSpace1D t, GeometryMap geometry, double final_time);

    /// Uniform mesh with the same element count and degree in space and time.
    static SpaceTimeSpace uniform(int elements, int degree, GeometryMap geometry, double final_time);

    [[nodiscard]] const SplineSpace1D& x() const noexcept { return x_; }
    [[nodiscard]] const SplineSpace1D& y() const noexcept { return y_; }
    [[nodiscard]] const SplineSpace1D& t() const noexcept { return t_; }
    [[nodiscard]] const GeometryMap& geometry() const noexcept { return geometry_; }
    [[nodiscard]] double final_time() const noexcept { return final_time_; }

    [[nodiscard]] int n_x() const noexcept { return x_.dof_count(); }
    [[nodiscard]] int n_y() const noexcept { return y_.dof_count(); }
    [[nodiscard]] int n_s() const noexcept { return n_x() * n_y(); }
    [[nodiscard]] int n_t() const noexcept { return t_.dof_count(); }
    [[nodiscard]] int dof_count() const noexcept { return n_s() * n_t(); }
    /// Largest knot span over all three directions.
    [[nodiscard]] double mesh_size() const noexcept;

private:
    SplineSpace1D x_;
    SplineSpace1D y_;
    SplineSpace1D t_;
    GeometryMap geometry_;
    double final_time_;
};

struct TimeMatrices {
    SparseMatrix derivative;  ///< W_t(i,j) = int_0^T b_j' b_i dt
    SparseMatrix mass;        ///< M_t(i,j) = int_0^T b_j b_i dt
};

struct SpatialMatrices {
    SparseMatrix stiffness;  ///< K_s(i,j) = int grad B_j . grad B_i
    SparseMatrix mass;       ///< M_s(i,j) = int B_j B_i
};

/// quad_points == 0 selects degree + 1 Gauss points per span.
[[nodiscard]] TimeMatrices assemble_time_matrices(const SplineSpace1D& time, double final_time, int quad_points = 0);

/// Matrices over the mapped domain; throws AssemblyError at a singular Jacobian.
[[nodiscard]] SpatialMatrices assemble_spatial_matrices(const SplineSpace1D& x, const SplineSpace1D& y,
                                                        const GeometryMap& geometry, int quad_points = 0);

/// 1D stiffness (int b_j' b_i) and mass (int b_j b_i) on (0,1).
[[nodiscard]] SpatialMatrices assemble_univariate_matrices(const SplineSpace1D& space, int quad_points = 0);

struct SpaceTimeOperators {
    KroneckerOperator W;
    KroneckerOperator K;
    KroneckerOperator M;

    [[nodiscard]] int size() const noexcept { return W.rows(); }
};

/// W = W_t (x) M_s, K = M_t (x) K_s, M = M_t (x) M_s; ArgumentError on mismatch.
[[nodiscard]] SpaceTimeOperators compose_system(SparseMatrix time_derivative, SparseMatrix time_mass,
                                                SparseMatrix space_stiffness, SparseMatrix space_mass);

/// f_i = int_0^T int_Omega f B_i.  Throws AssemblyError on a non-finite f value.
[[nodiscard]] std::vector<double> assemble_load(const ScalarField& f, const SpaceTimeSpace& space,
                                                int quad_points = 0);

/// Separable stand-in for the spatial matrices used by the fast-diagonalization
/// preconditioner:
///   K_s ~ gx * (M_y (x) K_x) + gy * (K_y (x) M_x),  M_s ~ m * (M_y (x) M_x),
/// with 1D matrices on (0,1) and weights equal to parametric averages of the
/// pulled-back metric.  Exact for the unit square.
struct SeparableSpatialModel {
    SpatialMatrices x;
    SpatialMatrices y;
    double grad_x_weight = 1.0;
    double grad_y_weight = 1.0;
    double mass_weight = 1.0;
};

[[nodiscard]] SeparableSpatialModel separable_spatial_model(const SpaceTimeSpace& space, int quad_points = 0);

/// All pieces of the discrete system for one mesh.
struct DiscreteSystem {
    TimeMatrices time;
    SpatialMatrices spatial;
    SpaceTimeOperators operators;
    std::vector<double> load;
    SeparableSpatialModel separable;
};

[[nodiscard]] DiscreteSystem assemble_system(const SpaceTimeSpace& space, const ScalarField& forcing,
                                             int quad_points = 0);

/// Entry-by-entry space-time assembly with full 3D quadrature and no Kronecker
/// shortcut; the test oracle for compose_system.  Refuses N > 400.
struct DenseSpaceTimeSystem {
    Eigen::MatrixXd W;
    Eigen::MatrixXd K;
    Eigen::MatrixXd M;
    Eigen::VectorXd load;
};

inline constexpr int dense_oracle_max_dofs = 400;

[[nodiscard]] DenseSpaceTimeSystem assemble_dense_spacetime_oracle(const SpaceTimeSpace& space,
                                                                   const ScalarField& forcing = {},
                                                                   int quad_points = 0);

}  // namespace stiga
