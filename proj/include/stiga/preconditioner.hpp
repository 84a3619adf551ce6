#pragma once

#include "stiga/assembly.hpp"
#include "stiga/sparse.hpp"

#include <span>
#include <string>
#include <vector>

namespace stiga {

/// z = P^{-1} r for vectors of length 2N laid out as [u; v].
class Preconditioner {
public:
    virtual ~Preconditioner() = default;
    virtual void apply(std::span<const double> r, std::span<double> z) const = 0;
    [[nodiscard]] virtual std::string name() const = 0;
};

class IdentityPreconditioner final : public Preconditioner {
public:
    void apply(std::span<const double> r, std::span<double> z) const override;
    [[nodiscard]] std::string name() const override { return "none"; }
};

/// Exact inverse of the block operator
///
///   [ W_t (x) Ms~        M_t (x) (Ks~ + Ms~) ]
///   [ M_t (x) Ks~       -M_t (x) Ms~         ]
///
/// where Ks~, Ms~ come from a SeparableSpatialModel.  The spatial pencil is
/// diagonalized by Kronecker products of 1D generalized eigenbases; each
/// spatial eigenmode then leaves a banded n_t x n_t system
/// (W_t + mu M_t) with mu = lambda (1 + lambda).  On the unit square the
/// model is exact and this is a direct solver.
class FastDiagonalizationPreconditioner final : public Preconditioner {
public:
    FastDiagonalizationPreconditioner(const SparseMatrix& time_derivative, const SparseMatrix& time_mass,
                                      const SeparableSpatialModel& model);

    void apply(std::span<const double> r, std::span<double> z) const override;
    [[nodiscard]] std::string name() const override { return "fdm"; }

    /// Eigenvalues of the scaled separable pencil (Ks~, Ms~), ordered like the spatial dofs.
    [[nodiscard]] const std::vector<double>& spatial_eigenvalues() const noexcept { return lambda_; }

private:
    // Spatial transforms on one n_x x n_y column: out = A in B (column-major).
    void transform(const double* in, double* out, const std::vector<double>& left,
                   const std::vector<double>& right) const;

    int nx_;
    int ny_;
    int nt_;
    int bandwidth_;
    std::vector<double> xx_, xx_t_;  // n_x x n_x eigenvectors and transpose
    std::vector<double> xy_, xy_t_;
    double inv_sqrt_mass_;
    std::vector<double> lambda_;
    std::vector<double> time_mass_inverse_;  // dense n_t x n_t
    // banded LU factors of W_t + mu_k M_t, one block of nt * (2 * bw + 1) per mode
    std::vector<double> lu_;
    mutable std::vector<double> work_a_, work_b_, work_c_, row_;
};

}  // namespace stiga
