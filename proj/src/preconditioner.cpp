#include "stiga/preconditioner.hpp"

#include "stiga/error.hpp"
#include "stiga/simd/kernels.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace stiga {
namespace {

struct Eigenbasis {
    std::vector<double> vectors;    // column-major, V^T M V = I
    std::vector<double> transpose;  // V^T, column-major
    std::vector<double> values;
};

Eigenbasis generalized_eigenbasis(const SparseMatrix& stiffness, const SparseMatrix& mass) {
    const Eigen::MatrixXd k = stiffness.to_dense();
    const Eigen::MatrixXd m = mass.to_dense();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(k, m);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("generalized eigendecomposition of the 1D spatial pencil failed");
    }
    const Eigen::MatrixXd& v = solver.eigenvectors();
    const Eigen::MatrixXd vt = v.transpose();
    Eigenbasis out;
    out.vectors.assign(v.data(), v.data() + v.size());
    out.transpose.assign(vt.data(), vt.data() + vt.size());
    out.values.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + solver.eigenvalues().size());
    return out;
}

int bandwidth_of(const SparseMatrix& a) {
    int bw = 0;
    for (int i = 0; i < a.rows(); ++i) {
        for (int k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k) bw = std::max(bw, std::abs(a.col_index()[k] - i));
    }
    return bw;
}

}  // namespace

void IdentityPreconditioner::apply(std::span<const double> r, std::span<double> z) const {
    std::copy(r.begin(), r.end(), z.begin());
}

FastDiagonalizationPreconditioner::FastDiagonalizationPreconditioner(const SparseMatrix& time_derivative,
                                                                     const SparseMatrix& time_mass,
                                                                     const SeparableSpatialModel& model)
    : nx_(model.x.mass.rows()),
      ny_(model.y.mass.rows()),
      nt_(time_mass.rows()),
      bandwidth_(std::max(bandwidth_of(time_derivative), bandwidth_of(time_mass))) {
    if (!(model.mass_weight > 0.0 && model.grad_x_weight > 0.0 && model.grad_y_weight > 0.0)) {
        throw ArgumentError("separable spatial model needs positive weights");
    }
    const auto ex = generalized_eigenbasis(model.x.stiffness, model.x.mass);
    const auto ey = generalized_eigenbasis(model.y.stiffness, model.y.mass);
    xx_ = ex.vectors;
    xx_t_ = ex.transpose;
    xy_ = ey.vectors;
    xy_t_ = ey.transpose;
    inv_sqrt_mass_ = 1.0 / std::sqrt(model.mass_weight);

    const auto ns = static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_);
    lambda_.resize(ns);
    for (int j = 0; j < ny_; ++j) {
        for (int i = 0; i < nx_; ++i) {
            lambda_[static_cast<std::size_t>(i + nx_ * j)] =
                (model.grad_x_weight * ex.values[static_cast<std::size_t>(i)] +
                 model.grad_y_weight * ey.values[static_cast<std::size_t>(j)]) /
                model.mass_weight;
        }
    }

    const Eigen::MatrixXd mt = time_mass.to_dense();
    const Eigen::LLT<Eigen::MatrixXd> llt(mt);
    if (llt.info() != Eigen::Success) throw NumericalError("time mass matrix is not positive definite");
    const Eigen::MatrixXd minv = llt.solve(Eigen::MatrixXd::Identity(nt_, nt_));
    time_mass_inverse_.assign(minv.data(), minv.data() + minv.size());

    // banded LU of W_t + mu M_t, no pivoting
    const int bw = bandwidth_;
    const int width = 2 * bw + 1;
    const auto block = static_cast<std::size_t>(nt_) * static_cast<std::size_t>(width);
    lu_.assign(ns * block, 0.0);
    const Eigen::MatrixXd wt = time_derivative.to_dense();
    for (std::size_t k = 0; k < ns; ++k) {
        const double mu = lambda_[k] * (1.0 + lambda_[k]);
        double* a = lu_.data() + k * block;
        auto at = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i * width + (j - i + bw))]; };
        for (int i = 0; i < nt_; ++i) {
            for (int j = std::max(0, i - bw); j <= std::min(nt_ - 1, i + bw); ++j) at(i, j) = wt(i, j) + mu * mt(i, j);
        }
        for (int c = 0; c < nt_; ++c) {
            const double pivot = at(c, c);
            if (!(std::abs(pivot) > 0.0)) throw NumericalError("zero pivot in banded time solve");
            for (int i = c + 1; i <= std::min(nt_ - 1, c + bw); ++i) {
                const double l = at(i, c) / pivot;
                at(i, c) = l;
                for (int j = c + 1; j <= std::min(nt_ - 1, c + bw); ++j) at(i, j) -= l * at(c, j);
            }
        }
    }
    work_a_.resize(ns * static_cast<std::size_t>(nt_));
    work_b_.resize(ns * static_cast<std::size_t>(nt_));
    work_c_.resize(ns * static_cast<std::size_t>(nt_));
    row_.resize(std::max(ns, static_cast<std::size_t>(nt_)));
}

void FastDiagonalizationPreconditioner::transform(const double* in, double* out, const std::vector<double>& left,
                                                  const std::vector<double>& right) const {
    const auto& k = simd::kernels();
    const auto nx = static_cast<std::size_t>(nx_);
    const auto ny = static_cast<std::size_t>(ny_);
    k.gemm(nx, ny, nx, left.data(), nx, in, nx, row_.data(), nx);
    k.gemm(nx, ny, ny, row_.data(), nx, right.data(), ny, out, nx);
    for (std::size_t i = 0; i < nx * ny; ++i) out[i] *= inv_sqrt_mass_;
}

void FastDiagonalizationPreconditioner::apply(std::span<const double> r, std::span<double> z) const {
    const auto ns = static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_);
    const auto nt = static_cast<std::size_t>(nt_);
    const std::size_t n = ns * nt;
    if (r.size() != 2 * n || z.size() != 2 * n) throw ArgumentError("preconditioner dimension mismatch");

    double* rhat = work_a_.data();
    double* ghat = work_b_.data();
    double* uhat = work_c_.data();
    for (std::size_t j = 0; j < nt; ++j) {
        transform(r.data() + j * ns, rhat + j * ns, xx_t_, xy_);
        transform(r.data() + n + j * ns, ghat + j * ns, xx_t_, xy_);
    }
    for (std::size_t j = 0; j < nt; ++j) {
        for (std::size_t k = 0; k < ns; ++k) rhat[j * ns + k] += (lambda_[k] + 1.0) * ghat[j * ns + k];
    }

    const int bw = bandwidth_;
    const int width = 2 * bw + 1;
    const auto block = nt * static_cast<std::size_t>(width);
    std::vector<double>& x = row_;
    for (std::size_t k = 0; k < ns; ++k) {
        const double* a = lu_.data() + k * block;
        auto at = [&](int i, int j) { return a[static_cast<std::size_t>(i * width + (j - i + bw))]; };
        for (int i = 0; i < nt_; ++i) {
            double s = rhat[static_cast<std::size_t>(i) * ns + k];
            for (int j = std::max(0, i - bw); j < i; ++j) s -= at(i, j) * x[static_cast<std::size_t>(j)];
            x[static_cast<std::size_t>(i)] = s;
        }
        for (int i = nt_ - 1; i >= 0; --i) {
            double s = x[static_cast<std::size_t>(i)];
            for (int j = i + 1; j <= std::min(nt_ - 1, i + bw); ++j) s -= at(i, j) * x[static_cast<std::size_t>(j)];
            x[static_cast<std::size_t>(i)] = s / at(i, i);
        }
        for (std::size_t i = 0; i < nt; ++i) uhat[i * ns + k] = x[i];
    }

    // vhat = Lambda uhat - ghat M_t^{-1}
    simd::kernels().gemm(ns, nt, nt, ghat, ns, time_mass_inverse_.data(), nt, rhat, ns);
    for (std::size_t j = 0; j < nt; ++j) {
        for (std::size_t k = 0; k < ns; ++k) rhat[j * ns + k] = lambda_[k] * uhat[j * ns + k] - rhat[j * ns + k];
    }
    for (std::size_t j = 0; j < nt; ++j) {
        transform(uhat + j * ns, z.data() + j * ns, xx_, xy_t_);
        transform(rhat + j * ns, z.data() + n + j * ns, xx_, xy_t_);
    }
}

}  // namespace stiga
