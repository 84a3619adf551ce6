#include "stiga/sparse.hpp"

#include "stiga/error.hpp"
#include "stiga/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace stiga {

SparseMatrix SparseMatrix::from_triplets(int rows, int cols, std::vector<Triplet> triplets) {
    if (rows < 0 || cols < 0) throw ArgumentError("negative matrix dimension");
    for (const auto& t : triplets) {
        if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
            throw ArgumentError("triplet index out of range");
        }
    }
    // duplicates are summed in insertion order
    std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    SparseMatrix a;
    a.rows_ = rows;
    a.cols_ = cols;
    a.row_ptr_.assign(static_cast<std::size_t>(rows) + 1, 0);
    std::size_t k = 0;
    while (k < triplets.size()) {
        const int r = triplets[k].row;
        const int c = triplets[k].col;
        double sum = 0.0;
        while (k < triplets.size() && triplets[k].row == r && triplets[k].col == c) sum += triplets[k++].value;
        if (sum != 0.0) {
            a.col_.push_back(c);
            a.values_.push_back(sum);
            ++a.row_ptr_[static_cast<std::size_t>(r) + 1];
        }
    }
    for (std::size_t r = 0; r < static_cast<std::size_t>(rows); ++r) a.row_ptr_[r + 1] += a.row_ptr_[r];
    a.detect_symmetry();
    return a;
}

SparseMatrix SparseMatrix::from_dense(const Eigen::MatrixXd& dense) {
    std::vector<Triplet> t;
    for (Eigen::Index i = 0; i < dense.rows(); ++i) {
        for (Eigen::Index j = 0; j < dense.cols(); ++j) {
            if (dense(i, j) != 0.0) t.push_back({static_cast<int>(i), static_cast<int>(j), dense(i, j)});
        }
    }
    return from_triplets(static_cast<int>(dense.rows()), static_cast<int>(dense.cols()), std::move(t));
}

void SparseMatrix::detect_symmetry() {
    symmetric_ = false;
    if (rows_ != cols_) return;
    double amax = 0.0;
    for (const double v : values_) amax = std::max(amax, std::abs(v));
    double diff = 0.0;
    for (int i = 0; i < rows_; ++i) {
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
            diff = std::max(diff, std::abs(values_[k] - at(col_[k], i)));
        }
    }
    symmetric_ = diff <= 1e-12 * amax;
}

int SparseMatrix::max_row_nnz() const noexcept {
    int m = 0;
    for (int i = 0; i < rows_; ++i) m = std::max(m, row_ptr_[i + 1] - row_ptr_[i]);
    return m;
}

double SparseMatrix::at(int i, int j) const noexcept {
    const auto first = col_.begin() + row_ptr_[i];
    const auto last = col_.begin() + row_ptr_[i + 1];
    const auto it = std::lower_bound(first, last, j);
    return (it != last && *it == j) ? values_[static_cast<std::size_t>(it - col_.begin())] : 0.0;
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    if (x.size() != static_cast<std::size_t>(cols_) || y.size() != static_cast<std::size_t>(rows_)) {
        throw ArgumentError("sparse matvec dimension mismatch");
    }
    simd::kernels().csr_spmv(static_cast<std::size_t>(rows_), row_ptr_.data(), col_.data(), values_.data(),
                             x.data(), y.data());
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const {
    std::vector<double> y(static_cast<std::size_t>(rows_));
    multiply(x, y);
    return y;
}

SparseMatrix SparseMatrix::transpose() const {
    std::vector<Triplet> t;
    t.reserve(nnz());
    for (int i = 0; i < rows_; ++i) {
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) t.push_back({col_[k], i, values_[k]});
    }
    return from_triplets(cols_, rows_, std::move(t));
}

Eigen::MatrixXd SparseMatrix::to_dense() const {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(rows_, cols_);
    for (int i = 0; i < rows_; ++i) {
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) d(i, col_[k]) = values_[k];
    }
    return d;
}

void SparseMatrix::write_coordinate(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << "% " << rows_ << ' ' << cols_ << ' ' << nnz() << '\n';
    char buf[64];
    for (int i = 0; i < rows_; ++i) {
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
            std::snprintf(buf, sizeof buf, "%.17e", values_[k]);
            out << i << ' ' << col_[k] << ' ' << buf << '\n';
        }
    }
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

KroneckerOperator::KroneckerOperator(std::shared_ptr<const SparseMatrix> left,
                                     std::shared_ptr<const SparseMatrix> right, double scale)
    : left_(std::move(left)), right_(std::move(right)), scale_(scale) {
    if (!left_ || !right_) throw ArgumentError("Kronecker factor is null");
}

void KroneckerOperator::apply(std::span<const double> x, std::span<double> y) const {
    std::fill(y.begin(), y.end(), 0.0);
    apply_add(1.0, x, y);
}

void KroneckerOperator::apply_add(double alpha, std::span<const double> x, std::span<double> y) const {
    if (x.size() != static_cast<std::size_t>(cols()) || y.size() != static_cast<std::size_t>(rows())) {
        throw ArgumentError("Kronecker matvec dimension mismatch");
    }
    const auto& k = simd::kernels();
    const auto ns_out = static_cast<std::size_t>(right_->rows());
    const auto ns_in = static_cast<std::size_t>(right_->cols());
    const auto nt_in = static_cast<std::size_t>(left_->cols());
    const auto nt_out = static_cast<std::size_t>(left_->rows());
    // Z = R X, one spatial matvec per time column
    work_.resize(ns_out * nt_in);
    for (std::size_t j = 0; j < nt_in; ++j) {
        k.csr_spmv(ns_out, right_->row_ptr().data(), right_->col_index().data(), right_->values().data(),
                   x.data() + j * ns_in, work_.data() + j * ns_out);
    }
    // Y(:, i) += alpha * scale * sum_j L(i, j) Z(:, j)
    const auto rp = left_->row_ptr();
    const auto ci = left_->col_index();
    const auto lv = left_->values();
    for (std::size_t i = 0; i < nt_out; ++i) {
        for (int q = rp[i]; q < rp[i + 1]; ++q) {
            k.axpy(alpha * scale_ * lv[static_cast<std::size_t>(q)],
                   work_.data() + static_cast<std::size_t>(ci[static_cast<std::size_t>(q)]) * ns_out,
                   y.data() + i * ns_out, ns_out);
        }
    }
}

SparseMatrix KroneckerOperator::materialize() const {
    std::vector<Triplet> t;
    t.reserve(left_->nnz() * right_->nnz());
    const int nr = right_->rows();
    const int nc = right_->cols();
    for (int i = 0; i < left_->rows(); ++i) {
        for (int a = left_->row_ptr()[i]; a < left_->row_ptr()[i + 1]; ++a) {
            const int j = left_->col_index()[a];
            const double lij = scale_ * left_->values()[a];
            for (int r = 0; r < nr; ++r) {
                for (int b = right_->row_ptr()[r]; b < right_->row_ptr()[r + 1]; ++b) {
                    t.push_back({i * nr + r, j * nc + right_->col_index()[b], lij * right_->values()[b]});
                }
            }
        }
    }
    return SparseMatrix::from_triplets(rows(), cols(), std::move(t));
}

Eigen::MatrixXd KroneckerOperator::to_dense() const {
    const Eigen::MatrixXd l = left_->to_dense();
    const Eigen::MatrixXd r = right_->to_dense();
    Eigen::MatrixXd d(rows(), cols());
    for (Eigen::Index i = 0; i < l.rows(); ++i) {
        for (Eigen::Index j = 0; j < l.cols(); ++j) {
            d.block(i * r.rows(), j * r.cols(), r.rows(), r.cols()) = scale_ * l(i, j) * r;
        }
    }
    return d;
}

}  // namespace stiga
