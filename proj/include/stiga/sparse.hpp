#pragma once

// Compressed sparse row matrices and lazy Kronecker products.

#include <Eigen/Dense>

#include <filesystem>
#include <memory>
#include <span>
#include <vector>

namespace stiga {

struct Triplet {
    int row;
    int col;
    double value;
};

/// Row-compressed sparse matrix with 32-bit indices.
class SparseMatrix {
public:
    SparseMatrix() = default;

    /// Duplicate entries are summed; entries summing to exactly 0.0 are dropped.
    static SparseMatrix from_triplets(int rows, int cols, std::vector<Triplet> triplets);
    static SparseMatrix from_dense(const Eigen::MatrixXd& dense);

    [[nodiscard]] int rows() const noexcept { return rows_; }
    [[nodiscard]] int cols() const noexcept { return cols_; }
    [[nodiscard]] std::size_t nnz() const noexcept { return values_.size(); }
    [[nodiscard]] int max_row_nnz() const noexcept;
    /// ||A - A^T||_max <= 1e-12 ||A||_max (computed at construction).
    [[nodiscard]] bool is_symmetric() const noexcept { return symmetric_; }

    [[nodiscard]] std::span<const int> row_ptr() const noexcept { return row_ptr_; }
    [[nodiscard]] std::span<const int> col_index() const noexcept { return col_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

    /// Stored value or 0.
    [[nodiscard]] double at(int i, int j) const noexcept;

    /// y = A x
    void multiply(std::span<const double> x, std::span<double> y) const;
    [[nodiscard]] std::vector<double> multiply(std::span<const double> x) const;

    [[nodiscard]] SparseMatrix transpose() const;
    [[nodiscard]] Eigen::MatrixXd to_dense() const;

    /// Plain-text "row col value" lines (0-based, full precision), preceded by
    /// a "% rows cols nnz" header.
    void write_coordinate(const std::filesystem::path& path) const;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<int> row_ptr_{0};
    std::vector<int> col_;
    std::vector<double> values_;
    bool symmetric_ = false;

    void detect_symmetry();
};

/// scale * (left (x) right), applied without materializing the product.
/// Vector layout: index = i_left * right.rows() + i_right (right factor fastest).
class KroneckerOperator {
public:
    KroneckerOperator(std::shared_ptr<const SparseMatrix> left, std::shared_ptr<const SparseMatrix> right,
                      double scale = 1.0);

    [[nodiscard]] const SparseMatrix& left() const noexcept { return *left_; }
    [[nodiscard]] const SparseMatrix& right() const noexcept { return *right_; }
    [[nodiscard]] double scale() const noexcept { return scale_; }
    [[nodiscard]] int rows() const noexcept { return left_->rows() * right_->rows(); }
    [[nodiscard]] int cols() const noexcept { return left_->cols() * right_->cols(); }

    /// y = op x
    void apply(std::span<const double> x, std::span<double> y) const;
    /// y += alpha * op x
    void apply_add(double alpha, std::span<const double> x, std::span<double> y) const;

    [[nodiscard]] SparseMatrix materialize() const;
    [[nodiscard]] Eigen::MatrixXd to_dense() const;

private:
    std::shared_ptr<const SparseMatrix> left_;
    std::shared_ptr<const SparseMatrix> right_;
    double scale_;
    mutable std::vector<double> work_;
};

}  // namespace stiga
