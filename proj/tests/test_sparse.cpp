#include "stiga/error.hpp"
#include "stiga/sparse.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <memory>
#include <random>

using namespace stiga;

namespace {

Eigen::MatrixXd random_dense(int r, int c, std::uint64_t seed, double density = 0.6) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    std::bernoulli_distribution keep(density);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(r, c);
    for (int i = 0; i < r; ++i) {
        for (int j = 0; j < c; ++j) {
            if (keep(gen)) m(i, j) = val(gen);
        }
    }
    return m;
}

std::vector<double> random_vector(int n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = val(gen);
    return v;
}

}  // namespace

TEST(SparseMatrix, TripletsSumDuplicatesAndDropZeros) {
    const auto m = SparseMatrix::from_triplets(2, 3, {{0, 1, 1.0}, {1, 2, 2.0}, {0, 1, 0.5}, {1, 0, 1.0}, {1, 0, -1.0}});
    EXPECT_EQ(m.nnz(), 2u);
    EXPECT_EQ(m.at(0, 1), 1.5);
    EXPECT_EQ(m.at(1, 2), 2.0);
    EXPECT_EQ(m.at(1, 0), 0.0);
    EXPECT_EQ(m.max_row_nnz(), 1);
    EXPECT_FALSE(m.is_symmetric());
    EXPECT_THROW((void)SparseMatrix::from_triplets(2, 2, {{2, 0, 1.0}}), ArgumentError);
}

TEST(SparseMatrix, DenseRoundTripAndMultiply) {
    const Eigen::MatrixXd d = random_dense(7, 5, 3);
    const auto s = SparseMatrix::from_dense(d);
    EXPECT_EQ((s.to_dense() - d).norm(), 0.0);
    const auto x = random_vector(5, 4);
    const auto y = s.multiply(x);
    const Eigen::VectorXd ye = d * Eigen::Map<const Eigen::VectorXd>(x.data(), 5);
    for (int i = 0; i < 7; ++i) EXPECT_NEAR(y[static_cast<std::size_t>(i)], ye(i), 1e-15);
    EXPECT_EQ((s.transpose().to_dense() - d.transpose()).norm(), 0.0);
}

TEST(SparseMatrix, SymmetryDetection) {
    Eigen::MatrixXd d = random_dense(6, 6, 5);
    d = (d + d.transpose()).eval();
    EXPECT_TRUE(SparseMatrix::from_dense(d).is_symmetric());
    d(0, 1) += 1e-6;
    EXPECT_FALSE(SparseMatrix::from_dense(d).is_symmetric());
}

TEST(SparseMatrix, WriteCoordinate) {
    const auto m = SparseMatrix::from_triplets(2, 2, {{0, 0, 0.1}, {1, 0, -2.0}});
    const auto path = std::filesystem::temp_directory_path() / "stiga_test_coordinate.txt";
    m.write_coordinate(path);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "% 2 2 2");
    int i = 0, j = 0;
    double v = 0.0;
    in >> i >> j >> v;
    EXPECT_EQ(i, 0);
    EXPECT_EQ(j, 0);
    EXPECT_EQ(v, 0.1);
    in >> i >> j >> v;
    EXPECT_EQ(i, 1);
    EXPECT_EQ(v, -2.0);
    std::filesystem::remove(path);
}

TEST(Kronecker, ScalarFactors) {
    auto a = std::make_shared<const SparseMatrix>(SparseMatrix::from_dense(Eigen::MatrixXd::Constant(1, 1, 0.5)));
    auto b = std::make_shared<const SparseMatrix>(SparseMatrix::from_dense(Eigen::MatrixXd::Constant(1, 1, 3.0)));
    const KroneckerOperator k(a, b);
    std::vector<double> x{2.0}, y{0.0};
    k.apply(x, y);
    EXPECT_EQ(y[0], 3.0);
}

TEST(Kronecker, MatchesMaterializedProduct) {
    const Eigen::MatrixXd a = random_dense(3, 3, 7, 1.0);
    const Eigen::MatrixXd b = random_dense(4, 4, 8, 0.7);
    Eigen::MatrixXd kron(12, 12);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) kron.block(4 * i, 4 * j, 4, 4) = a(i, j) * b;
    }
    const KroneckerOperator op(std::make_shared<const SparseMatrix>(SparseMatrix::from_dense(a)),
                               std::make_shared<const SparseMatrix>(SparseMatrix::from_dense(b)), 1.0);
    EXPECT_LE((op.to_dense() - kron).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LE((op.materialize().to_dense() - kron).cwiseAbs().maxCoeff(), 1e-15);

    const auto x = random_vector(12, 9);
    std::vector<double> y(12);
    op.apply(x, y);
    const Eigen::VectorXd ye = kron * Eigen::Map<const Eigen::VectorXd>(x.data(), 12);
    EXPECT_LE((Eigen::Map<const Eigen::VectorXd>(y.data(), 12) - ye).norm(), 1e-13 * ye.norm());

    std::vector<double> z(12, 1.0);
    op.apply_add(-2.0, x, z);
    for (int i = 0; i < 12; ++i) EXPECT_NEAR(z[static_cast<std::size_t>(i)], 1.0 - 2.0 * ye(i), 1e-13);
}

TEST(Kronecker, SeparableVectors) {
    const Eigen::MatrixXd a = random_dense(3, 2, 10, 1.0);
    const Eigen::MatrixXd b = random_dense(5, 4, 11, 1.0);
    const KroneckerOperator op(std::make_shared<const SparseMatrix>(SparseMatrix::from_dense(a)),
                               std::make_shared<const SparseMatrix>(SparseMatrix::from_dense(b)), 2.5);
    EXPECT_EQ(op.rows(), 15);
    EXPECT_EQ(op.cols(), 8);
    const Eigen::VectorXd xt = Eigen::VectorXd::LinSpaced(2, 1.0, 2.0);
    const Eigen::VectorXd xs = Eigen::VectorXd::LinSpaced(4, -1.0, 0.5);
    std::vector<double> x(8);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 4; ++j) x[static_cast<std::size_t>(i * 4 + j)] = xt(i) * xs(j);
    }
    std::vector<double> y(15);
    op.apply(x, y);
    const Eigen::VectorXd at = a * xt;
    const Eigen::VectorXd bs = b * xs;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 5; ++j) EXPECT_NEAR(y[static_cast<std::size_t>(i * 5 + j)], 2.5 * at(i) * bs(j), 1e-14);
    }
}
