#include "stiga/assembly.hpp"
#include "stiga/error.hpp"
#include "stiga/quadrature.hpp"

#include <Eigen/Cholesky>
#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

using namespace stiga;

namespace {

double max_rel_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return (a - b).cwiseAbs().maxCoeff() / std::max(b.cwiseAbs().maxCoeff(), 1e-300);
}

SplineSpace1D space1d(int elements, int degree, Constraint c) {
    return SplineSpace1D(uniform_open_knots(elements, degree), c);
}

}  // namespace

TEST(TimeMatrices, OneLinearElement) {
    const auto tm = assemble_time_matrices(space1d(1, 1, Constraint::zero_at_left_end), 1.0);
    ASSERT_EQ(tm.derivative.rows(), 1);
    EXPECT_NEAR(tm.derivative.at(0, 0), 0.5, 1e-15);
    EXPECT_NEAR(tm.mass.at(0, 0), 1.0 / 3.0, 1e-15);

    const auto t2 = assemble_time_matrices(space1d(1, 1, Constraint::zero_at_left_end), 2.0);
    EXPECT_NEAR(t2.derivative.at(0, 0), 0.5, 1e-15);
    EXPECT_NEAR(t2.mass.at(0, 0), 2.0 / 3.0, 1e-15);
}

TEST(TimeMatrices, MassIsSpdAndDerivativeIsHalfFinalValueSquared) {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int p : {1, 2, 3}) {
        for (int n : {1, 3, 8}) {
            const auto space = space1d(n, p, Constraint::zero_at_left_end);
            const auto tm = assemble_time_matrices(space, 1.7);
            const Eigen::MatrixXd mt = tm.mass.to_dense();
            EXPECT_TRUE(tm.mass.is_symmetric());
            EXPECT_EQ(Eigen::LLT<Eigen::MatrixXd>(mt).info(), Eigen::Success);
            Eigen::VectorXd x(space.dof_count());
            for (auto& v : x) v = dist(gen);
            // u_h(T) is the coefficient of the last (interpolatory) function
            const double uT = x(x.size() - 1);
            EXPECT_NEAR(x.dot(tm.derivative.to_dense() * x), 0.5 * uT * uT, 1e-13);
        }
    }
}

TEST(SpatialMatrices, BilinearHat) {
    const auto s = space1d(2, 1, Constraint::zero_at_both_ends);
    const auto sm = assemble_spatial_matrices(s, s, GeometryMap::unit_square());
    ASSERT_EQ(sm.stiffness.rows(), 1);
    EXPECT_NEAR(sm.stiffness.at(0, 0), 8.0 / 3.0, 1e-14);
    EXPECT_NEAR(sm.mass.at(0, 0), 1.0 / 9.0, 1e-15);
}

TEST(SpatialMatrices, SymmetricOnBothGeometries) {
    const auto s = space1d(4, 2, Constraint::zero_at_both_ends);
    for (const auto& g : {GeometryMap::unit_square(), GeometryMap::quarter_annulus(1.0, 2.0)}) {
        const auto sm = assemble_spatial_matrices(s, s, g);
        EXPECT_TRUE(sm.stiffness.is_symmetric()) << g.name();
        EXPECT_TRUE(sm.mass.is_symmetric()) << g.name();
        EXPECT_EQ(Eigen::LLT<Eigen::MatrixXd>(sm.stiffness.to_dense()).info(), Eigen::Success);
    }
}

TEST(SpatialMatrices, AnnulusMassRowSumsGiveArea) {
    const auto s = space1d(5, 2, Constraint::none);
    const auto sm = assemble_spatial_matrices(s, s, GeometryMap::quarter_annulus(1.0, 2.0), 4);
    const double total = sm.mass.to_dense().sum();
    EXPECT_NEAR(total, 3.0 * std::numbers::pi / 4.0, 1e-10);
    // constants lie in the kernel of the unconstrained stiffness matrix
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(sm.stiffness.rows());
    EXPECT_LE((sm.stiffness.to_dense() * ones).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SpatialMatrices, Sparsity) {
    for (int p : {1, 2, 3}) {
        const auto s = space1d(8, p, Constraint::zero_at_both_ends);
        const auto sm = assemble_spatial_matrices(s, s, GeometryMap::quarter_annulus(1.0, 2.0));
        EXPECT_LE(sm.stiffness.max_row_nnz(), (2 * p + 1) * (2 * p + 1));
        EXPECT_LE(sm.mass.max_row_nnz(), (2 * p + 1) * (2 * p + 1));
    }
}

TEST(ComposeSystem, ScalarFactorsAndMismatch) {
    const auto one = [](double v) { return SparseMatrix::from_dense(Eigen::MatrixXd::Constant(1, 1, v)); };
    const auto ops = compose_system(one(0.5), one(2.0), one(3.0), one(5.0));
    EXPECT_EQ(ops.size(), 1);
    EXPECT_EQ(ops.W.to_dense()(0, 0), 2.5);
    EXPECT_EQ(ops.K.to_dense()(0, 0), 6.0);
    EXPECT_EQ(ops.M.to_dense()(0, 0), 10.0);
    EXPECT_THROW((void)compose_system(one(1), SparseMatrix::from_dense(Eigen::MatrixXd::Identity(2, 2)), one(1),
                                      one(1)),
                 ArgumentError);
}

TEST(ComposeSystem, MatchesDenseSpaceTimeOracle) {
    struct Case {
        int elements;
        int degree;
        GeometryMap geometry;
    };
    for (const auto& c : {Case{2, 1, GeometryMap::unit_square()}, Case{3, 2, GeometryMap::unit_square()},
                          Case{3, 1, GeometryMap::quarter_annulus(1.0, 2.0)},
                          Case{3, 2, GeometryMap::quarter_annulus(1.0, 2.0)}}) {
        const auto space = SpaceTimeSpace::uniform(c.elements, c.degree, c.geometry, 1.0);
        const auto f = [](double x, double y, double t) { return std::exp(t) * std::sin(3 * x) * (1 + y * y); };
        const auto sys = assemble_system(space, f);
        const auto dense = assemble_dense_spacetime_oracle(space, f);
        EXPECT_LE(max_rel_diff(sys.operators.W.to_dense(), dense.W), 1e-12);
        EXPECT_LE(max_rel_diff(sys.operators.K.to_dense(), dense.K), 1e-12);
        EXPECT_LE(max_rel_diff(sys.operators.M.to_dense(), dense.M), 1e-12);
        const Eigen::Map<const Eigen::VectorXd> load(sys.load.data(), static_cast<Eigen::Index>(sys.load.size()));
        EXPECT_LE((load - dense.load).cwiseAbs().maxCoeff(), 1e-12 * dense.load.cwiseAbs().maxCoeff());
        EXPECT_LE(max_rel_diff(dense.K, dense.K.transpose()), 1e-12);
    }
}

TEST(DenseOracle, GuardAndZeroLoad) {
    const auto big = SpaceTimeSpace::uniform(8, 2, GeometryMap::unit_square(), 1.0);
    EXPECT_THROW((void)assemble_dense_spacetime_oracle(big), GuardError);
    const auto small = SpaceTimeSpace::uniform(2, 1, GeometryMap::unit_square(), 1.0);
    EXPECT_EQ(assemble_dense_spacetime_oracle(small).load.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Load, ZeroAndConstantForcing) {
    const auto space = SpaceTimeSpace::uniform(3, 2, GeometryMap::unit_square(), 2.0);
    const auto zero = assemble_load([](double, double, double) { return 0.0; }, space);
    for (double v : zero) EXPECT_EQ(v, 0.0);

    const SpaceTimeSpace free(space1d(3, 2, Constraint::none), space1d(3, 2, Constraint::none),
                              space1d(3, 2, Constraint::none), GeometryMap::unit_square(), 2.0);
    const auto ones = assemble_load([](double, double, double) { return 1.0; }, free);
    double sum = 0.0;
    for (double v : ones) sum += v;
    EXPECT_NEAR(sum, 2.0, 1e-12);
}

TEST(Load, SeparableForcingMatchesOneDimensionalMoments) {
    const int p = 2;
    const auto space = SpaceTimeSpace::uniform(4, p, GeometryMap::unit_square(), 1.5);
    const auto g = [](double x) { return x * x * (1 - x) + 0.3; };
    const auto h = [](double y) { return std::cos(y); };
    const auto q = [](double t) { return 1.0 + t * t * t; };
    const auto load = assemble_load([&](double x, double y, double t) { return g(x) * h(y) * q(t); }, space, 6);

    const auto moments = [](const SplineSpace1D& s, double scale, const std::function<double(double)>& fn) {
        std::vector<double> m(static_cast<std::size_t>(s.dof_count()), 0.0);
        const auto rule = per_span_rule(s.knots(), 6);
        for (std::size_t k = 0; k < rule.size(); ++k) {
            const auto d = eval_basis_derivs(s.knots(), rule.nodes[k], 0);
            for (int a = 0; a < d.width(); ++a) {
                const int dof = s.dof_of_function(d.first() + a);
                if (dof >= 0) m[static_cast<std::size_t>(dof)] += scale * rule.weights[k] * d(0, a) * fn(scale * rule.nodes[k]);
            }
        }
        return m;
    };
    const auto mx = moments(space.x(), 1.0, g);
    const auto my = moments(space.y(), 1.0, h);
    const auto mt = moments(space.t(), 1.5, q);
    double worst = 0.0, scale = 0.0;
    for (int it = 0; it < space.n_t(); ++it) {
        for (int iy = 0; iy < space.n_y(); ++iy) {
            for (int ix = 0; ix < space.n_x(); ++ix) {
                const double expect = mt[it] * my[iy] * mx[ix];
                const double got = load[static_cast<std::size_t>(it * space.n_s() + ix + space.n_x() * iy)];
                worst = std::max(worst, std::abs(expect - got));
                scale = std::max(scale, std::abs(expect));
            }
        }
    }
    EXPECT_LE(worst, 1e-13 * scale);
}

TEST(Load, NonFiniteForcingThrowsWithLocation) {
    const auto space = SpaceTimeSpace::uniform(2, 1, GeometryMap::unit_square(), 1.0);
    try {
        (void)assemble_load([](double x, double, double) { return x > 0.5 ? std::numeric_limits<double>::quiet_NaN() : 0.0; },
                            space);
        FAIL() << "expected AssemblyError";
    } catch (const AssemblyError& e) {
        EXPECT_NE(std::string(e.what()).find("(x, y, t)"), std::string::npos);
    }
}

TEST(SystemSparsity, KroneckerFactorsBounded) {
    const int p = 2;
    const auto space = SpaceTimeSpace::uniform(6, p, GeometryMap::unit_square(), 1.0);
    const auto sys = assemble_system(space, {});
    const int band = 2 * p + 1;
    EXPECT_LE(sys.operators.W.materialize().max_row_nnz(), band * band * band);
    EXPECT_LE(sys.time.mass.max_row_nnz(), band);
    EXPECT_EQ(sys.load.size(), static_cast<std::size_t>(space.dof_count()));
}

TEST(SeparableModel, ExactOnUnitSquare) {
    const auto space = SpaceTimeSpace::uniform(5, 2, GeometryMap::unit_square(), 1.0);
    const auto model = separable_spatial_model(space);
    EXPECT_NEAR(model.grad_x_weight, 1.0, 1e-14);
    EXPECT_NEAR(model.grad_y_weight, 1.0, 1e-14);
    EXPECT_NEAR(model.mass_weight, 1.0, 1e-14);
    const auto sm = assemble_spatial_matrices(space.x(), space.y(), space.geometry());
    const Eigen::MatrixXd kx = model.x.stiffness.to_dense(), mx = model.x.mass.to_dense();
    const Eigen::MatrixXd ky = model.y.stiffness.to_dense(), my = model.y.mass.to_dense();
    const auto kron = [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
        Eigen::MatrixXd k(a.rows() * b.rows(), a.cols() * b.cols());
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            for (Eigen::Index j = 0; j < a.cols(); ++j) k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
        return k;
    };
    EXPECT_LE(max_rel_diff(kron(my, kx) + kron(ky, mx), sm.stiffness.to_dense()), 1e-13);
    EXPECT_LE(max_rel_diff(kron(my, mx), sm.mass.to_dense()), 1e-13);
}

TEST(SeparableModel, AnnulusWeights) {
    const auto space = SpaceTimeSpace::uniform(4, 1, GeometryMap::quarter_annulus(1.0, 2.0), 1.0);
    const auto model = separable_spatial_model(space);
    // averages over the parameter square of r (pi/2), (2/pi) r and r^-1 (2/pi)... with dr = 1:
    // det J = (pi/2) r, (J^-1 J^-T)_11 det J = (pi/2) r, (J^-1 J^-T)_22 det J = (2/pi) / r
    EXPECT_NEAR(model.mass_weight, std::numbers::pi / 2 * 1.5, 1e-12);
    EXPECT_NEAR(model.grad_x_weight, std::numbers::pi / 2 * 1.5, 1e-12);
    EXPECT_NEAR(model.grad_y_weight, 2.0 / std::numbers::pi * std::log(2.0), 1e-12);
}
