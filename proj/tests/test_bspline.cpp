#include "stiga/bspline.hpp"
#include "stiga/error.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

using namespace stiga;

TEST(KnotVector, UniformOpenKnots) {
    const auto k21 = uniform_open_knots(2, 1);
    EXPECT_EQ(std::vector<double>(k21.knots().begin(), k21.knots().end()), (std::vector<double>{0, 0, 0.5, 1, 1}));
    const auto k42 = uniform_open_knots(4, 2);
    EXPECT_EQ(std::vector<double>(k42.knots().begin(), k42.knots().end()),
              (std::vector<double>{0, 0, 0, 0.25, 0.5, 0.75, 1, 1, 1}));
    const auto k13 = uniform_open_knots(1, 3);
    EXPECT_EQ(std::vector<double>(k13.knots().begin(), k13.knots().end()),
              (std::vector<double>{0, 0, 0, 0, 1, 1, 1, 1}));
    EXPECT_EQ(k42.size(), 6);
    EXPECT_DOUBLE_EQ(k42.mesh_size(), 0.25);
    EXPECT_DOUBLE_EQ(k42.beta(), 1.0);
    EXPECT_THROW(uniform_open_knots(0, 1), ArgumentError);
}

TEST(KnotVector, RejectsInvalid) {
    EXPECT_THROW(KnotVector({0, 0.5, 1, 1}, 1), ArgumentError);         // not open at 0
    EXPECT_THROW(KnotVector({0, 0, 0.7, 0.5, 1, 1}, 1), ArgumentError);  // decreasing
    EXPECT_THROW(KnotVector({0, 0, 1, 1}, 0), ArgumentError);
}

TEST(KnotVector, QuasiUniformity) {
    const KnotVector kv({0, 0, 0.1, 0.5, 1, 1}, 1);
    EXPECT_DOUBLE_EQ(kv.mesh_size(), 0.5);
    EXPECT_DOUBLE_EQ(kv.beta(), 0.2);
    EXPECT_EQ(kv.nonempty_spans(), (std::vector<int>{1, 2, 3}));
}

TEST(FindSpan, Examples) {
    EXPECT_EQ(find_span(KnotVector({0, 0, 1, 1}, 1), 0.3), 1);
    const KnotVector kv({0, 0, 0, 0.5, 1, 1, 1}, 2);
    EXPECT_EQ(find_span(kv, 0.75), 3);
    EXPECT_EQ(find_span(kv, 0.5), 3);
    EXPECT_EQ(find_span(kv, 0.0), 2);
    EXPECT_EQ(find_span(kv, 1.0), 3);
    EXPECT_THROW((void)find_span(kv, 1.5), DomainError);
    EXPECT_THROW((void)find_span(kv, -1e-3), DomainError);
}

TEST(EvalBasis, Examples) {
    const auto hat = eval_basis(KnotVector({0, 0, 1, 1}, 1), 0.5);
    EXPECT_DOUBLE_EQ(hat[0], 0.5);
    EXPECT_DOUBLE_EQ(hat[1], 0.5);

    const auto bern = eval_basis(KnotVector({0, 0, 0, 1, 1, 1}, 2), 0.5);
    EXPECT_DOUBLE_EQ(bern[0], 0.25);
    EXPECT_DOUBLE_EQ(bern[1], 0.5);
    EXPECT_DOUBLE_EQ(bern[2], 0.25);

    // scipy.interpolate.BSpline with unit coefficients
    const auto n = eval_basis(KnotVector({0, 0, 0, 0.5, 1, 1, 1}, 2), 0.25);
    ASSERT_EQ(n.size(), 3u);
    EXPECT_NEAR(n[0], 0.25, 1e-15);
    EXPECT_NEAR(n[1], 0.625, 1e-15);
    EXPECT_NEAR(n[2], 0.125, 1e-15);
}

TEST(EvalBasis, BernsteinExact) {
    for (int p = 1; p <= 6; ++p) {
        const auto kv = uniform_open_knots(1, p);
        for (double t : {0.0, 0.1, 0.37, 0.5, 0.9, 1.0}) {
            const auto b = eval_basis(kv, t);
            for (int j = 0; j <= p; ++j) {
                double binom = 1.0;
                for (int i = 1; i <= j; ++i) binom = binom * (p - j + i) / i;
                const double expect = binom * std::pow(t, j) * std::pow(1.0 - t, p - j);
                EXPECT_NEAR(b[j], expect, 1e-14) << "p=" << p << " j=" << j << " t=" << t;
            }
        }
    }
}

TEST(EvalBasis, EndpointsInterpolate) {
    const auto kv = uniform_open_knots(5, 3);
    const auto d0 = eval_basis_derivs(kv, 0.0, 0);
    EXPECT_EQ(d0.first(), 0);
    EXPECT_DOUBLE_EQ(d0(0, 0), 1.0);
    const auto d1 = eval_basis_derivs(kv, 1.0, 0);
    EXPECT_EQ(d1.first() + d1.width() - 1, kv.size() - 1);
    EXPECT_DOUBLE_EQ(d1(0, d1.width() - 1), 1.0);
}

class BasisProperties : public ::testing::TestWithParam<std::tuple<int, int>> {};

TEST_P(BasisProperties, PartitionNonnegativitySupport) {
    const auto [elements, p] = GetParam();
    const auto kv = uniform_open_knots(elements, p);
    for (int s = 0; s <= 200; ++s) {
        const double t = s / 200.0;
        const int span = find_span(kv, t);
        const auto d = eval_basis_derivs(kv, span, t, 1);
        EXPECT_EQ(d.first(), span - p);
        double sum = 0.0;
        double dsum = 0.0;
        for (int j = 0; j < d.width(); ++j) {
            EXPECT_GE(d(0, j), 0.0);
            sum += d(0, j);
            dsum += d(1, j);
            // local support: function first+j lives on [knots[first+j], knots[first+j+p+1]]
            const int g = d.first() + j;
            EXPECT_LE(kv[static_cast<std::size_t>(g)], t);
            EXPECT_GE(kv[static_cast<std::size_t>(g + p + 1)], t);
        }
        EXPECT_NEAR(sum, 1.0, 1e-13);
        EXPECT_NEAR(dsum, 0.0, 1e-10 * elements * p);
    }
}

TEST_P(BasisProperties, DerivativesMatchFiniteDifferences) {
    const auto [elements, p] = GetParam();
    const auto kv = uniform_open_knots(elements, p);
    const double step = 1e-6;
    for (int s = 1; s < 40; ++s) {
        const double t = (s + 0.3) / 40.0;
        const int span = find_span(kv, t);
        if (kv[static_cast<std::size_t>(span)] > t - step || kv[static_cast<std::size_t>(span + 1)] < t + step) {
            continue;
        }
        const auto d = eval_basis_derivs(kv, span, t, 2);
        const auto plus = eval_basis(kv, span, t + step);
        const auto minus = eval_basis(kv, span, t - step);
        const auto dplus = eval_basis_derivs(kv, span, t + step, 1);
        const auto dminus = eval_basis_derivs(kv, span, t - step, 1);
        for (int j = 0; j <= p; ++j) {
            EXPECT_NEAR(d(1, j), (plus[j] - minus[j]) / (2 * step), 1e-5 * elements);
            EXPECT_NEAR(d(2, j), (dplus(1, j) - dminus(1, j)) / (2 * step), 1e-5 * elements * elements);
        }
    }
}

INSTANTIATE_TEST_SUITE_P(Meshes, BasisProperties,
                         ::testing::Combine(::testing::Values(1, 3, 8), ::testing::Values(1, 2, 3, 4)));

TEST(EvalBasisDerivs, Examples) {
    const auto d = eval_basis_derivs(KnotVector({0, 0, 1, 1}, 1), 0.5, 1);
    EXPECT_DOUBLE_EQ(d(1, 0), -1.0);
    EXPECT_DOUBLE_EQ(d(1, 1), 1.0);

    const KnotVector kv({0, 0, 0, 0.5, 1, 1, 1}, 2);
    const auto d2 = eval_basis_derivs(kv, 0.25, 1);
    EXPECT_NEAR(d2(1, 0), -2.0, 1e-14);
    EXPECT_NEAR(d2(1, 1), 1.0, 1e-14);
    EXPECT_NEAR(d2(1, 2), 1.0, 1e-14);
}

TEST(EvalBasisDerivs, OrdersAboveDegreeAreZero) {
    const auto kv = uniform_open_knots(3, 2);
    const auto d = eval_basis_derivs(kv, 0.4, 4);
    EXPECT_EQ(d.orders(), 4);
    for (int k = 3; k <= 4; ++k) {
        for (int j = 0; j < d.width(); ++j) EXPECT_EQ(d(k, j), 0.0);
    }
}

TEST(EvalBasis, RepeatedInteriorKnot) {
    // C^0 joint at 0.5 for p = 2: function 2 interpolates there
    const KnotVector kv({0, 0, 0, 0.5, 0.5, 1, 1, 1}, 2);
    const auto b = eval_basis_derivs(kv, 0.5, 0);
    double sum = 0.0;
    for (int j = 0; j < b.width(); ++j) sum += b(0, j);
    EXPECT_NEAR(sum, 1.0, 1e-15);
    bool found = false;
    for (int j = 0; j < b.width(); ++j) {
        if (b.first() + j == 2) {
            EXPECT_NEAR(b(0, j), 1.0, 1e-15);
            found = true;
        }
    }
    EXPECT_TRUE(found);
}

TEST(Greville, Examples) {
    EXPECT_EQ(greville_points(KnotVector({0, 0, 1, 1}, 1)), (std::vector<double>{0, 1}));
    EXPECT_EQ(greville_points(KnotVector({0, 0, 0, 1, 1, 1}, 2)), (std::vector<double>{0, 0.5, 1}));
    for (int n : {2, 4, 8}) {
        const auto g = greville_points(uniform_open_knots(n, 3));
        EXPECT_EQ(g.size(), static_cast<std::size_t>(n + 3));
        EXPECT_TRUE(std::is_sorted(g.begin(), g.end()));
        EXPECT_EQ(g.front(), 0.0);
        EXPECT_EQ(g.back(), 1.0);
    }
}

TEST(SplineSpace1D, Constraints) {
    const auto kv = uniform_open_knots(4, 2);  // 6 functions
    const SplineSpace1D both(kv, Constraint::zero_at_both_ends);
    EXPECT_EQ(both.dof_count(), 4);
    EXPECT_EQ(both.dof_of_function(0), -1);
    EXPECT_EQ(both.dof_of_function(1), 0);
    EXPECT_EQ(both.dof_of_function(5), -1);
    EXPECT_EQ(both.function_of_dof(3), 4);

    const SplineSpace1D left(kv, Constraint::zero_at_left_end);
    EXPECT_EQ(left.dof_count(), 5);
    EXPECT_EQ(left.dof_of_function(0), -1);
    EXPECT_EQ(left.dof_of_function(5), 4);

    const SplineSpace1D none(kv, Constraint::none);
    EXPECT_EQ(none.dof_count(), 6);
    EXPECT_EQ(none.dof_of_function(0), 0);

    EXPECT_THROW(SplineSpace1D(uniform_open_knots(1, 1), Constraint::zero_at_both_ends), ArgumentError);
}
