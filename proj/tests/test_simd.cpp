#include "stiga/error.hpp"
#include "stiga/simd/kernels.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace stiga;
using simd::Isa;

namespace {

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = dist(gen);
    return v;
}

class SimdEquivalence : public ::testing::Test {
protected:
    void SetUp() override {
        if (!simd::isa_available(Isa::avx2)) GTEST_SKIP() << "CPU lacks AVX2/FMA";
    }
    const simd::KernelTable& ref = simd::kernels(Isa::scalar);
    const simd::KernelTable& vec() { return simd::kernels(Isa::avx2); }
};

}  // namespace

TEST(Simd, ScalarAlwaysAvailable) {
    EXPECT_TRUE(simd::isa_available(Isa::scalar));
    EXPECT_EQ(simd::kernels(Isa::scalar).isa, Isa::scalar);
    EXPECT_EQ(simd::isa_name(Isa::scalar), "scalar");
    EXPECT_EQ(simd::isa_name(Isa::avx2), "avx2");
}

TEST(Simd, UnavailableIsaThrows) {
    if (simd::isa_available(Isa::avx2)) GTEST_SKIP() << "AVX2 present";
    EXPECT_THROW((void)simd::kernels(Isa::avx2), ArgumentError);
}

TEST(Simd, ScalarKernelsOnTinyInputs) {
    const auto& k = simd::kernels(Isa::scalar);
    const double x[3] = {1.0, 2.0, 3.0};
    double y[3] = {1.0, 1.0, 1.0};
    EXPECT_EQ(k.dot(x, y, 3), 6.0);
    k.axpy(2.0, x, y, 3);
    EXPECT_EQ(y[0], 3.0);
    EXPECT_EQ(y[2], 7.0);
    EXPECT_EQ(k.dot(x, y, 0), 0.0);

    // [[1 2], [0 3]] * (1, 1)
    const int rp[3] = {0, 2, 3};
    const int ci[3] = {0, 1, 1};
    const double va[3] = {1.0, 2.0, 3.0};
    const double xs[2] = {1.0, 1.0};
    double ys[2];
    k.csr_spmv(2, rp, ci, va, xs, ys);
    EXPECT_EQ(ys[0], 3.0);
    EXPECT_EQ(ys[1], 3.0);

    // column-major 2x2: A = [[1 3], [2 4]], B = I
    const double a[4] = {1, 2, 3, 4};
    const double b[4] = {1, 0, 0, 1};
    double c[4] = {-1, -1, -1, -1};
    k.gemm(2, 2, 2, a, 2, b, 2, c, 2);
    for (int i = 0; i < 4; ++i) EXPECT_EQ(c[i], a[i]);
}

TEST(Simd, Norm2) {
    const std::vector<double> x{3.0, 4.0};
    EXPECT_DOUBLE_EQ(simd::norm2(x), 5.0);
}

TEST_F(SimdEquivalence, Dot) {
    for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 15u, 16u, 17u, 1000u, 4099u}) {
        const auto x = random_vector(n, 1 + n);
        const auto y = random_vector(n, 2 + n);
        const double a = ref.dot(x.data(), y.data(), n);
        const double b = vec().dot(x.data(), y.data(), n);
        double scale = 0.0;
        for (std::size_t i = 0; i < n; ++i) scale += std::abs(x[i] * y[i]);
        EXPECT_NEAR(a, b, 1e-15 * (scale + 1.0)) << "n=" << n;
    }
}

TEST_F(SimdEquivalence, Axpy) {
    for (std::size_t n : {0u, 1u, 5u, 8u, 13u, 64u, 1003u}) {
        const auto x = random_vector(n, 3 + n);
        auto y1 = random_vector(n, 4 + n);
        auto y2 = y1;
        ref.axpy(-0.7, x.data(), y1.data(), n);
        vec().axpy(-0.7, x.data(), y2.data(), n);
        for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(y1[i], y2[i], 1e-15) << "n=" << n << " i=" << i;
    }
}

TEST_F(SimdEquivalence, CsrSpmv) {
    std::mt19937_64 gen(11);
    const int rows = 97;
    const int cols = 61;
    std::vector<int> rp{0};
    std::vector<int> ci;
    std::vector<double> va;
    std::uniform_int_distribution<int> len(0, 11);
    std::uniform_int_distribution<int> col(0, cols - 1);
    std::uniform_real_distribution<double> val(-2.0, 2.0);
    for (int i = 0; i < rows; ++i) {
        const int l = len(gen);
        for (int k = 0; k < l; ++k) {
            ci.push_back(col(gen));
            va.push_back(val(gen));
        }
        rp.push_back(static_cast<int>(ci.size()));
    }
    const auto x = random_vector(cols, 12);
    std::vector<double> y1(rows), y2(rows);
    ref.csr_spmv(rows, rp.data(), ci.data(), va.data(), x.data(), y1.data());
    vec().csr_spmv(rows, rp.data(), ci.data(), va.data(), x.data(), y2.data());
    for (int i = 0; i < rows; ++i) EXPECT_NEAR(y1[i], y2[i], 1e-14) << "row " << i;
}

TEST_F(SimdEquivalence, Gemm) {
    struct Shape {
        std::size_t m, n, k;
    };
    for (const Shape s : {Shape{1, 1, 1}, Shape{3, 5, 2}, Shape{8, 8, 8}, Shape{17, 9, 13}, Shape{64, 33, 40}}) {
        const std::size_t lda = s.m + 1;
        const std::size_t ldb = s.k + 2;
        const std::size_t ldc = s.m + 3;
        const auto a = random_vector(lda * s.k, 20 + s.m);
        const auto b = random_vector(ldb * s.n, 21 + s.n);
        std::vector<double> c1(ldc * s.n, 7.0), c2(ldc * s.n, 7.0);
        ref.gemm(s.m, s.n, s.k, a.data(), lda, b.data(), ldb, c1.data(), ldc);
        vec().gemm(s.m, s.n, s.k, a.data(), lda, b.data(), ldb, c2.data(), ldc);
        for (std::size_t j = 0; j < s.n; ++j) {
            for (std::size_t i = 0; i < ldc; ++i) {
                if (i < s.m) {
                    EXPECT_NEAR(c1[i + j * ldc], c2[i + j * ldc], 1e-13 * static_cast<double>(s.k));
                } else {
                    EXPECT_EQ(c2[i + j * ldc], 7.0) << "padding overwritten";
                }
            }
        }
    }
}

TEST_F(SimdEquivalence, ActiveIsaSwitch) {
    const Isa before = simd::active_isa();
    simd::set_active_isa(Isa::scalar);
    EXPECT_EQ(simd::kernels().isa, Isa::scalar);
    simd::set_active_isa(Isa::avx2);
    EXPECT_EQ(simd::kernels().isa, Isa::avx2);
    simd::set_active_isa(before);
}
