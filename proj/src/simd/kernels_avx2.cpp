#include "stiga/simd/kernels.hpp"

#if defined(STIGA_HAVE_AVX2_TU)
#include <immintrin.h>

namespace stiga::simd::detail {
namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    __m256d acc2 = _mm256_setzero_pd();
    __m256d acc3 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
        acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 8), _mm256_loadu_pd(y + i + 8), acc2);
        acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 12), _mm256_loadu_pd(y + i + 12), acc3);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    }
    double s = hsum(_mm256_add_pd(_mm256_add_pd(acc0, acc1), _mm256_add_pd(acc2, acc3)));
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
        _mm256_storeu_pd(y + i + 4,
                         _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4)));
    }
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void csr_spmv_avx2(std::size_t rows, const int* row_ptr, const int* cols, const double* vals,
                   const double* x, double* y) {
    for (std::size_t r = 0; r < rows; ++r) {
        int k = row_ptr[r];
        const int end = row_ptr[r + 1];
        __m256d acc = _mm256_setzero_pd();
        for (; k + 4 <= end; k += 4) {
            const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(cols + k));
            const __m256d xv = _mm256_i32gather_pd(x, idx, 8);
            acc = _mm256_fmadd_pd(_mm256_loadu_pd(vals + k), xv, acc);
        }
        double s = hsum(acc);
        for (; k < end; ++k) s += vals[k] * x[cols[k]];
        y[r] = s;
    }
}

void gemm_avx2(std::size_t m, std::size_t n, std::size_t k, const double* a, std::size_t lda,
               const double* b, std::size_t ldb, double* c, std::size_t ldc) {
    // Four output columns at a time so each loaded column of A feeds four FMAs.
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        double* c0 = c + j * ldc;
        double* c1 = c0 + ldc;
        double* c2 = c1 + ldc;
        double* c3 = c2 + ldc;
        std::size_t i = 0;
        for (; i + 4 <= m; i += 4) {
            __m256d s0 = _mm256_setzero_pd();
            __m256d s1 = _mm256_setzero_pd();
            __m256d s2 = _mm256_setzero_pd();
            __m256d s3 = _mm256_setzero_pd();
            for (std::size_t p = 0; p < k; ++p) {
                const __m256d av = _mm256_loadu_pd(a + i + p * lda);
                s0 = _mm256_fmadd_pd(av, _mm256_set1_pd(b[p + j * ldb]), s0);
                s1 = _mm256_fmadd_pd(av, _mm256_set1_pd(b[p + (j + 1) * ldb]), s1);
                s2 = _mm256_fmadd_pd(av, _mm256_set1_pd(b[p + (j + 2) * ldb]), s2);
                s3 = _mm256_fmadd_pd(av, _mm256_set1_pd(b[p + (j + 3) * ldb]), s3);
            }
            _mm256_storeu_pd(c0 + i, s0);
            _mm256_storeu_pd(c1 + i, s1);
            _mm256_storeu_pd(c2 + i, s2);
            _mm256_storeu_pd(c3 + i, s3);
        }
        for (; i < m; ++i) {
            double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
            for (std::size_t p = 0; p < k; ++p) {
                const double av = a[i + p * lda];
                s0 += av * b[p + j * ldb];
                s1 += av * b[p + (j + 1) * ldb];
                s2 += av * b[p + (j + 2) * ldb];
                s3 += av * b[p + (j + 3) * ldb];
            }
            c0[i] = s0;
            c1[i] = s1;
            c2[i] = s2;
            c3[i] = s3;
        }
    }
    for (; j < n; ++j) {
        double* cj = c + j * ldc;
        for (std::size_t i = 0; i < m; ++i) cj[i] = 0.0;
        for (std::size_t p = 0; p < k; ++p) axpy_avx2(b[p + j * ldb], a + p * lda, cj, m);
    }
}

}  // namespace

const KernelTable avx2_table{Isa::avx2, &dot_avx2, &axpy_avx2, &csr_spmv_avx2, &gemm_avx2};

}  // namespace stiga::simd::detail
#endif
