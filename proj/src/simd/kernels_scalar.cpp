#include "stiga/simd/kernels.hpp"

namespace stiga::simd::detail {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void csr_spmv_scalar(std::size_t rows, const int* row_ptr, const int* cols, const double* vals,
                     const double* x, double* y) {
    for (std::size_t r = 0; r < rows; ++r) {
        double s = 0.0;
        for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) s += vals[k] * x[cols[k]];
        y[r] = s;
    }
}

void gemm_scalar(std::size_t m, std::size_t n, std::size_t k, const double* a, std::size_t lda,
                 const double* b, std::size_t ldb, double* c, std::size_t ldc) {
    for (std::size_t j = 0; j < n; ++j) {
        double* cj = c + j * ldc;
        for (std::size_t i = 0; i < m; ++i) cj[i] = 0.0;
        for (std::size_t p = 0; p < k; ++p) {
            const double bpj = b[p + j * ldb];
            if (bpj == 0.0) continue;
            const double* ap = a + p * lda;
            for (std::size_t i = 0; i < m; ++i) cj[i] += ap[i] * bpj;
        }
    }
}

}  // namespace

const KernelTable scalar_table{Isa::scalar, &dot_scalar, &axpy_scalar, &csr_spmv_scalar, &gemm_scalar};

}  // namespace stiga::simd::detail
