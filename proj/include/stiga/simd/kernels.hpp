#pragma once

// Data-parallel inner loops used by the Krylov solver, the Kronecker
// matvecs and the fast-diagonalization transforms.  Each kernel has a
// scalar reference implementation and an AVX2+FMA variant; the variant is
// picked once at startup from CPUID (override with STIGA_ISA=scalar|avx2).

#include <cstddef>
#include <span>
#include <string_view>

namespace stiga::simd {

enum class Isa { scalar, avx2 };

struct KernelTable {
    Isa isa;
    double (*dot)(const double* x, const double* y, std::size_t n);
    // y += a * x
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
    // y = A x for a CSR matrix with `rows` rows
    void (*csr_spmv)(std::size_t rows, const int* row_ptr, const int* cols, const double* vals,
                     const double* x, double* y);
    // C = A B, all column-major; A is m x k, B is k x n
    void (*gemm)(std::size_t m, std::size_t n, std::size_t k, const double* a, std::size_t lda,
                 const double* b, std::size_t ldb, double* c, std::size_t ldc);
};

[[nodiscard]] bool isa_available(Isa isa) noexcept;
[[nodiscard]] std::string_view isa_name(Isa isa) noexcept;

/// Table for a specific instruction set; throws ArgumentError if the CPU lacks it.
[[nodiscard]] const KernelTable& kernels(Isa isa);
/// Table selected at startup.
[[nodiscard]] const KernelTable& kernels() noexcept;
[[nodiscard]] Isa active_isa() noexcept;
/// Switch the process-wide selection (tests and benchmarking only; not thread safe).
void set_active_isa(Isa isa);

// Convenience wrappers over the active table.
[[nodiscard]] inline double dot(std::span<const double> x, std::span<const double> y) noexcept {
    return kernels().dot(x.data(), y.data(), x.size());
}
inline void axpy(double a, std::span<const double> x, std::span<double> y) noexcept {
    kernels().axpy(a, x.data(), y.data(), x.size());
}
[[nodiscard]] double norm2(std::span<const double> x) noexcept;

namespace detail {
extern const KernelTable scalar_table;
#if defined(STIGA_HAVE_AVX2_TU)
extern const KernelTable avx2_table;
#endif
}  // namespace detail

}  // namespace stiga::simd
