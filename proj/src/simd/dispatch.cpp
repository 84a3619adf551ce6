#include "stiga/error.hpp"
#include "stiga/simd/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

namespace stiga::simd {
namespace {

bool cpu_has_avx2() noexcept {
#if defined(STIGA_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Isa detect() noexcept {
    if (const char* env = std::getenv("STIGA_ISA")) {
        const std::string want(env);
        if (want == "scalar") return Isa::scalar;
        if (want == "avx2" && cpu_has_avx2()) return Isa::avx2;
    }
    return cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
}

const KernelTable* active_table = nullptr;

const KernelTable& table_for(Isa isa) {
    switch (isa) {
    case Isa::scalar:
        return detail::scalar_table;
    case Isa::avx2:
#if defined(STIGA_HAVE_AVX2_TU)
        if (cpu_has_avx2()) return detail::avx2_table;
#endif
        break;
    }
    throw ArgumentError("instruction set '" + std::string(isa_name(isa)) + "' is not available on this CPU");
}

}  // namespace

bool isa_available(Isa isa) noexcept {
    return isa == Isa::scalar || (isa == Isa::avx2 && cpu_has_avx2());
}

std::string_view isa_name(Isa isa) noexcept {
    return isa == Isa::avx2 ? "avx2" : "scalar";
}

const KernelTable& kernels(Isa isa) { return table_for(isa); }

const KernelTable& kernels() noexcept {
    if (active_table == nullptr) active_table = &table_for(detect());
    return *active_table;
}

Isa active_isa() noexcept { return kernels().isa; }

void set_active_isa(Isa isa) { active_table = &table_for(isa); }

double norm2(std::span<const double> x) noexcept { return std::sqrt(dot(x, x)); }

}  // namespace stiga::simd
