// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>

#include "trivergence/kernels.hpp"

namespace trivergence::kernels {

std::string_view to_string(Isa isa) noexcept {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
    }
    return "unknown";
}

bool supported(Isa isa) noexcept {
    switch (isa) {
        case Isa::Scalar: return true;
        case Isa::Avx2:
#if defined(TRIVERGE_HAVE_AVX2)
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
    }
    return false;
}

const KernelTable& table(Isa isa) {
    if (!supported(isa)) {
        throw std::invalid_argument("kernel ISA '" + std::string(to_string(isa)) +
                                    "' is not available");
    }
#if defined(TRIVERGE_HAVE_AVX2)
    if (isa == Isa::Avx2) return detail::kAvx2Table;
#endif
    return detail::kScalarTable;
}

static const KernelTable& select_kernels() noexcept {
    if (const char* env = std::getenv("TRIVERGE_KERNEL")) {
        const std::string_view want(env);
        if (want == "scalar") return detail::kScalarTable;
        if (want == "avx2" && supported(Isa::Avx2)) return table(Isa::Avx2);
    }
    return supported(Isa::Avx2) ? table(Isa::Avx2) : detail::kScalarTable;
}

const KernelTable& active() noexcept {
    static const KernelTable& selected = select_kernels();
    return selected;
}

double xlog_ratio_sum(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("xlog_ratio_sum: size mismatch");
    return active().xlog_ratio_sum(a.data(), b.data(), a.size());
}

double js_term_sum(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("js_term_sum: size mismatch");
    return active().js_term_sum(a.data(), b.data(), a.size());
}

}  // namespace trivergence::kernels
