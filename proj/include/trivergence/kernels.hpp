// SPDX-License-Identifier: Apache-2.0

#pragma once

// Dense inner loops of the divergence evaluation. Every kernel has a scalar
// reference implementation and, on x86-64, an AVX2 variant. The variant is
// picked once at runtime from the CPU features; TRIVERGE_KERNEL=scalar|avx2
// overrides the choice.
//
// All sums are Neumaier-compensated and accumulate in array order, so results
// are reproducible for a given kernel. Inputs are probabilities: finite,
// non-negative, and b[i] > 0 wherever a[i] > 0. Elements with a[i] == 0
// contribute 0 (0 log 0 = 0).

#include <cstddef>
#include <span>
#include <string_view>

namespace trivergence::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa) noexcept;

struct KernelTable {
    Isa isa;
    /// Σ a[i]·log2(a[i]/b[i])
    double (*xlog_ratio_sum)(const double* a, const double* b, std::size_t n);
    /// Σ a[i]·log2(2a[i]/(a[i]+b[i])) + b[i]·log2(2b[i]/(a[i]+b[i])).
    /// Symmetric in (a, b) bit for bit.
    double (*js_term_sum)(const double* a, const double* b, std::size_t n);
    /// out[i] = log2(x[i]) for positive finite x.
    void (*log2_batch)(const double* x, double* out, std::size_t n);
};

bool supported(Isa isa) noexcept;

/// Throws std::invalid_argument when the ISA is not available on this build or CPU.
const KernelTable& table(Isa isa);

/// The table used by the divergence module.
const KernelTable& active() noexcept;

double xlog_ratio_sum(std::span<const double> a, std::span<const double> b);
double js_term_sum(std::span<const double> a, std::span<const double> b);

namespace detail {
extern const KernelTable kScalarTable;
#if defined(TRIVERGE_HAVE_AVX2)
extern const KernelTable kAvx2Table;
#endif
}  // namespace detail

}  // namespace trivergence::kernels
