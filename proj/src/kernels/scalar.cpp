// SPDX-License-Identifier: Apache-2.0

// Reference kernels. These define the semantics the SIMD variants are tested
// against.

#include <cmath>

#include "neumaier.hpp"
#include "trivergence/kernels.hpp"

namespace trivergence::kernels {
namespace {

double xlog_ratio_sum_scalar(const double* a, const double* b, std::size_t n) {
    detail::Neumaier acc;
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i] != 0.0) acc.add(a[i] * std::log2(a[i] / b[i]));
    }
    return acc.result();
}

double js_term_sum_scalar(const double* a, const double* b, std::size_t n) {
    detail::Neumaier acc;
    for (std::size_t i = 0; i < n; ++i) {
        const double m = a[i] + b[i];
        const double ta = a[i] != 0.0 ? a[i] * std::log2((a[i] + a[i]) / m) : 0.0;
        const double tb = b[i] != 0.0 ? b[i] * std::log2((b[i] + b[i]) / m) : 0.0;
        acc.add(ta + tb);
    }
    return acc.result();
}

void log2_batch_scalar(const double* x, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::log2(x[i]);
}

}  // namespace

namespace detail {
const KernelTable kScalarTable{Isa::Scalar, &xlog_ratio_sum_scalar, &js_term_sum_scalar,
                               &log2_batch_scalar};
}  // namespace detail

}  // namespace trivergence::kernels
