// SPDX-License-Identifier: Apache-2.0

// AVX2 + FMA kernels. Compiled with -mavx2 -mfma; only reached through the
// dispatch table after a CPU feature check.

#include <immintrin.h>

#include <cstdint>

#include "neumaier.hpp"
#include "trivergence/kernels.hpp"

namespace trivergence::kernels {
namespace {

constexpr std::size_t kLanes = 4;

// log2 for positive normal doubles, a few ulp from the correctly rounded value.
//
// x = m·2^e with m in [√½, √2); log2(m) = (2/ln 2)·atanh(f), f = (m-1)/(m+1),
// |f| <= 0.1716, so the odd series in f is truncated after f^23.
inline __m256d log2_pd(__m256d x) {
    const __m256i bits = _mm256_castpd_si256(x);
    const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL);
    const __m256i one_bits = _mm256_set1_epi64x(0x3FF0000000000000LL);
    __m256d m = _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(bits, mant_mask), one_bits));

    // Biased exponent to double without cvtepi64: 2^52 + k as bits, minus (2^52 + 1023).
    const __m256i exp_bits = _mm256_srli_epi64(bits, 52);
    const __m256i magic = _mm256_set1_epi64x(0x4330000000000000LL);
    __m256d e = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(exp_bits, magic)),
                              _mm256_set1_pd(4503599627370496.0 + 1023.0));

    const __m256d big = _mm256_cmp_pd(m, _mm256_set1_pd(1.4142135623730951), _CMP_GT_OQ);
    m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
    e = _mm256_blendv_pd(e, _mm256_add_pd(e, _mm256_set1_pd(1.0)), big);

    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d f = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
    const __m256d f2 = _mm256_mul_pd(f, f);

    // P(f2) = Σ_{k=1..11} f2^(k-1) / (2k+1)
    __m256d p = _mm256_set1_pd(1.0 / 23.0);
    p = _mm256_fmadd_pd(p, f2, _mm256_set1_pd(1.0 / 21.0));
    p = _mm256_fmadd_pd(p, f2, _mm256_set1_pd(1.0 / 19.0));
    p = _mm256_fmadd_pd(p, f2, _mm256_set1_pd(1.0 / 17.0));
    p = _mm256_fmadd_pd(p, f2, _mm256_set1_pd(1.0 / 15.0));
    p = _mm256_fmadd_pd(p, f2, _mm256_set1_pd(1.0 / 13.0));
    p = _mm256_fmadd_pd(p, f2, _mm256_set1_pd(1.0 / 11.0));
    p = _mm256_fmadd_pd(p, f2, _mm256_set1_pd(1.0 / 9.0));
    p = _mm256_fmadd_pd(p, f2, _mm256_set1_pd(1.0 / 7.0));
    p = _mm256_fmadd_pd(p, f2, _mm256_set1_pd(1.0 / 5.0));
    p = _mm256_fmadd_pd(p, f2, _mm256_set1_pd(1.0 / 3.0));
    const __m256d tail = _mm256_mul_pd(_mm256_mul_pd(f, f2), p);

    // 2/ln 2 split into a head and a correction term.
    const __m256d c_hi = _mm256_set1_pd(2.8853900817779268);
    const __m256d c_lo = _mm256_set1_pd(4.0710547481862066e-17);
    const __m256d low = _mm256_fmadd_pd(c_lo, f, _mm256_mul_pd(c_hi, tail));
    const __m256d log_m = _mm256_fmadd_pd(c_hi, f, low);
    return _mm256_add_pd(e, log_m);
}

class VecNeumaier {
public:
    void add(__m256d x) noexcept {
        const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7FFFFFFFFFFFFFFFLL));
        const __m256d t = _mm256_add_pd(sum_, x);
        const __m256d sum_bigger = _mm256_cmp_pd(_mm256_and_pd(sum_, abs_mask),
                                                 _mm256_and_pd(x, abs_mask), _CMP_GE_OQ);
        const __m256d when_sum = _mm256_add_pd(_mm256_sub_pd(sum_, t), x);
        const __m256d when_x = _mm256_add_pd(_mm256_sub_pd(x, t), sum_);
        comp_ = _mm256_add_pd(comp_, _mm256_blendv_pd(when_x, when_sum, sum_bigger));
        sum_ = t;
    }

    double reduce() const noexcept {
        alignas(32) double s[kLanes];
        alignas(32) double c[kLanes];
        _mm256_store_pd(s, sum_);
        _mm256_store_pd(c, comp_);
        detail::Neumaier acc;
        for (std::size_t i = 0; i < kLanes; ++i) acc.add(s[i]);
        for (std::size_t i = 0; i < kLanes; ++i) acc.add(c[i]);
        return acc.result();
    }

private:
    __m256d sum_ = _mm256_setzero_pd();
    __m256d comp_ = _mm256_setzero_pd();
};

inline __m256d xlog_ratio_terms(__m256d a, __m256d b) {
    const __m256d zero = _mm256_setzero_pd();
    const __m256d term = _mm256_mul_pd(a, log2_pd(_mm256_div_pd(a, b)));
    return _mm256_blendv_pd(term, zero, _mm256_cmp_pd(a, zero, _CMP_EQ_OQ));
}

inline __m256d js_terms(__m256d a, __m256d b) {
    const __m256d zero = _mm256_setzero_pd();
    const __m256d m = _mm256_add_pd(a, b);
    __m256d ta = _mm256_mul_pd(a, log2_pd(_mm256_div_pd(_mm256_add_pd(a, a), m)));
    __m256d tb = _mm256_mul_pd(b, log2_pd(_mm256_div_pd(_mm256_add_pd(b, b), m)));
    ta = _mm256_blendv_pd(ta, zero, _mm256_cmp_pd(a, zero, _CMP_EQ_OQ));
    tb = _mm256_blendv_pd(tb, zero, _mm256_cmp_pd(b, zero, _CMP_EQ_OQ));
    return _mm256_add_pd(ta, tb);
}

// Runs `terms` over full blocks, then over one zero-padded block. Padded lanes
// have a = b = 0, which both kernels mask to an exact 0.
template <typename Terms>
double reduce_terms(const double* a, const double* b, std::size_t n, Terms terms) {
    VecNeumaier acc;
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        acc.add(terms(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    }
    if (i < n) {
        alignas(32) double ta[kLanes] = {0.0, 0.0, 0.0, 0.0};
        alignas(32) double tb[kLanes] = {0.0, 0.0, 0.0, 0.0};
        for (std::size_t k = 0; i + k < n; ++k) {
            ta[k] = a[i + k];
            tb[k] = b[i + k];
        }
        acc.add(terms(_mm256_load_pd(ta), _mm256_load_pd(tb)));
    }
    return acc.reduce();
}

double xlog_ratio_sum_avx2(const double* a, const double* b, std::size_t n) {
    return reduce_terms(a, b, n, xlog_ratio_terms);
}

double js_term_sum_avx2(const double* a, const double* b, std::size_t n) {
    return reduce_terms(a, b, n, js_terms);
}

void log2_batch_avx2(const double* x, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        _mm256_storeu_pd(out + i, log2_pd(_mm256_loadu_pd(x + i)));
    }
    if (i < n) {
        alignas(32) double tx[kLanes] = {1.0, 1.0, 1.0, 1.0};
        alignas(32) double to[kLanes];
        for (std::size_t k = 0; i + k < n; ++k) tx[k] = x[i + k];
        _mm256_store_pd(to, log2_pd(_mm256_load_pd(tx)));
        for (std::size_t k = 0; i + k < n; ++k) out[i + k] = to[k];
    }
}

}  // namespace

namespace detail {
const KernelTable kAvx2Table{Isa::Avx2, &xlog_ratio_sum_avx2, &js_term_sum_avx2,
                             &log2_batch_avx2};
}  // namespace detail

}  // namespace trivergence::kernels
