// SPDX-License-Identifier: Apache-2.0

#include "trivergence/oracle.hpp"

#include <map>
#include <set>

#include "trivergence/error.hpp"

namespace trivergence::verification {
namespace {

using Alphabet = std::set<std::string>;
using Probabilities = std::map<std::string, Rational>;

std::map<std::string, std::uint64_t> counts_of(const CountDistribution& d) {
    std::map<std::string, std::uint64_t> out;
    for (const auto& e : d.entries()) out[e.item.text()] = e.count;
    return out;
}

Alphabet support_of(const CountDistribution& d) {
    Alphabet out;
    for (const auto& e : d.entries()) out.insert(e.item.text());
    return out;
}

Alphabet unite(const Alphabet& a, const Alphabet& b) {
    Alphabet out = a;
    out.insert(b.begin(), b.end());
    return out;
}

// Smoothed probabilities of `d` over `alphabet`, jointly renormalized for Strict.
Probabilities side(const CountDistribution& d, const Alphabet& alphabet, NormalizationMode mode,
                   std::uint64_t denominator) {
    const auto counts = counts_of(d);
    Probabilities out;
    for (const auto& w : alphabet) {
        auto it = counts.find(w);
        if (it == counts.end()) {
            out[w] = Rational(1, denominator);
        } else if (mode == NormalizationMode::PaperLiteral) {
            out[w] = Rational(it->second, d.distinct_count());
        } else {
            out[w] = Rational(it->second, d.token_total());
        }
    }
    if (mode == NormalizationMode::Strict) {
        Rational mass = 0;
        for (const auto& [w, v] : out) mass += v;
        for (auto& [w, v] : out) v /= mass;
    }
    return out;
}

HighPrecision log2_of(const Rational& x) {
    static const HighPrecision ln2 = log(HighPrecision(2));
    return log(HighPrecision(x)) / ln2;
}

HighPrecision kl_term(const Rational& a, const Rational& b) {
    if (a == 0) return 0;
    if (b == 0) throw Error(ErrorKind::DivisionByZero, "oracle: q_w = 0");
    return HighPrecision(a) * log2_of(a / b);
}

HighPrecision js_term(const Rational& a, const Rational& b) {
    const Rational m = a + b;
    HighPrecision t = 0;
    if (a != 0) t += HighPrecision(a) * log2_of(2 * a / m);
    if (b != 0) t += HighPrecision(b) * log2_of(2 * b / m);
    return t / 2;
}

OracleValue accumulate(const Alphabet& alphabet, const Probabilities& first,
                       const Probabilities& second, DivergenceKind kind) {
    OracleValue out;
    out.value = 0;
    for (const auto& w : alphabet) {
        const Rational& a = first.at(w);
        const Rational& b = second.at(w);
        HighPrecision term = kind == DivergenceKind::KL ? kl_term(a, b) : js_term(a, b);
        out.value += term;
        out.term_trace.push_back({w, term});
    }
    return out;
}

OracleValue pair_direct(DivergenceKind kind, const CountDistribution& p,
                        const CountDistribution& q, const SmoothingContext& ctx) {
    const Alphabet sp = support_of(p);
    const Alphabet both = unite(sp, support_of(q));
    const bool over_union = kind == DivergenceKind::JS || ctx.mode == NormalizationMode::Strict;
    const Alphabet& alphabet = over_union ? both : sp;
    return accumulate(alphabet, side(p, alphabet, ctx.mode, ctx.denominator),
                      side(q, alphabet, ctx.mode, ctx.denominator), kind);
}

std::uint64_t triple_denominator(const CountDistribution& p, const CountDistribution& q,
                                 const CountDistribution& r, const TrivergenceOptions& options) {
    if (options.explicit_denominator) return *options.explicit_denominator;
    return unite(unite(support_of(p), support_of(q)), support_of(r)).size();
}

}  // namespace

OracleValue kl_direct(const CountDistribution& p, const CountDistribution& q,
                      const SmoothingContext& ctx) {
    return pair_direct(DivergenceKind::KL, p, q, ctx);
}

OracleValue js_direct(const CountDistribution& p, const CountDistribution& q,
                      const SmoothingContext& ctx) {
    return pair_direct(DivergenceKind::JS, p, q, ctx);
}

OracleValue divergence_over_direct(DivergenceKind kind, const CountDistribution& p,
                                   const CountDistribution& q, const SmoothingContext& ctx,
                                   const std::vector<ItemId>& alphabet) {
    Alphabet fixed;
    for (const auto& w : alphabet) fixed.insert(w.text());
    const Alphabet sp = support_of(p);
    const bool over_fixed = kind == DivergenceKind::JS || ctx.mode == NormalizationMode::Strict;
    const Alphabet& sum_over = over_fixed ? fixed : sp;
    return accumulate(sum_over, side(p, sum_over, ctx.mode, ctx.denominator),
                      side(q, sum_over, ctx.mode, ctx.denominator), kind);
}

OracleValue variant_direct(const VariantDescriptor& v, DivergenceKind base,
                           const CountDistribution& p, const CountDistribution& q,
                           const CountDistribution& r, const TrivergenceOptions& options) {
    if (!v.evaluable) throw Error(ErrorKind::NotEvaluable, v.text);

    const std::array<const CountDistribution*, 3> t{&p, &q, &r};
    auto at = [&](Role role) -> const CountDistribution& {
        return *t[static_cast<std::size_t>(role)];
    };
    const std::uint64_t T = triple_denominator(p, q, r, options);
    const SmoothingContext ctx{options.mode, T,
                               options.explicit_denominator ? DenominatorPolicy::Explicit
                                                            : DenominatorPolicy::TripletUnion};

    if (v.form == TrivergenceForm::Product) {
        OracleValue out;
        out.value = 1;
        for (const RolePair& f : v.factors) {
            OracleValue factor = pair_direct(base, at(f.first), at(f.second), ctx);
            out.value *= factor.value;
            for (auto& term : factor.term_trace) out.term_trace.push_back(std::move(term));
        }
        return out;
    }

    const CountDistribution& outer = at(v.outer);
    const CountDistribution& b = at(v.inner.first);
    const CountDistribution& c = at(v.inner.second);
    const OracleValue inner = pair_direct(base, b, c, ctx);

    Alphabet scalar_support;
    std::uint64_t normalizer = 0;
    if (base == DivergenceKind::KL) {
        scalar_support = support_of(b);
        normalizer = b.distinct_count();
    } else {
        scalar_support = unite(support_of(b), support_of(c));
        normalizer = options.qr_normalizer == QrNormalizer::Union
                         ? scalar_support.size()
                         : b.distinct_count() + c.distinct_count();
    }

    const HighPrecision scalar = inner.value / normalizer;
    const bool zero_branch = scalar <= 0;
    const HighPrecision slot = zero_branch ? HighPrecision(1) / T : scalar;

    const Alphabet alphabet = base == DivergenceKind::KL ? support_of(outer)
                                                         : unite(support_of(outer), scalar_support);
    const Probabilities first = side(outer, alphabet, options.mode, T);

    OracleValue out;
    out.value = 0;
    out.scalar = scalar;
    out.zero_branch = zero_branch;
    for (const auto& w : alphabet) {
        const HighPrecision a(first.at(w));
        const HighPrecision s = scalar_support.count(w) ? slot : HighPrecision(1) / T;
        HighPrecision term;
        if (base == DivergenceKind::KL) {
            term = a * log(a / s) / log(HighPrecision(2));
        } else {
            const HighPrecision m = a + s;
            term = (a * log(2 * a / m) + s * log(2 * s / m)) / log(HighPrecision(2)) / 2;
        }
        out.value += term;
        out.term_trace.push_back({w, term});
    }
    return out;
}

OracleValue trivergence_direct(TrivergenceForm form, DivergenceKind base,
                               const CountDistribution& p, const CountDistribution& q,
                               const CountDistribution& r, const TrivergenceOptions& options) {
    const CanonicalOrder order = canonical_order(p, q, r);
    return variant_direct(enumerate_variants(form).front(), base, order.ordered[0].get(),
                          order.ordered[1].get(), order.ordered[2].get(), options);
}

bool relatively_close(double kernel_value, const OracleValue& oracle, double rel) {
    const HighPrecision k(kernel_value);
    const HighPrecision diff = abs(k - oracle.value);
    const HighPrecision scale = max(abs(k), abs(oracle.value));
    return diff <= rel * scale;
}

}  // namespace trivergence::verification
