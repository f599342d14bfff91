// SPDX-License-Identifier: Apache-2.0

#include "trivergence/trivergence.hpp"

#include <algorithm>
#include <iterator>

#include "pair_table.hpp"
#include "trivergence/error.hpp"

namespace trivergence {

std::string_view to_string(TrivergenceForm form) noexcept {
    return form == TrivergenceForm::Product ? "product" : "compound";
}

std::string_view to_string(QrNormalizer n) noexcept {
    return n == QrNormalizer::Union ? "union" : "sum";
}

char role_name(Role role) noexcept { return "pqr"[static_cast<std::size_t>(role)]; }

std::string_view TrivergenceResult::units() const noexcept {
    return form == TrivergenceForm::Product ? "bits^3" : "bits";
}

namespace {

using Triple = std::array<const CountDistribution*, 3>;

const CountDistribution& at(const Triple& t, Role role) {
    return *t[static_cast<std::size_t>(role)];
}

SmoothingContext triple_context(const Triple& t, const TrivergenceOptions& options) {
    if (options.explicit_denominator) {
        return SmoothingContext::explicit_denominator(*options.explicit_denominator, options.mode);
    }
    return SmoothingContext::triplet_union(*t[0], *t[1], *t[2], options.mode);
}

std::string pair_text(RolePair pr) {
    return std::string("D(") + role_name(pr.first) + "||" + role_name(pr.second) + ")";
}

std::string variant_text(const VariantDescriptor& v) {
    if (v.form == TrivergenceForm::Product) {
        return pair_text(v.factors[0]) + " * " + pair_text(v.factors[1]) + " * " +
               pair_text(v.factors[2]);
    }
    const std::string outer(1, role_name(v.outer));
    const std::string inner = pair_text(v.inner);
    return v.scalar_first ? "D[" + inner + " || " + outer + "]"
                          : "D[" + outer + " || " + inner + "]";
}

TrivergenceResult base_result(TrivergenceForm form, DivergenceKind base, const Triple& t,
                              const SmoothingContext& ctx) {
    TrivergenceResult result;
    result.form = form;
    result.base = base;
    result.context = ctx;
    for (std::size_t i = 0; i < 3; ++i) result.labels[i] = t[i]->label();
    return result;
}

TrivergenceResult evaluate_product(const VariantDescriptor& v, const Triple& t,
                                   DivergenceKind base, const TrivergenceOptions& options) {
    const SmoothingContext ctx = triple_context(t, options);
    TrivergenceResult result = base_result(TrivergenceForm::Product, base, t, ctx);
    result.variant = v.text;
    result.value = 1.0;
    for (const RolePair& f : v.factors) {
        result.factors.push_back(divergence(base, at(t, f.first), at(t, f.second), ctx));
        result.value *= result.factors.back().value;
    }
    return result;
}

std::vector<ItemId> support_union(const CountDistribution& a, const CountDistribution& b) {
    PairRegions regions = pair_regions(a, b);
    std::vector<ItemId> out;
    out.reserve(regions.only_first.size() + regions.both.size() + regions.only_second.size());
    std::merge(regions.only_first.begin(), regions.only_first.end(), regions.both.begin(),
               regions.both.end(), std::back_inserter(out));
    std::vector<ItemId> all;
    all.reserve(out.size() + regions.only_second.size());
    std::merge(out.begin(), out.end(), regions.only_second.begin(), regions.only_second.end(),
               std::back_inserter(all));
    return all;
}

// D[outer || D(inner.first || inner.second) / normalizer] with the scalar in
// every slot of the second side that belongs to the inner support, and 1/T in
// the rest.
TrivergenceResult evaluate_compound(const VariantDescriptor& v, const Triple& t,
                                    DivergenceKind base, const TrivergenceOptions& options) {
    const SmoothingContext ctx = triple_context(t, options);
    TrivergenceResult result = base_result(TrivergenceForm::Compound, base, t, ctx);
    result.variant = v.text;

    const CountDistribution& outer = at(t, v.outer);
    const CountDistribution& b = at(t, v.inner.first);
    const CountDistribution& c = at(t, v.inner.second);
    const std::uint64_t T = ctx.denominator;

    CompoundComponents comp;
    comp.inner = divergence(base, b, c, ctx);
    comp.outer_label = outer.label();

    // Items that carry the scalar: support(b) for KL, support(b) ∪ support(c) for JS.
    std::vector<ItemId> scalar_support;
    if (base == DivergenceKind::KL) {
        comp.normalizer = b.distinct_count();
        comp.normalizer_kind = "distinct(" + std::string(1, role_name(v.inner.first)) + ")";
        for (const auto& e : b.entries()) scalar_support.push_back(e.item);
    } else {
        scalar_support = support_union(b, c);
        const std::string names = std::string(1, role_name(v.inner.first)) + "," +
                                  std::string(1, role_name(v.inner.second));
        if (options.qr_normalizer == QrNormalizer::Union) {
            comp.normalizer = scalar_support.size();
            comp.normalizer_kind = "union(" + names + ")";
        } else {
            comp.normalizer = b.distinct_count() + c.distinct_count();
            comp.normalizer_kind = "sum(" + names + ")";
        }
    }

    comp.scalar = comp.inner.value / static_cast<double>(comp.normalizer);
    comp.zero_branch = !(comp.scalar > 0.0);
    const double smooth = 1.0 / static_cast<double>(T);
    comp.effective_scalar = comp.zero_branch ? smooth : comp.scalar;

    // Segments: [outer \ S][outer ∩ S][S \ outer], S = scalar support.
    const bool with_third = base == DivergenceKind::JS;
    std::vector<const CountEntry*> only_outer, shared;
    std::size_t only_scalar = 0;
    {
        auto oe = outer.entries();
        std::size_t i = 0, j = 0;
        while (i < oe.size() || j < scalar_support.size()) {
            if (j == scalar_support.size() ||
                (i < oe.size() && oe[i].item < scalar_support[j])) {
                only_outer.push_back(&oe[i++]);
            } else if (i == oe.size() || scalar_support[j] < oe[i].item) {
                ++only_scalar;
                ++j;
            } else {
                shared.push_back(&oe[i]);
                ++i;
                ++j;
            }
        }
    }

    const std::uint64_t outer_smoothed = with_third ? only_scalar : 0;
    detail::SegmentedTable table;
    table.sizes = {only_outer.size(), shared.size(), with_third ? only_scalar : 0};
    for (const CountEntry* e : only_outer) {
        table.first.push_back(detail::own_value(e->count, outer, options.mode, T, outer_smoothed));
        table.second.push_back(smooth);
    }
    for (const CountEntry* e : shared) {
        table.first.push_back(detail::own_value(e->count, outer, options.mode, T, outer_smoothed));
        table.second.push_back(comp.effective_scalar);
    }
    if (with_third) {
        const double fallback = detail::fallback_value(options.mode, T, outer_smoothed);
        for (std::size_t k = 0; k < only_scalar; ++k) {
            table.first.push_back(fallback);
            table.second.push_back(comp.effective_scalar);
        }
    }

    comp.outer_terms = detail::sum_segments(base, table, with_third);
    result.value = comp.outer_terms.total();
    result.compound = std::move(comp);
    return result;
}

TrivergenceResult evaluate(const VariantDescriptor& v, const Triple& t, DivergenceKind base,
                           const TrivergenceOptions& options) {
    if (!v.evaluable) {
        throw Error(ErrorKind::NotEvaluable,
                    v.text + ": compounds with the scalar as first argument have no defined "
                             "evaluation rule");
    }
    return v.form == TrivergenceForm::Product ? evaluate_product(v, t, base, options)
                                              : evaluate_compound(v, t, base, options);
}

TrivergenceResult evaluate_canonical(TrivergenceForm form, const CountDistribution& p,
                                     const CountDistribution& q, const CountDistribution& r,
                                     DivergenceKind base, const TrivergenceOptions& options) {
    const CanonicalOrder order = canonical_order(p, q, r);
    const Triple t{&order.ordered[0].get(), &order.ordered[1].get(), &order.ordered[2].get()};
    TrivergenceResult result = evaluate(enumerate_variants(form).front(), t, base, options);
    result.permutation = order.permutation;
    result.tie = order.tie;
    return result;
}

}  // namespace

std::vector<VariantDescriptor> enumerate_variants(TrivergenceForm form) {
    std::vector<VariantDescriptor> out;
    using R = Role;
    if (form == TrivergenceForm::Product) {
        const std::array<std::array<RolePair, 3>, 2> rows{{
            {{{R::P, R::Q}, {R::Q, R::R}, {R::P, R::R}}},
            {{{R::Q, R::P}, {R::R, R::Q}, {R::R, R::P}}},
        }};
        for (const auto& row : rows) {
            VariantDescriptor v;
            v.form = form;
            v.index = out.size();
            v.factors = row;
            v.text = variant_text(v);
            out.push_back(std::move(v));
        }
        return out;
    }

    struct Entry {
        Role outer;
        RolePair inner;
    };
    const std::array<Entry, 6> entries{{
        {R::P, {R::Q, R::R}},
        {R::P, {R::R, R::Q}},
        {R::Q, {R::P, R::R}},
        {R::Q, {R::R, R::P}},
        {R::R, {R::P, R::Q}},
        {R::R, {R::Q, R::P}},
    }};
    for (bool scalar_first : {false, true}) {
        for (const Entry& e : entries) {
            VariantDescriptor v;
            v.form = form;
            v.index = out.size();
            v.outer = e.outer;
            v.inner = e.inner;
            v.scalar_first = scalar_first;
            v.evaluable = !scalar_first;
            v.text = variant_text(v);
            out.push_back(std::move(v));
        }
    }
    return out;
}

TrivergenceResult triv_product(const CountDistribution& p, const CountDistribution& q,
                               const CountDistribution& r, DivergenceKind base,
                               const TrivergenceOptions& options) {
    return evaluate_canonical(TrivergenceForm::Product, p, q, r, base, options);
}

TrivergenceResult triv_compound_kl(const CountDistribution& p, const CountDistribution& q,
                                   const CountDistribution& r,
                                   const TrivergenceOptions& options) {
    return evaluate_canonical(TrivergenceForm::Compound, p, q, r, DivergenceKind::KL, options);
}

TrivergenceResult triv_compound_js(const CountDistribution& p, const CountDistribution& q,
                                   const CountDistribution& r,
                                   const TrivergenceOptions& options) {
    return evaluate_canonical(TrivergenceForm::Compound, p, q, r, DivergenceKind::JS, options);
}

TrivergenceResult triv_compound(const CountDistribution& p, const CountDistribution& q,
                                const CountDistribution& r, DivergenceKind base,
                                const TrivergenceOptions& options) {
    return evaluate_canonical(TrivergenceForm::Compound, p, q, r, base, options);
}

TrivergenceResult evaluate_variant(const VariantDescriptor& v, const CountDistribution& p,
                                   const CountDistribution& q, const CountDistribution& r,
                                   DivergenceKind base, const TrivergenceOptions& options) {
    return evaluate(v, Triple{&p, &q, &r}, base, options);
}

}  // namespace trivergence
