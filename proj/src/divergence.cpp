// SPDX-License-Identifier: Apache-2.0

#include "trivergence/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pair_table.hpp"
#include "trivergence/error.hpp"
#include "trivergence/kernels.hpp"

namespace trivergence {

std::string_view to_string(DivergenceKind kind) noexcept {
    return kind == DivergenceKind::KL ? "kl" : "js";
}

namespace detail {

double own_value(std::uint64_t c, const CountDistribution& d, NormalizationMode mode,
                 std::uint64_t denominator, std::uint64_t smoothed_items) {
    const auto cd = static_cast<double>(c);
    switch (mode) {
        case NormalizationMode::PaperLiteral:
            return cd / static_cast<double>(d.distinct_count());
        case NormalizationMode::TokenNormalized:
            return cd / static_cast<double>(d.token_total());
        case NormalizationMode::Strict: {
            const auto t = static_cast<double>(denominator);
            return (cd * t) /
                   (static_cast<double>(d.token_total()) * static_cast<double>(denominator + smoothed_items));
        }
    }
    return 0.0;
}

double fallback_value(NormalizationMode mode, std::uint64_t denominator,
                      std::uint64_t smoothed_items) {
    if (mode == NormalizationMode::Strict) {
        return 1.0 / static_cast<double>(denominator + smoothed_items);
    }
    return 1.0 / static_cast<double>(denominator);
}

static std::vector<ItemId> outside_both(const CountDistribution& p, const CountDistribution& q,
                                        std::span<const ItemId> alphabet) {
    std::vector<ItemId> out;
    std::size_t matched = 0;
    for (const auto& w : alphabet) {
        if (p.contains(w) || q.contains(w)) {
            ++matched;
        } else {
            out.push_back(w);
        }
    }
    const PairRegions regions = pair_regions(p, q);
    const std::size_t union_size =
        regions.only_first.size() + regions.both.size() + regions.only_second.size();
    if (matched != union_size || !std::is_sorted(alphabet.begin(), alphabet.end()) ||
        std::adjacent_find(alphabet.begin(), alphabet.end()) != alphabet.end()) {
        throw Error(ErrorKind::InvalidContext,
                    "alphabet must be sorted, duplicate-free and cover both supports");
    }
    return out;
}

SegmentedTable build_pair_table(const CountDistribution& p, const CountDistribution& q,
                                const SmoothingContext& ctx, bool include_only_second,
                                std::span<const ItemId> alphabet) {
    if (ctx.denominator == 0) throw Error(ErrorKind::InvalidContext, "denominator must be >= 1");

    const PairRegions regions = pair_regions(p, q);
    const bool with_neither = include_only_second && !alphabet.empty();
    const std::vector<ItemId> neither =
        alphabet.empty() ? std::vector<ItemId>{} : outside_both(p, q, alphabet);
    const std::uint64_t extra = with_neither ? neither.size() : 0;
    const std::uint64_t p_smoothed =
        (include_only_second ? regions.only_second.size() : 0) + extra;
    const std::uint64_t q_smoothed = regions.only_first.size() + extra;
    const std::uint64_t T = ctx.denominator;

    SegmentedTable table;
    table.sizes = {regions.only_first.size(), regions.both.size(),
                   include_only_second ? regions.only_second.size() : 0, extra};
    table.has_neither = with_neither;
    const std::size_t n = table.sizes[0] + table.sizes[1] + table.sizes[2] + table.sizes[3];
    table.first.reserve(n);
    table.second.reserve(n);

    const double p_fallback = fallback_value(ctx.mode, T, p_smoothed);
    const double q_fallback = fallback_value(ctx.mode, T, q_smoothed);

    for (const auto& w : regions.only_first) {
        table.first.push_back(own_value(p.count(w), p, ctx.mode, T, p_smoothed));
        table.second.push_back(q_fallback);
    }
    for (const auto& w : regions.both) {
        table.first.push_back(own_value(p.count(w), p, ctx.mode, T, p_smoothed));
        table.second.push_back(own_value(q.count(w), q, ctx.mode, T, q_smoothed));
    }
    if (include_only_second) {
        for (const auto& w : regions.only_second) {
            table.first.push_back(p_fallback);
            table.second.push_back(own_value(q.count(w), q, ctx.mode, T, q_smoothed));
        }
    }
    if (with_neither) {
        table.first.insert(table.first.end(), neither.size(), p_fallback);
        table.second.insert(table.second.end(), neither.size(), q_fallback);
    }
    return table;
}

RegionTerms sum_segments(DivergenceKind kind, const SegmentedTable& table,
                         bool include_only_second) {
    const auto& k = kernels::active();
    auto run = [&](std::size_t seg) {
        auto a = table.first_segment(seg);
        auto b = table.second_segment(seg);
        if (kind == DivergenceKind::KL) return k.xlog_ratio_sum(a.data(), b.data(), a.size());
        return 0.5 * k.js_term_sum(a.data(), b.data(), a.size());
    };
    RegionTerms terms;
    terms.only_first = run(0);
    terms.both = run(1);
    if (include_only_second) terms.only_second = run(2);
    if (table.has_neither) terms.neither = run(3);
    return terms;
}

}  // namespace detail

static DivergenceReport make_report(DivergenceKind kind, const CountDistribution& p,
                                    const CountDistribution& q, const SmoothingContext& ctx,
                                    std::span<const ItemId> alphabet = {}) {
    const bool with_second = kind == DivergenceKind::JS || ctx.mode == NormalizationMode::Strict;
    const detail::SegmentedTable table = detail::build_pair_table(p, q, ctx, with_second, alphabet);

    if (kind == DivergenceKind::KL) {
        for (double v : table.second) {
            if (!(v > 0.0)) {
                throw Error(ErrorKind::DivisionByZero,
                            "q_w = 0 in KL('" + p.label() + "' || '" + q.label() + "')");
            }
        }
    }

    DivergenceReport report;
    report.kind = kind;
    report.region_terms = detail::sum_segments(kind, table, with_second);
    report.value = report.region_terms.total();
    report.context = ctx;
    report.first_label = p.label();
    report.second_label = q.label();
    report.support_size = table.size();
    return report;
}

DivergenceReport kl(const CountDistribution& p, const CountDistribution& q,
                    const SmoothingContext& ctx) {
    return make_report(DivergenceKind::KL, p, q, ctx);
}

DivergenceReport js(const CountDistribution& p, const CountDistribution& q,
                    const SmoothingContext& ctx) {
    return make_report(DivergenceKind::JS, p, q, ctx);
}

DivergenceReport divergence(DivergenceKind kind, const CountDistribution& p,
                            const CountDistribution& q, const SmoothingContext& ctx) {
    return make_report(kind, p, q, ctx);
}

DivergenceReport divergence_over(DivergenceKind kind, const CountDistribution& p,
                                 const CountDistribution& q, const SmoothingContext& ctx,
                                 std::span<const ItemId> alphabet) {
    if (alphabet.empty()) throw Error(ErrorKind::InvalidContext, "alphabet must be non-empty");
    return make_report(kind, p, q, ctx, alphabet);
}

bool indiscernible(const CountDistribution& a, const CountDistribution& b,
                   NormalizationMode mode) {
    auto ea = a.entries();
    auto eb = b.entries();
    if (ea.size() != eb.size()) return false;
    __extension__ typedef unsigned __int128 wide;
    for (std::size_t i = 0; i < ea.size(); ++i) {
        if (ea[i].item != eb[i].item) return false;
        if (mode == NormalizationMode::PaperLiteral) {
            if (ea[i].count != eb[i].count) return false;
        } else if (wide(ea[i].count) * b.token_total() != wide(eb[i].count) * a.token_total()) {
            return false;
        }
    }
    return true;
}

// Metric axioms ---------------------------------------------------------------

std::string_view to_string(MetricAxiom axiom) noexcept {
    switch (axiom) {
        case MetricAxiom::NonNegativity: return "non-negativity";
        case MetricAxiom::Identity: return "identity of indiscernibles";
        case MetricAxiom::Symmetry: return "symmetry";
        case MetricAxiom::TriangleInequality: return "triangle inequality";
    }
    return "unknown";
}

bool AxiomReport::all_passed() const noexcept {
    for (const auto& o : outcomes) {
        if (!o.passed) return false;
    }
    return true;
}

template <typename Dist>
static AxiomReport check_axioms(const Dist& d, std::span<const DistributionTriple> samples,
                                double tolerance, NormalizationMode equality_mode) {
    AxiomReport report;
    for (auto axiom : {MetricAxiom::NonNegativity, MetricAxiom::Identity, MetricAxiom::Symmetry,
                       MetricAxiom::TriangleInequality}) {
        report.outcomes.push_back({axiom, true, 0, std::nullopt});
    }

    auto record = [&](MetricAxiom axiom, bool ok, std::size_t index, auto&& describe) {
        auto& o = report.outcomes[static_cast<std::size_t>(axiom)];
        ++o.checks;
        if (!ok && o.passed) {
            o.passed = false;
            o.witness = AxiomWitness{index, describe()};
        }
    };
    auto fmt = [](const char* what, double lhs, double rhs) {
        std::ostringstream os;
        os.precision(17);
        os << what << ": " << lhs << " vs " << rhs;
        return os.str();
    };

    for (std::size_t i = 0; i < samples.size(); ++i) {
        const std::array<const CountDistribution*, 3> t{&samples[i].x, &samples[i].y,
                                                        &samples[i].z};
        // dist[a][b] = d(t[a], t[b])
        double dist[3][3];
        for (std::size_t a = 0; a < 3; ++a) {
            for (std::size_t b = 0; b < 3; ++b) dist[a][b] = d(*t[a], *t[b], samples[i]);
        }

        for (std::size_t a = 0; a < 3; ++a) {
            for (std::size_t b = 0; b < 3; ++b) {
                record(MetricAxiom::NonNegativity, dist[a][b] >= -tolerance, i,
                       [&] { return fmt("d < 0", dist[a][b], 0.0); });

                const bool same = a == b || indiscernible(*t[a], *t[b], equality_mode);
                const bool ok = same ? dist[a][b] <= tolerance : dist[a][b] > tolerance;
                record(MetricAxiom::Identity, ok, i, [&] {
                    return fmt(same ? "equal inputs, d > tol" : "distinct inputs, d <= tol",
                               dist[a][b], tolerance);
                });

                if (a < b) {
                    record(MetricAxiom::Symmetry, std::fabs(dist[a][b] - dist[b][a]) <= tolerance,
                           i, [&] { return fmt("d(x,y) != d(y,x)", dist[a][b], dist[b][a]); });
                }
            }
        }

        // d(a,c) <= d(a,b) + d(b,c) for every assignment of the three points.
        for (std::size_t a = 0; a < 3; ++a) {
            for (std::size_t b = 0; b < 3; ++b) {
                for (std::size_t c = 0; c < 3; ++c) {
                    if (a == b || b == c || a == c) continue;
                    const double rhs = dist[a][b] + dist[b][c];
                    record(MetricAxiom::TriangleInequality, dist[a][c] <= rhs + tolerance, i,
                           [&] { return fmt("d(x,z) > d(x,y) + d(y,z)", dist[a][c], rhs); });
                }
            }
        }
    }
    return report;
}

AxiomReport metric_axiom_check(const DistanceFn& d, std::span<const DistributionTriple> samples,
                               double tolerance, NormalizationMode equality_mode) {
    auto bound = [&](const CountDistribution& a, const CountDistribution& b,
                     const DistributionTriple&) { return d(a, b); };
    return check_axioms(bound, samples, tolerance, equality_mode);
}

AxiomReport metric_axiom_check(const TripleDistanceFn& d,
                               std::span<const DistributionTriple> samples, double tolerance,
                               NormalizationMode equality_mode) {
    return check_axioms(d, samples, tolerance, equality_mode);
}

}  // namespace trivergence
