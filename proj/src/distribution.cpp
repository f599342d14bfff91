// SPDX-License-Identifier: Apache-2.0

#include "trivergence/distribution.hpp"

#include <algorithm>
#include <map>

#include "trivergence/error.hpp"

namespace trivergence {

ItemId::ItemId(std::string text) : text_(std::move(text)) {
    if (text_.empty()) throw Error(ErrorKind::InvalidItem, "item text must be non-empty");
}

std::string_view to_string(NormalizationMode mode) noexcept {
    switch (mode) {
        case NormalizationMode::PaperLiteral: return "paper-literal";
        case NormalizationMode::TokenNormalized: return "token";
        case NormalizationMode::Strict: return "strict";
    }
    return "unknown";
}

std::string_view to_string(DenominatorPolicy policy) noexcept {
    switch (policy) {
        case DenominatorPolicy::PairSum: return "pair-sum";
        case DenominatorPolicy::TripletUnion: return "triplet-union";
        case DenominatorPolicy::Explicit: return "explicit";
    }
    return "unknown";
}

// CountDistribution -----------------------------------------------------------

CountDistribution CountDistribution::from_counts(
    std::span<const std::pair<std::string, std::int64_t>> entries, std::string label) {
    if (entries.empty()) throw Error(ErrorKind::EmptyDistribution, "no entries");

    std::map<std::string, std::uint64_t> merged;
    for (const auto& [text, count] : entries) {
        if (count <= 0) {
            throw Error(ErrorKind::InvalidCount,
                        "count for '" + text + "' is " + std::to_string(count));
        }
        if (text.empty()) throw Error(ErrorKind::InvalidItem, "item text must be non-empty");
        merged[text] += static_cast<std::uint64_t>(count);
    }

    CountDistribution d;
    d.label_ = std::move(label);
    d.entries_.reserve(merged.size());
    for (auto& [text, count] : merged) {
        d.token_total_ += count;
        d.entries_.push_back({ItemId(text), count});
    }
    return d;
}

CountDistribution CountDistribution::from_counts(
    std::initializer_list<std::pair<std::string, std::int64_t>> entries, std::string label) {
    return from_counts(std::span(entries.begin(), entries.size()), std::move(label));
}

static auto find_entry(std::span<const CountEntry> entries, const ItemId& item) {
    auto it = std::lower_bound(entries.begin(), entries.end(), item,
                               [](const CountEntry& e, const ItemId& w) { return e.item < w; });
    return (it != entries.end() && it->item == item) ? it : entries.end();
}

bool CountDistribution::contains(const ItemId& item) const noexcept {
    return find_entry(entries_, item) != std::span<const CountEntry>(entries_).end();
}

std::uint64_t CountDistribution::count(const ItemId& item) const noexcept {
    std::span<const CountEntry> all(entries_);
    auto it = find_entry(all, item);
    return it == all.end() ? 0 : it->count;
}

// Smoothing -------------------------------------------------------------------

SmoothingContext SmoothingContext::pair_sum(const CountDistribution& p, const CountDistribution& q,
                                            NormalizationMode mode) {
    return {mode, p.distinct_count() + q.distinct_count(), DenominatorPolicy::PairSum};
}

SmoothingContext SmoothingContext::triplet_union(const CountDistribution& p,
                                                 const CountDistribution& q,
                                                 const CountDistribution& r,
                                                 NormalizationMode mode) {
    return {mode, triplet_regions(p, q, r).total_size(), DenominatorPolicy::TripletUnion};
}

SmoothingContext SmoothingContext::explicit_denominator(std::uint64_t denominator,
                                                        NormalizationMode mode) {
    if (denominator == 0) throw Error(ErrorKind::InvalidContext, "denominator must be >= 1");
    return {mode, denominator, DenominatorPolicy::Explicit};
}

double probability(const CountDistribution& d, const ItemId& w, NormalizationMode mode) {
    const std::uint64_t c = d.count(w);
    if (c == 0) {
        throw Error(ErrorKind::NotInSupport, "'" + w.text() + "' not in '" + d.label() + "'");
    }
    switch (mode) {
        case NormalizationMode::PaperLiteral:
            return static_cast<double>(c) / static_cast<double>(d.distinct_count());
        case NormalizationMode::TokenNormalized:
        case NormalizationMode::Strict:
            return static_cast<double>(c) / static_cast<double>(d.token_total());
    }
    return 0.0;
}

double smoothed_value(const CountDistribution& d, const ItemId& w, const SmoothingContext& ctx) {
    if (ctx.denominator == 0) throw Error(ErrorKind::InvalidContext, "denominator must be >= 1");
    if (!d.contains(w)) return 1.0 / static_cast<double>(ctx.denominator);
    return probability(d, w, ctx.mode);
}

// Regions ---------------------------------------------------------------------

PairRegions pair_regions(const CountDistribution& p, const CountDistribution& q) {
    PairRegions out;
    auto a = p.entries();
    auto b = q.entries();
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].item < b[j].item)) {
            out.only_first.push_back(a[i++].item);
        } else if (i == a.size() || b[j].item < a[i].item) {
            out.only_second.push_back(b[j++].item);
        } else {
            out.both.push_back(a[i].item);
            ++i;
            ++j;
        }
    }
    return out;
}

std::string_view to_string(TripletRegion region) noexcept {
    switch (region) {
        case TripletRegion::POnly: return "p_only";
        case TripletRegion::PRNotQ: return "pr_not_q";
        case TripletRegion::PQNotR: return "pq_not_r";
        case TripletRegion::PQR: return "pqr";
        case TripletRegion::QOnly: return "q_only";
        case TripletRegion::QRNotP: return "qr_not_p";
        case TripletRegion::ROnly: return "r_only";
    }
    return "unknown";
}

std::size_t TripletRegions::total_size() const noexcept {
    std::size_t n = 0;
    for (const auto& s : sets) n += s.size();
    return n;
}

static TripletRegion region_of(bool in_p, bool in_q, bool in_r) {
    if (in_p && in_q && in_r) return TripletRegion::PQR;
    if (in_p && in_q) return TripletRegion::PQNotR;
    if (in_p && in_r) return TripletRegion::PRNotQ;
    if (in_p) return TripletRegion::POnly;
    if (in_q && in_r) return TripletRegion::QRNotP;
    if (in_q) return TripletRegion::QOnly;
    return TripletRegion::ROnly;
}

TripletRegions triplet_regions(const CountDistribution& p, const CountDistribution& q,
                               const CountDistribution& r) {
    TripletRegions out;
    std::array<std::span<const CountEntry>, 3> src{p.entries(), q.entries(), r.entries()};
    std::array<std::size_t, 3> pos{0, 0, 0};

    // Three-way merge over the sorted supports.
    for (;;) {
        const ItemId* next = nullptr;
        for (std::size_t k = 0; k < 3; ++k) {
            if (pos[k] < src[k].size() && (!next || src[k][pos[k]].item < *next)) {
                next = &src[k][pos[k]].item;
            }
        }
        if (!next) break;
        std::array<bool, 3> in{};
        for (std::size_t k = 0; k < 3; ++k) {
            in[k] = pos[k] < src[k].size() && src[k][pos[k]].item == *next;
        }
        out[region_of(in[0], in[1], in[2])].push_back(*next);
        for (std::size_t k = 0; k < 3; ++k) pos[k] += in[k] ? 1 : 0;
    }
    return out;
}

std::vector<ItemId> support_union(const CountDistribution& p, const CountDistribution& q,
                                  const CountDistribution& r) {
    std::vector<ItemId> out;
    for (auto& set : triplet_regions(p, q, r).sets) {
        out.insert(out.end(), std::make_move_iterator(set.begin()), std::make_move_iterator(set.end()));
    }
    std::sort(out.begin(), out.end());
    return out;
}

ZeroPattern zero_pattern(TripletRegion region) noexcept {
    switch (region) {
        case TripletRegion::POnly: return {false, true, true};
        case TripletRegion::PRNotQ: return {false, true, false};
        case TripletRegion::PQNotR: return {false, false, true};
        case TripletRegion::PQR: return {false, false, false};
        case TripletRegion::QOnly: return {true, false, true};
        case TripletRegion::QRNotP: return {true, false, false};
        case TripletRegion::ROnly: return {true, true, false};
    }
    return {};
}

// Canonical ordering ----------------------------------------------------------

static bool precedes(const CountDistribution& a, const CountDistribution& b) {
    if (a.distinct_count() != b.distinct_count()) return a.distinct_count() > b.distinct_count();
    if (a.token_total() != b.token_total()) return a.token_total() > b.token_total();
    if (a.label() != b.label()) return a.label() < b.label();
    auto ea = a.entries();
    auto eb = b.entries();
    return std::lexicographical_compare(
        ea.begin(), ea.end(), eb.begin(), eb.end(), [](const CountEntry& x, const CountEntry& y) {
            if (x.item != y.item) return x.item < y.item;
            return x.count > y.count;
        });
}

CanonicalOrder canonical_order(const CountDistribution& p, const CountDistribution& q,
                               const CountDistribution& r) {
    std::array<std::reference_wrapper<const CountDistribution>, 3> in{std::cref(p), std::cref(q),
                                                                     std::cref(r)};
    std::array<std::size_t, 3> perm{0, 1, 2};
    std::stable_sort(perm.begin(), perm.end(),
                     [&](std::size_t a, std::size_t b) { return precedes(in[a], in[b]); });

    CanonicalOrder out{{in[perm[0]], in[perm[1]], in[perm[2]]}, perm, {false, false}};
    for (std::size_t i = 0; i < 2; ++i) {
        out.tie[i] = out.ordered[i].get().distinct_count() == out.ordered[i + 1].get().distinct_count();
    }
    return out;
}

}  // namespace trivergence
