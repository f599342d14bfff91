// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace trivergence {

/// An item of a distribution: a token, an n-gram or any caller-defined
/// feature. Identity is byte equality of the UTF-8 text.
class ItemId {
public:
    explicit ItemId(std::string text);

    const std::string& text() const noexcept { return text_; }

    friend bool operator==(const ItemId&, const ItemId&) = default;
    friend std::strong_ordering operator<=>(const ItemId& a, const ItemId& b) noexcept {
        return a.text_.compare(b.text_) <=> 0;
    }

private:
    std::string text_;
};

/// How raw counts become probabilities.
///  - PaperLiteral:    count / number of distinct items (need not sum to 1)
///  - TokenNormalized: count / total number of tokens
///  - Strict:          token-normalized, then jointly renormalized together
///                     with the smoothing mass over the evaluation support
enum class NormalizationMode { PaperLiteral, TokenNormalized, Strict };

enum class DenominatorPolicy { PairSum, TripletUnion, Explicit };

std::string_view to_string(NormalizationMode mode) noexcept;
std::string_view to_string(DenominatorPolicy policy) noexcept;

struct CountEntry {
    ItemId item;
    std::uint64_t count;

    friend bool operator==(const CountEntry&, const CountEntry&) = default;
};

/// Discrete count distribution over items. Entries are kept sorted by item and
/// every stored count is at least 1. Immutable once built.
class CountDistribution {
public:
    /// Accumulates duplicate items. Throws InvalidCount for a count of zero,
    /// EmptyDistribution for an empty list and InvalidItem for empty text.
    static CountDistribution from_counts(
        std::span<const std::pair<std::string, std::int64_t>> entries,
        std::string label = {});
    static CountDistribution from_counts(
        std::initializer_list<std::pair<std::string, std::int64_t>> entries,
        std::string label = {});

    const std::string& label() const noexcept { return label_; }
    std::span<const CountEntry> entries() const noexcept { return entries_; }

    /// |p|: number of distinct items.
    std::uint64_t distinct_count() const noexcept { return entries_.size(); }
    std::uint64_t token_total() const noexcept { return token_total_; }

    bool contains(const ItemId& item) const noexcept;
    /// 0 when the item is absent.
    std::uint64_t count(const ItemId& item) const noexcept;

    friend bool operator==(const CountDistribution& a, const CountDistribution& b) {
        return a.label_ == b.label_ && a.entries_ == b.entries_;
    }

private:
    CountDistribution() = default;

    std::string label_;
    std::vector<CountEntry> entries_;
    std::uint64_t token_total_ = 0;
};

/// The smoothing rule: items absent from a distribution get 1/denominator.
struct SmoothingContext {
    NormalizationMode mode = NormalizationMode::PaperLiteral;
    std::uint64_t denominator = 1;
    DenominatorPolicy policy = DenominatorPolicy::Explicit;

    /// |p| + |q|
    static SmoothingContext pair_sum(const CountDistribution& p, const CountDistribution& q,
                                     NormalizationMode mode);
    /// |p ∪ q ∪ r|
    static SmoothingContext triplet_union(const CountDistribution& p,
                                          const CountDistribution& q,
                                          const CountDistribution& r, NormalizationMode mode);
    /// Throws InvalidContext when denominator is 0.
    static SmoothingContext explicit_denominator(std::uint64_t denominator,
                                                 NormalizationMode mode);

    friend bool operator==(const SmoothingContext&, const SmoothingContext&) = default;
};

/// Probability of an item in its own support. Strict returns the
/// token-normalized value; joint renormalization happens where the evaluation
/// support is known. Throws NotInSupport.
double probability(const CountDistribution& d, const ItemId& w, NormalizationMode mode);

/// probability() inside the support, 1/denominator outside it.
double smoothed_value(const CountDistribution& d, const ItemId& w, const SmoothingContext& ctx);

struct PairRegions {
    std::vector<ItemId> only_first;   // p \ q
    std::vector<ItemId> both;         // p ∩ q
    std::vector<ItemId> only_second;  // q \ p
};

PairRegions pair_regions(const CountDistribution& p, const CountDistribution& q);

enum class TripletRegion : std::uint8_t {
    POnly,    // p \ (q ∪ r)
    PRNotQ,   // (p ∩ r) \ q
    PQNotR,   // (p ∩ q) \ r
    PQR,      // p ∩ q ∩ r
    QOnly,    // q \ (p ∪ r)
    QRNotP,   // (q ∩ r) \ p
    ROnly,    // r \ (p ∪ q)
};

inline constexpr std::array<TripletRegion, 7> kTripletRegions = {
    TripletRegion::POnly,  TripletRegion::PRNotQ, TripletRegion::PQNotR, TripletRegion::PQR,
    TripletRegion::QOnly,  TripletRegion::QRNotP, TripletRegion::ROnly,
};

std::string_view to_string(TripletRegion region) noexcept;

struct TripletRegions {
    std::array<std::vector<ItemId>, 7> sets;

    std::vector<ItemId>& operator[](TripletRegion r) { return sets[static_cast<std::size_t>(r)]; }
    const std::vector<ItemId>& operator[](TripletRegion r) const {
        return sets[static_cast<std::size_t>(r)];
    }
    std::size_t total_size() const noexcept;
};

TripletRegions triplet_regions(const CountDistribution& p, const CountDistribution& q,
                               const CountDistribution& r);

/// support(p) ∪ support(q) ∪ support(r), sorted.
std::vector<ItemId> support_union(const CountDistribution& p, const CountDistribution& q,
                                  const CountDistribution& r);

/// Which of p_w, q_w, r_w vanish (before smoothing) inside a region.
struct ZeroPattern {
    bool p_zero = false;
    bool q_zero = false;
    bool r_zero = false;

    friend bool operator==(const ZeroPattern&, const ZeroPattern&) = default;
};

ZeroPattern zero_pattern(TripletRegion region) noexcept;

/// Triple reordered so distinct counts are non-increasing.
struct CanonicalOrder {
    std::array<std::reference_wrapper<const CountDistribution>, 3> ordered;
    /// permutation[i] is the input position now at position i.
    std::array<std::size_t, 3> permutation;
    /// tie[i]: positions i and i+1 have equal distinct counts and were ordered
    /// by the tie-break rule.
    std::array<bool, 2> tie;

    bool is_identity() const noexcept { return permutation == std::array<std::size_t, 3>{0, 1, 2}; }
};

/// Sorts by distinct count desc, then token total desc, then label asc, then
/// contents. Stable, so fully identical inputs keep their input order.
CanonicalOrder canonical_order(const CountDistribution& p, const CountDistribution& q,
                               const CountDistribution& r);

}  // namespace trivergence
