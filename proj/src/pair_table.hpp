// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "trivergence/distribution.hpp"
#include "trivergence/divergence.hpp"

namespace trivergence::detail {

/// Probabilities of two sides laid out over the evaluation support as
/// contiguous segments: [only first][both][only second][neither]. Each segment
/// is in item order. The last one exists only over a fixed alphabet.
struct SegmentedTable {
    std::vector<double> first;
    std::vector<double> second;
    std::array<std::size_t, 4> sizes{0, 0, 0, 0};
    bool has_neither = false;

    std::span<const double> first_segment(std::size_t k) const { return slice(first, k); }
    std::span<const double> second_segment(std::size_t k) const { return slice(second, k); }
    std::size_t size() const noexcept { return first.size(); }

private:
    std::span<const double> slice(const std::vector<double>& v, std::size_t k) const {
        std::size_t offset = 0;
        for (std::size_t i = 0; i < k; ++i) offset += sizes[i];
        return std::span<const double>(v).subspan(offset, sizes[k]);
    }
};

/// Value of an item present in `d` with count `c` under `mode`. For Strict,
/// `smoothed_items` is the number of items of the evaluation support that
/// this side fills with the 1/T fallback; c/N and k/T are renormalized
/// jointly as c·T / (N·(T + k)).
double own_value(std::uint64_t c, const CountDistribution& d, NormalizationMode mode,
                 std::uint64_t denominator, std::uint64_t smoothed_items);

/// The 1/T fallback, or 1/(T + k) after Strict renormalization.
double fallback_value(NormalizationMode mode, std::uint64_t denominator,
                      std::uint64_t smoothed_items);

/// Builds the table for divergence(p, q). `include_only_second` adds the
/// q \ p segment (JS always, KL in Strict mode). A non-empty `alphabet` also
/// adds the items outside both supports, smoothed on both sides.
SegmentedTable build_pair_table(const CountDistribution& p, const CountDistribution& q,
                                const SmoothingContext& ctx, bool include_only_second,
                                std::span<const ItemId> alphabet = {});

/// Runs the kernel of `kind` on each segment. The JS ½ factor is applied per
/// segment.
RegionTerms sum_segments(DivergenceKind kind, const SegmentedTable& table,
                         bool include_only_second);

}  // namespace trivergence::detail
