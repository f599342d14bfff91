// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trivergence/distribution.hpp"

namespace trivergence {

enum class DivergenceKind { KL, JS };

std::string_view to_string(DivergenceKind kind) noexcept;

/// Partial sums of a divergence over the pair regions. `only_second` is empty
/// for KL outside Strict mode, where the sum runs over the first support only.
/// `neither` is set only for evaluations over a fixed alphabet larger than the
/// union of the two supports.
struct RegionTerms {
    double only_first = 0.0;
    double both = 0.0;
    std::optional<double> only_second;
    std::optional<double> neither;

    /// Combined as both + (only_first + only_second) + neither, which is
    /// invariant under swapping the first and second regions.
    double total() const noexcept {
        return both + (only_first + only_second.value_or(0.0)) + neither.value_or(0.0);
    }
};

/// Divergence value in bits together with its per-region breakdown.
struct DivergenceReport {
    DivergenceKind kind = DivergenceKind::KL;
    double value = 0.0;
    RegionTerms region_terms;
    SmoothingContext context;
    std::string first_label;
    std::string second_label;
    /// Number of items the sum ran over.
    std::size_t support_size = 0;
};

/// Σ_w p_w log2(p_w / q_w) with q smoothed. Outside Strict mode w ranges over
/// support(p); in Strict mode both sides are renormalized over
/// support(p) ∪ support(q) and the sum covers that union.
DivergenceReport kl(const CountDistribution& p, const CountDistribution& q,
                    const SmoothingContext& ctx);

/// ½ Σ_w [p_w log2(2p_w/(p_w+q_w)) + q_w log2(2q_w/(p_w+q_w))] over
/// support(p) ∪ support(q), each side smoothed where it is absent.
DivergenceReport js(const CountDistribution& p, const CountDistribution& q,
                    const SmoothingContext& ctx);

DivergenceReport divergence(DivergenceKind kind, const CountDistribution& p,
                            const CountDistribution& q, const SmoothingContext& ctx);

/// Same sums over a caller-fixed alphabet (sorted, containing both supports).
/// Items outside both supports take the fallback on both sides, and in Strict
/// mode each side is renormalized over the whole alphabet, so a distribution
/// is smoothed identically whatever its partner. Outside Strict mode KL still
/// sums over support(p). Throws InvalidContext if the alphabet misses an item
/// of either support.
DivergenceReport divergence_over(DivergenceKind kind, const CountDistribution& p,
                                 const CountDistribution& q, const SmoothingContext& ctx,
                                 std::span<const ItemId> alphabet);

/// True when the two distributions induce the same probabilities under `mode`:
/// identical counts for PaperLiteral, proportional counts otherwise.
bool indiscernible(const CountDistribution& a, const CountDistribution& b,
                   NormalizationMode mode);

// Metric axiom checks --------------------------------------------------------

using DistanceFn = std::function<double(const CountDistribution&, const CountDistribution&)>;

struct DistributionTriple {
    CountDistribution x;
    CountDistribution y;
    CountDistribution z;
};

/// A distance that may depend on the sample it is evaluated in, e.g. through
/// the triple's shared alphabet and smoothing denominator.
using TripleDistanceFn = std::function<double(const CountDistribution&, const CountDistribution&,
                                              const DistributionTriple&)>;

enum class MetricAxiom { NonNegativity, Identity, Symmetry, TriangleInequality };

std::string_view to_string(MetricAxiom axiom) noexcept;

struct AxiomWitness {
    std::size_t sample_index = 0;
    std::string detail;
};

struct AxiomOutcome {
    MetricAxiom axiom;
    bool passed = true;
    std::size_t checks = 0;
    std::optional<AxiomWitness> witness;  // first failure
};

struct AxiomReport {
    std::vector<AxiomOutcome> outcomes;  // one per MetricAxiom, in enum order

    const AxiomOutcome& operator[](MetricAxiom a) const {
        return outcomes.at(static_cast<std::size_t>(a));
    }
    bool all_passed() const noexcept;
};

/// Evaluates the four metric axioms on every sample triple. Identity uses
/// `indiscernible(.., equality_mode)` to decide which pairs must be at distance 0.
AxiomReport metric_axiom_check(const DistanceFn& d, std::span<const DistributionTriple> samples,
                               double tolerance,
                               NormalizationMode equality_mode = NormalizationMode::Strict);
AxiomReport metric_axiom_check(const TripleDistanceFn& d,
                               std::span<const DistributionTriple> samples, double tolerance,
                               NormalizationMode equality_mode = NormalizationMode::Strict);

}  // namespace trivergence
