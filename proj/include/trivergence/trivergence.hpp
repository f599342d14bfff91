// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trivergence/distribution.hpp"
#include "trivergence/divergence.hpp"

namespace trivergence {

enum class TrivergenceForm { Product, Compound };

/// Normalizer of the JS compound scalar: |q ∪ r| or |q| + |r|.
enum class QrNormalizer { Union, CardinalitySum };

std::string_view to_string(TrivergenceForm form) noexcept;
std::string_view to_string(QrNormalizer n) noexcept;

struct TrivergenceOptions {
    NormalizationMode mode = NormalizationMode::PaperLiteral;
    QrNormalizer qr_normalizer = QrNormalizer::Union;
    /// Replaces the |p ∪ q ∪ r| smoothing denominator when set.
    std::optional<std::uint64_t> explicit_denominator{};
};

/// Argument role inside a triple: the distribution at position 0, 1 or 2.
enum class Role : std::uint8_t { P = 0, Q = 1, R = 2 };

char role_name(Role role) noexcept;

struct RolePair {
    Role first;
    Role second;

    friend bool operator==(const RolePair&, const RolePair&) = default;
};

/// One composition of the product or compound form, e.g. D[p || D(q||r)].
struct VariantDescriptor {
    TrivergenceForm form = TrivergenceForm::Product;
    std::size_t index = 0;
    std::string text;
    /// Product: the three pairwise factors.
    std::array<RolePair, 3> factors{};
    /// Compound: the distribution argument and the inner divergence pair.
    Role outer = Role::P;
    RolePair inner{Role::Q, Role::R};
    /// Compound only: the scalar is the first argument of the outer divergence.
    bool scalar_first = false;
    bool evaluable = true;
};

struct CompoundComponents {
    DivergenceReport inner;
    /// inner.value / normalizer, recorded before any zero-branch substitution.
    double scalar = 0.0;
    std::uint64_t normalizer = 1;
    /// "distinct(q)" for KL, "union(q,r)" or "sum(q,r)" for JS.
    std::string normalizer_kind;
    /// scalar <= 0: every scalar slot took 1/|T| instead.
    bool zero_branch = false;
    /// Value actually used in the scalar slots.
    double effective_scalar = 0.0;
    /// Outer sum split as in RegionTerms: only_first = items of the outer
    /// distribution outside the scalar's support, both = shared items,
    /// only_second = scalar support outside the outer distribution (JS only).
    RegionTerms outer_terms;
    std::string outer_label;
};

struct TrivergenceResult {
    TrivergenceForm form = TrivergenceForm::Product;
    DivergenceKind base = DivergenceKind::KL;
    double value = 0.0;
    /// Product: the three factors in evaluation order.
    std::vector<DivergenceReport> factors;
    std::optional<CompoundComponents> compound;
    /// Input positions in evaluation order plus tie flags.
    std::array<std::size_t, 3> permutation{0, 1, 2};
    std::array<bool, 2> tie{false, false};
    std::array<std::string, 3> labels;  // in evaluation order
    SmoothingContext context;
    std::string variant;

    bool zero_branch() const noexcept { return compound && compound->zero_branch; }
    /// "bits^3" for products, "bits" for compounds.
    std::string_view units() const noexcept;
};

/// D(p||q)·D(q||r)·D(p||r) after sorting the triple by distinct count.
TrivergenceResult triv_product(const CountDistribution& p, const CountDistribution& q,
                               const CountDistribution& r, DivergenceKind base,
                               const TrivergenceOptions& options = {});

/// D_KL[p || D_KL(q||r)/|q|] after canonical ordering.
TrivergenceResult triv_compound_kl(const CountDistribution& p, const CountDistribution& q,
                                   const CountDistribution& r,
                                   const TrivergenceOptions& options = {});

/// D_JS[p || D_JS(q||r)/|QR|] after canonical ordering.
TrivergenceResult triv_compound_js(const CountDistribution& p, const CountDistribution& q,
                                   const CountDistribution& r,
                                   const TrivergenceOptions& options = {});

TrivergenceResult triv_compound(const CountDistribution& p, const CountDistribution& q,
                                const CountDistribution& r, DivergenceKind base,
                                const TrivergenceOptions& options = {});

/// 2 descriptors for Product, 12 for Compound (6 of them evaluable).
std::vector<VariantDescriptor> enumerate_variants(TrivergenceForm form);

/// Evaluates one composition with the roles fixed by the descriptor; no
/// canonical reordering. Throws NotEvaluable for scalar-first compounds.
TrivergenceResult evaluate_variant(const VariantDescriptor& v, const CountDistribution& p,
                                   const CountDistribution& q, const CountDistribution& r,
                                   DivergenceKind base, const TrivergenceOptions& options = {});

}  // namespace trivergence
