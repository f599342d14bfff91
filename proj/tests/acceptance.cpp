// SPDX-License-Identifier: Apache-2.0

// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iterator>
#include <string>
#include <vector>

#include <json.hpp>

#include "support/cli_fixture.hpp"
#include "support/generators.hpp"
#include "trivergence/divergence.hpp"
#include "trivergence/error.hpp"
#include "trivergence/ingest.hpp"
#include "trivergence/oracle.hpp"
#include "trivergence/trivergence.hpp"

using namespace trivergence;
using namespace trivergence::testing;
namespace oracle = trivergence::verification;

namespace {

struct Outcome {
    bool passed = true;
    std::string detail;
};

bool rel_close(double a, double b, double rel) {
    return std::fabs(a - b) <= rel * std::max(std::fabs(a), std::fabs(b));
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// Records the first failure and keeps counting.
class Tally {
public:
    void check(bool ok, const std::function<std::string()>& what) {
        ++checks_;
        if (!ok && first_failure_.empty()) first_failure_ = what();
        failures_ += ok ? 0 : 1;
    }
    Outcome outcome(const std::string& summary) const {
        if (failures_ == 0) return {true, summary + ", " + std::to_string(checks_) + " checks"};
        return {false, std::to_string(failures_) + "/" + std::to_string(checks_) +
                           " checks failed; first: " + first_failure_};
    }

private:
    std::size_t checks_ = 0;
    std::size_t failures_ = 0;
    std::string first_failure_;
};

std::vector<DistributionTriple> random_triples(std::uint64_t seed, std::size_t n) {
    DistributionGenerator gen(seed);
    std::vector<DistributionTriple> out;
    for (std::size_t i = 0; i < n; ++i) {
        auto x = gen.next("x");
        const std::size_t roll = gen.uniform(0, 15);
        auto y = roll < 2    ? DistributionGenerator::relabel(x, "y")
                 : roll == 2 ? DistributionGenerator::scaled(x, 3, "y")
                             : gen.next("y");
        out.push_back({std::move(x), std::move(y), gen.next("z")});
    }
    return out;
}

// Criteria --------------------------------------------------------------------

Outcome oracle_equivalence() {
    Tally t;
    const auto start = std::chrono::steady_clock::now();
    for (auto mode : kAllModes) {
        DistributionGenerator gen(0xACC1 + static_cast<int>(mode));
        for (int i = 0; i < 1000; ++i) {
            auto [p, q] = gen.pair();
            const auto ctx = SmoothingContext::pair_sum(p, q, mode);
            const double k = kl(p, q, ctx).value;
            const double j = js(p, q, ctx).value;
            const auto ko = oracle::kl_direct(p, q, ctx);
            const auto jo = oracle::js_direct(p, q, ctx);
            t.check(oracle::relatively_close(k, ko, 1e-12), [&] {
                return "kl " + num(k) + " vs " + num(ko.to_double()) + " mode " + std::string(to_string(mode));
            });
            t.check(oracle::relatively_close(j, jo, 1e-12), [&] {
                return "js " + num(j) + " vs " + num(jo.to_double()) + " mode " + std::string(to_string(mode));
            });
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    t.check(secs < 10.0, [&] { return "runtime " + num(secs) + " s"; });
    return t.outcome("3000 pairs at 1e-12 relative in " + num(secs) + " s");
}

Outcome js_symmetry() {
    Tally t;
    double worst = 0.0;
    for (auto mode : kAllModes) {
        DistributionGenerator gen(0xACC2 + static_cast<int>(mode));
        for (int i = 0; i < 1000; ++i) {
            auto [p, q] = gen.pair();
            const auto ctx = SmoothingContext::pair_sum(p, q, mode);
            const double diff = std::fabs(js(p, q, ctx).value - js(q, p, ctx).value);
            worst = std::max(worst, diff);
            t.check(diff <= 1e-15, [&] { return "|js(p,q) - js(q,p)| = " + num(diff); });
        }
    }
    return t.outcome("worst difference " + num(worst));
}

Outcome sqrt_js_metricity() {
    const auto samples = random_triples(0xACC3, 1000);
    // Every distance in a triple is taken over the triple's shared alphabet and
    // |x ∪ y ∪ z| denominator, so each distribution has one smoothed form.
    TripleDistanceFn d = [](const CountDistribution& a, const CountDistribution& b,
                            const DistributionTriple& s) {
        const auto alphabet = support_union(s.x, s.y, s.z);
        const auto ctx = SmoothingContext::triplet_union(s.x, s.y, s.z, NormalizationMode::Strict);
        return std::sqrt(divergence_over(DivergenceKind::JS, a, b, ctx, alphabet).value);
    };
    const AxiomReport loose = metric_axiom_check(d, samples, 1e-9);
    const AxiomReport tight = metric_axiom_check(d, samples, 1e-12);

    Tally t;
    for (auto axiom : {MetricAxiom::NonNegativity, MetricAxiom::Symmetry,
                       MetricAxiom::TriangleInequality}) {
        const auto& o = loose[axiom];
        t.check(o.passed, [&] { return std::string(to_string(axiom)) + ": " + o.witness->detail; });
    }
    const auto& id = tight[MetricAxiom::Identity];
    t.check(id.passed, [&] { return "identity: " + id.witness->detail; });

    // Reported for context: per-pair union smoothing is not a fixed point set.
    DistanceFn pairwise = [](const CountDistribution& a, const CountDistribution& b) {
        return std::sqrt(js(a, b, SmoothingContext::pair_sum(a, b, NormalizationMode::Strict)).value);
    };
    std::size_t violations = 0;
    for (const auto& s : samples) {
        const DistributionTriple one[] = {s};
        violations += metric_axiom_check(pairwise, one, 1e-9)[MetricAxiom::TriangleInequality].passed ? 0 : 1;
    }
    return t.outcome("1000 triples over the shared triple alphabet (per-pair smoothing: " +
                     std::to_string(violations) + " triples break the triangle inequality)");
}

Outcome kl_asymmetry_witness() {
    const auto p = CountDistribution::from_counts({{"a", 2}, {"b", 1}, {"c", 1}}, "p");
    const auto q = CountDistribution::from_counts({{"a", 1}, {"b", 1}}, "q");
    const auto ctx = SmoothingContext::explicit_denominator(5, NormalizationMode::PaperLiteral);
    const double pq = kl(p, q, ctx).value;
    const double qp = kl(q, p, ctx).value;
    Tally t;
    t.check(oracle::relatively_close(pq, oracle::kl_direct(p, q, ctx), 1e-12),
            [&] { return "KL(p||q) off the oracle: " + num(pq); });
    t.check(oracle::relatively_close(qp, oracle::kl_direct(q, p, ctx), 1e-12),
            [&] { return "KL(q||p) off the oracle: " + num(qp); });
    t.check(std::fabs(pq - 0.32736) < 5e-6, [&] { return "KL(p||q) = " + num(pq); });
    t.check(std::fabs(qp - 0.08496) < 5e-6, [&] { return "KL(q||p) = " + num(qp); });
    return t.outcome("KL(p||q) = " + num(pq) + ", KL(q||p) = " + num(qp) + " bits");
}

Outcome strict_kl_nonnegativity() {
    DistributionGenerator gen(0xACC5);
    Tally t;
    std::size_t equal_pairs = 0;
    for (int i = 0; i < 1000; ++i) {
        auto [p, q] = gen.pair();
        const double v = kl(p, q, SmoothingContext::pair_sum(p, q, NormalizationMode::Strict)).value;
        const bool same = indiscernible(p, q, NormalizationMode::Strict);
        equal_pairs += same ? 1 : 0;
        t.check(v >= -1e-12, [&] { return "KL = " + num(v); });
        t.check((v <= 1e-12) == same, [&] {
            return std::string(same ? "equal" : "distinct") + " pair with KL = " + num(v);
        });
    }
    return t.outcome("1000 pairs, " + std::to_string(equal_pairs) + " equal");
}

Outcome seven_region_partition() {
    // Expected zero pattern of (p, q, r) per region, in region order.
    constexpr std::array<std::array<bool, 3>, 7> kExpected{{
        {false, true, true},    // p only
        {false, true, false},   // p and r, not q
        {false, false, true},   // p and q, not r
        {false, false, false},  // all three
        {true, false, true},    // q only
        {true, false, false},   // q and r, not p
        {true, true, false},    // r only
    }};
    Tally t;
    for (const auto& s : random_triples(0xACC6, 1000)) {
        const auto regions = triplet_regions(s.x, s.y, s.z);
        std::vector<ItemId> all;
        for (std::size_t k = 0; k < 7; ++k) {
            const ZeroPattern z = zero_pattern(kTripletRegions[k]);
            t.check(z.p_zero == kExpected[k][0] && z.q_zero == kExpected[k][1] &&
                        z.r_zero == kExpected[k][2],
                    [&] { return "zero pattern of " + std::string(to_string(kTripletRegions[k])); });
            for (const auto& w : regions.sets[k]) {
                all.push_back(w);
                t.check(s.x.contains(w) != z.p_zero && s.y.contains(w) != z.q_zero &&
                            s.z.contains(w) != z.r_zero,
                        [&] { return "'" + w.text() + "' misplaced in " +
                                     std::string(to_string(kTripletRegions[k])); });
            }
        }
        std::sort(all.begin(), all.end());
        t.check(std::adjacent_find(all.begin(), all.end()) == all.end(),
                [] { return std::string("regions overlap"); });
        t.check(all == support_union(s.x, s.y, s.z), [] { return std::string("regions miss items"); });
    }
    return t.outcome("1000 triples, disjoint, covering, patterns exact");
}

Outcome product_identity() {
    Tally t;
    for (auto mode : kAllModes) {
        TrivergenceOptions opts;
        opts.mode = mode;
        for (const auto& s : random_triples(0xACC7 + static_cast<int>(mode), 200)) {
            for (auto base : {DivergenceKind::KL, DivergenceKind::JS}) {
                const auto r = triv_product(s.x, s.y, s.z, base, opts);
                const double prod = r.factors[0].value * r.factors[1].value * r.factors[2].value;
                t.check(rel_close(r.value, prod, 1e-12) || r.value == prod,
                        [&] { return "product " + num(r.value) + " vs factors " + num(prod); });
            }
            const std::array<const CountDistribution*, 3> in{&s.x, &s.y, &s.z};
            std::array<int, 3> perm{0, 1, 2};
            const double ref = triv_product(s.x, s.y, s.z, DivergenceKind::JS, opts).value;
            do {
                const double v =
                    triv_product(*in[perm[0]], *in[perm[1]], *in[perm[2]], DivergenceKind::JS, opts).value;
                t.check(rel_close(v, ref, 1e-12) || v == ref,
                        [&] { return "JS product changes under permutation: " + num(v) + " vs " + num(ref); });
            } while (std::next_permutation(perm.begin(), perm.end()));
        }
    }
    return t.outcome("200 triples per mode, 6 orderings each");
}

Outcome compound_zero_branch() {
    DistributionGenerator gen(0xACC8);
    TrivergenceOptions strict;
    strict.mode = NormalizationMode::Strict;
    Tally t;
    for (int i = 0; i < 100; ++i) {
        // q = r is a proper sub-support of p, so p leads the canonical order and
        // |T| = |p|.
        CountDistribution p = gen.next("p");
        while (p.distinct_count() < 2) p = gen.next("p");
        std::vector<std::pair<std::string, std::int64_t>> sub;
        const std::size_t keep = gen.uniform(1, p.distinct_count() - 1);
        for (std::size_t k = 0; k < keep; ++k) {
            sub.emplace_back(p.entries()[k].item.text(), static_cast<std::int64_t>(gen.uniform(1, 50)));
        }
        const auto q = CountDistribution::from_counts(sub, "q");

        const auto res = triv_compound_kl(p, q, q, strict);
        const auto ref = oracle::trivergence_direct(TrivergenceForm::Compound, DivergenceKind::KL, p, q, q, strict);

        long double expected = 0.0L;
        const long double T = static_cast<long double>(p.distinct_count());
        for (const auto& e : p.entries()) {
            const long double px = static_cast<long double>(e.count) / static_cast<long double>(p.token_total());
            expected += px * std::log2(T * px);
        }
        t.check(res.zero_branch() && ref.zero_branch, [] { return std::string("zero branch not taken"); });
        t.check(res.permutation[0] == 0, [] { return std::string("p not first"); });
        t.check(oracle::relatively_close(res.value, ref, 1e-12),
                [&] { return "value " + num(res.value) + " vs oracle " + num(ref.to_double()); });
        t.check(rel_close(res.value, static_cast<double>(expected), 1e-12),
                [&] { return "value " + num(res.value) + " vs closed form " + num(static_cast<double>(expected)); });
    }
    return t.outcome("100 random p");
}

Outcome variant_counts() {
    const auto prod = enumerate_variants(TrivergenceForm::Product);
    const auto comp = enumerate_variants(TrivergenceForm::Compound);
    const auto evaluable = std::count_if(comp.begin(), comp.end(), [](const auto& v) { return v.evaluable; });
    Tally t;
    t.check(prod.size() == 2, [&] { return "product: " + std::to_string(prod.size()); });
    t.check(comp.size() == 12, [&] { return "compound: " + std::to_string(comp.size()); });
    t.check(evaluable == 6, [&] { return "evaluable: " + std::to_string(evaluable); });
    return t.outcome("2 product, 12 compound, 6 evaluable");
}

Outcome no_nan_or_inf() {
    DistributionGenerator small(0xACC9);
    DistributionGenerator wide(0xACCA, 60, 1'000'000'000);
    DistributionGenerator tiny(0xACCB, 2, 3);
    Tally t;
    std::size_t results = 0;
    auto finite = [&](double v, const char* what) {
        ++results;
        t.check(std::isfinite(v), [&] { return std::string(what) + " = " + num(v); });
    };
    for (int i = 0; i < 10000; ++i) {
        DistributionGenerator& g = i % 3 == 0 ? small : i % 3 == 1 ? wide : tiny;
        const auto p = g.next("p"), q = g.next("q"), r = g.next("r");
        const NormalizationMode mode = kAllModes[static_cast<std::size_t>(i) % 3];
        TrivergenceOptions opts;
        opts.mode = mode;
        opts.qr_normalizer = i % 2 ? QrNormalizer::Union : QrNormalizer::CardinalitySum;
        if (i % 7 == 0) opts.explicit_denominator = g.uniform(1, 100);

        const auto pair_ctx = SmoothingContext::pair_sum(p, q, mode);
        const auto tri_ctx = SmoothingContext::triplet_union(p, q, r, mode);
        const auto alphabet = support_union(p, q, r);
        for (auto base : {DivergenceKind::KL, DivergenceKind::JS}) {
            finite(divergence(base, p, q, pair_ctx).value, "divergence");
            finite(divergence(base, p, q, tri_ctx).value, "divergence (triplet)");
            finite(divergence_over(base, p, q, tri_ctx, alphabet).value, "divergence over alphabet");
            finite(triv_product(p, q, r, base, opts).value, "product");
            finite(triv_compound(p, q, r, base, opts).value, "compound");
        }
        for (const auto& v : enumerate_variants(TrivergenceForm::Compound)) {
            if (v.evaluable && i % 10 == 0) {
                finite(evaluate_variant(v, p, q, r, DivergenceKind::KL, opts).value, "variant");
            }
        }
    }
    return t.outcome("10000 inputs, " + std::to_string(results) + " results");
}

Outcome cli_round_trip() {
    using nlohmann::json;
    TempDir dir;
    DistributionGenerator gen(0xACCC);
    Tally t;
    std::size_t compared = 0;
    for (int i = 0; i < 50; ++i) {
        const std::array<std::string, 3> paths{dir.write_tsv("a.tsv", gen.next("a")),
                                               dir.write_tsv("b.tsv", gen.next("b")),
                                               dir.write_tsv("c.tsv", gen.next("c"))};
        // The library sees exactly what the CLI parses, labels included.
        std::vector<CountDistribution> d;
        for (const auto& path : paths) {
            std::ifstream in(path, std::ios::binary);
            const std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
            d.push_back(ingest::distribution_from_tsv(content, path));
        }
        for (auto mode : kAllModes) {
            const std::string m(to_string(mode));
            TrivergenceOptions opts;
            opts.mode = mode;
            for (auto base : {DivergenceKind::KL, DivergenceKind::JS}) {
                const std::string b(to_string(base));
                const auto div = run({"div", "--base", b, "--mode", m, paths[0], paths[1]});
                const double lib_div =
                    divergence(base, d[0], d[1], SmoothingContext::pair_sum(d[0], d[1], mode)).value;
                t.check(div.code == 0 && json::parse(div.out)["value_bits"].get<double>() == lib_div,
                        [&] { return "div " + b + " " + m + ": " + div.out.substr(0, 80); });
                for (auto form : {TrivergenceForm::Product, TrivergenceForm::Compound}) {
                    const std::string f(to_string(form));
                    const auto triv = run({"triv", "--form", f, "--base", b, "--mode", m, paths[0],
                                           paths[1], paths[2]});
                    const double lib = form == TrivergenceForm::Product
                                           ? triv_product(d[0], d[1], d[2], base, opts).value
                                           : triv_compound(d[0], d[1], d[2], base, opts).value;
                    t.check(triv.code == 0 && json::parse(triv.out)["value"].get<double>() == lib,
                            [&] { return "triv " + f + " " + b + " " + m; });
                    compared += 1;
                }
                compared += 1;
            }
        }
    }

    // Exit-code contract on crafted inputs.
    const auto good = dir.write("good.tsv", "a\t2\nb\t1\n");
    const auto other = dir.write("other.tsv", "a\t1\nc\t4\n");
    const auto zero = dir.write("zero.tsv", "a\t0\n");
    const auto negative = dir.write("negative.tsv", "a\t-3\n");
    const auto malformed = dir.write("malformed.tsv", "a\tx\n");
    const auto empty = dir.write("empty.txt", " ,;. ");
    const auto bad_utf8 = dir.write("bad.txt", "caf\xc3");
    const auto missing = (dir.path() / "missing.tsv").string();
    const std::vector<std::pair<std::vector<std::string>, int>> cases{
        {{"div", good, other}, 0},
        {{"triv", good, other, good}, 0},
        {{"matrix", good, other}, 0},
        {{"variants", "--form", "compound"}, 0},
        {{"div", good}, 1},
        {{"triv", good, other}, 1},
        {{"matrix", good}, 1},
        {{"div", "--base", "hellinger", good, other}, 1},
        {{"div", "--denom", "0", good, other}, 1},
        {{"triv", "--denom", "pair-sum", good, other, good}, 1},
        {{"unknown"}, 1},
        {{"div", good, missing}, 2},
        {{"div", good, dir.path().string()}, 2},
        {{"div", good, zero}, 3},
        {{"div", good, negative}, 3},
        {{"div", good, malformed}, 3},
        {{"div", good, empty}, 3},
        {{"div", good, bad_utf8}, 3},
    };
    for (const auto& [args, expected] : cases) {
        const int code = run(args).code;
        t.check(code == expected, [&, &a = args, e = expected] {
            std::string cmd;
            for (const auto& x : a) cmd += " " + x;
            return "exit " + std::to_string(code) + " (expected " + std::to_string(e) + ") for" + cmd;
        });
    }
    return t.outcome(std::to_string(compared) + " JSON values bit-identical, " +
                     std::to_string(cases.size()) + " exit-code cases");
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        Outcome (*run)();
    };
    const Criterion criteria[] = {
        {"oracle equivalence", oracle_equivalence},
        {"JS symmetry", js_symmetry},
        {"sqrt JS metricity", sqrt_js_metricity},
        {"KL asymmetry witness", kl_asymmetry_witness},
        {"strict KL non-negativity", strict_kl_nonnegativity},
        {"seven-region partition", seven_region_partition},
        {"product identity and permutation invariance", product_identity},
        {"compound zero branch", compound_zero_branch},
        {"variant counts", variant_counts},
        {"no NaN or infinity", no_nan_or_inf},
        {"CLI round trip and exit codes", cli_round_trip},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s  %s: %s\n", o.passed ? "PASS" : "FAIL", c.name, o.detail.c_str());
        failed += o.passed ? 0 : 1;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed,
                std::size(criteria));
    return failed == 0 ? 0 : 1;
}
