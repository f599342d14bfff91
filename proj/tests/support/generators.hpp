// SPDX-License-Identifier: Apache-2.0

#pragma once

// Random distributions for property tests. Items come from a fixed pool so
// random supports overlap in every possible way.

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "trivergence/distribution.hpp"

namespace trivergence::testing {

class DistributionGenerator {
public:
    explicit DistributionGenerator(std::uint64_t seed, std::size_t max_alphabet = 20,
                                   std::int64_t max_count = 50)
        : rng_(seed), max_alphabet_(max_alphabet), max_count_(max_count) {}

    CountDistribution next(const std::string& label) {
        std::vector<std::size_t> pool(max_alphabet_);
        for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
        std::shuffle(pool.begin(), pool.end(), rng_);
        const std::size_t k = uniform(1, max_alphabet_);
        std::vector<std::pair<std::string, std::int64_t>> entries;
        for (std::size_t i = 0; i < k; ++i) {
            entries.emplace_back(item_name(pool[i]),
                                 static_cast<std::int64_t>(uniform(1, max_count_)));
        }
        return CountDistribution::from_counts(entries, label);
    }

    /// `d` with every count multiplied by `factor`: the same distribution in
    /// every mode but PaperLiteral.
    static CountDistribution scaled(const CountDistribution& d, std::int64_t factor,
                                    const std::string& label) {
        std::vector<std::pair<std::string, std::int64_t>> entries;
        for (const auto& e : d.entries()) {
            entries.emplace_back(e.item.text(), static_cast<std::int64_t>(e.count) * factor);
        }
        return CountDistribution::from_counts(entries, label);
    }

    /// A pair; about one in eight is identical and one in sixteen a scaled copy.
    std::pair<CountDistribution, CountDistribution> pair() {
        CountDistribution p = next("p");
        const std::size_t roll = uniform(0, 15);
        if (roll < 2) return {p, relabel(p, "q")};
        if (roll == 2) return {p, scaled(p, static_cast<std::int64_t>(uniform(2, 4)), "q")};
        return {std::move(p), next("q")};
    }

    static CountDistribution relabel(const CountDistribution& d, const std::string& label) {
        return scaled(d, 1, label);
    }

    std::size_t uniform(std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
    }

    std::mt19937_64& engine() noexcept { return rng_; }

private:
    static std::string item_name(std::size_t i) {
        return "w" + std::string(i < 10 ? "0" : "") + std::to_string(i);
    }

    std::mt19937_64 rng_;
    std::size_t max_alphabet_;
    std::int64_t max_count_;
};

inline constexpr NormalizationMode kAllModes[] = {
    NormalizationMode::PaperLiteral, NormalizationMode::TokenNormalized, NormalizationMode::Strict};

}  // namespace trivergence::testing
