// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "trivergence/distribution.hpp"

namespace trivergence::ingest {

enum class SplitPolicy {
    UnicodeWhitespacePunct,  // split on white space and punctuation, drop both
    WhitespaceOnly,
};

struct TokenizerConfig {
    bool lowercase = true;  // Unicode simple case folding
    SplitPolicy split_policy = SplitPolicy::UnicodeWhitespacePunct;
    std::size_t ngram_n = 1;
    std::string ngram_joiner = " ";

    /// Throws InvalidContext for ngram_n == 0 or an empty joiner with n > 1.
    void validate() const;
};

/// Tokens (or n-grams of tokens when ngram_n > 1). Throws EncodingError on
/// malformed UTF-8.
std::vector<ItemId> tokenize(std::string_view text, const TokenizerConfig& cfg = {});

/// Throws EmptyDistribution when the text yields no tokens.
CountDistribution distribution_from_text(std::string_view text, const TokenizerConfig& cfg,
                                         std::string label = {});

/// Parses "item<TAB>count" lines. Blank lines and lines starting with '#' are
/// skipped, CRLF is accepted, the item is everything before the last tab.
/// Throws ParseError / InvalidCount carrying the 1-based line number.
CountDistribution distribution_from_tsv(std::string_view content, std::string label = {});

/// Inverse of distribution_from_tsv. Throws InvalidItem for items that the
/// format cannot carry (line breaks, a leading '#').
std::string serialize_tsv(const CountDistribution& d);

}  // namespace trivergence::ingest
