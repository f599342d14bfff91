// SPDX-License-Identifier: Apache-2.0

#include "trivergence/ingest.hpp"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <charconv>
#include <cstdint>

#include "trivergence/error.hpp"

namespace trivergence::ingest {

void TokenizerConfig::validate() const {
    if (ngram_n == 0) throw Error(ErrorKind::InvalidContext, "ngram_n must be >= 1");
    if (ngram_n > 1 && ngram_joiner.empty()) {
        throw Error(ErrorKind::InvalidContext, "ngram joiner must be non-empty when ngram_n > 1");
    }
}

namespace {

bool is_separator(UChar32 c, SplitPolicy policy) {
    if (u_isUWhiteSpace(c)) return true;
    return policy == SplitPolicy::UnicodeWhitespacePunct && u_ispunct(c);
}

void append_utf8(std::string& out, UChar32 c) {
    char buf[U8_MAX_LENGTH];
    int32_t len = 0;
    U8_APPEND_UNSAFE(buf, len, c);
    out.append(buf, static_cast<std::size_t>(len));
}

std::vector<std::string> split_words(std::string_view text, const TokenizerConfig& cfg) {
    std::vector<std::string> words;
    std::string current;
    const auto* s = reinterpret_cast<const uint8_t*>(text.data());
    const auto length = static_cast<int32_t>(text.size());
    int32_t i = 0;
    while (i < length) {
        const int32_t start = i;
        UChar32 c;
        U8_NEXT(s, i, length, c);
        if (c < 0) {
            throw Error(ErrorKind::EncodingError,
                        "invalid UTF-8 at byte offset " + std::to_string(start));
        }
        if (is_separator(c, cfg.split_policy)) {
            if (!current.empty()) words.push_back(std::move(current));
            current.clear();
            continue;
        }
        append_utf8(current, cfg.lowercase ? u_foldCase(c, U_FOLD_CASE_DEFAULT) : c);
    }
    if (!current.empty()) words.push_back(std::move(current));
    return words;
}

}  // namespace

std::vector<ItemId> tokenize(std::string_view text, const TokenizerConfig& cfg) {
    cfg.validate();
    const std::vector<std::string> words = split_words(text, cfg);

    std::vector<ItemId> out;
    if (cfg.ngram_n == 1) {
        out.reserve(words.size());
        for (const auto& w : words) out.emplace_back(w);
        return out;
    }
    if (words.size() < cfg.ngram_n) return out;
    for (std::size_t i = 0; i + cfg.ngram_n <= words.size(); ++i) {
        std::string gram = words[i];
        for (std::size_t k = 1; k < cfg.ngram_n; ++k) {
            gram += cfg.ngram_joiner;
            gram += words[i + k];
        }
        out.emplace_back(std::move(gram));
    }
    return out;
}

CountDistribution distribution_from_text(std::string_view text, const TokenizerConfig& cfg,
                                         std::string label) {
    const std::vector<ItemId> tokens = tokenize(text, cfg);
    if (tokens.empty()) {
        throw Error(ErrorKind::EmptyDistribution, "no tokens in '" + label + "'");
    }
    std::vector<std::pair<std::string, std::int64_t>> entries;
    entries.reserve(tokens.size());
    for (const auto& t : tokens) entries.emplace_back(t.text(), 1);
    return CountDistribution::from_counts(entries, std::move(label));
}

CountDistribution distribution_from_tsv(std::string_view content, std::string label) {
    std::vector<std::pair<std::string, std::int64_t>> entries;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < content.size()) {
        std::size_t end = content.find('\n', pos);
        if (end == std::string_view::npos) end = content.size();
        std::string_view line = content.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;

        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line.front() == '#') continue;

        const std::size_t tab = line.rfind('\t');
        if (tab == std::string_view::npos) {
            throw Error(ErrorKind::ParseError, "expected item<TAB>count", line_no);
        }
        const std::string_view item = line.substr(0, tab);
        const std::string_view field = line.substr(tab + 1);
        if (item.empty()) throw Error(ErrorKind::ParseError, "empty item", line_no);

        const bool negative = !field.empty() && field.front() == '-';
        const std::string_view digits = negative ? field.substr(1) : field;
        std::uint64_t value = 0;
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
        if (digits.empty() || ec != std::errc() || ptr != digits.data() + digits.size() ||
            value > static_cast<std::uint64_t>(INT64_MAX)) {
            throw Error(ErrorKind::ParseError, "count '" + std::string(field) + "' is not a decimal integer",
                        line_no);
        }
        if (negative || value == 0) {
            throw Error(ErrorKind::InvalidCount, "count must be positive, got " + std::string(field),
                        line_no);
        }
        entries.emplace_back(std::string(item), static_cast<std::int64_t>(value));
    }
    if (entries.empty()) throw Error(ErrorKind::EmptyDistribution, "no entries in '" + label + "'");
    return CountDistribution::from_counts(entries, std::move(label));
}

std::string serialize_tsv(const CountDistribution& d) {
    std::string out;
    for (const auto& e : d.entries()) {
        const std::string& text = e.item.text();
        if (text.find('\n') != std::string::npos || text.front() == '#' ||
            text.back() == '\r') {
            throw Error(ErrorKind::InvalidItem, "item cannot be written as TSV: '" + text + "'");
        }
        out += text;
        out += '\t';
        out += std::to_string(e.count);
        out += '\n';
    }
    return out;
}

}  // namespace trivergence::ingest
