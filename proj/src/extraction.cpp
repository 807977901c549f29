#include "mrc/extraction.hpp"

#include <algorithm>
#include <stdexcept>

#include "mrc/unicode.hpp"

namespace mrc {

namespace {

bool in_token(char32_t cp) {
    return uni::digit_value(cp) >= 0 || cp == U'.' || uni::is_grouping_sep(cp) || uni::is_currency(cp);
}

bool is_word_char(char32_t cp) {
    if (uni::digit_value(cp) >= 0) return true;
    return (cp >= U'a' && cp <= U'z') || (cp >= U'A' && cp <= U'Z');
}

struct Token {
    size_t begin;
    size_t end;  // half-open, codepoint indices
};

// Number tokens: maximal runs of digit/separator/currency codepoints around
// at least one digit, with a leading sign attached only when it cannot be a
// binary minus (previous char is not a word char).
std::vector<Token> scan_tokens(const std::vector<char32_t>& cps) {
    std::vector<Token> tokens;
    size_t i = 0;
    const size_t n = cps.size();
    while (i < n) {
        if (uni::digit_value(cps[i]) < 0) {
            ++i;
            continue;
        }
        size_t begin = i;
        while (begin > 0 && uni::is_currency(cps[begin - 1])) --begin;
        if (begin > 0 && (cps[begin - 1] == U'-' || cps[begin - 1] == 0x2212)) {
            if (begin == 1 || !is_word_char(cps[begin - 2])) --begin;
        }
        size_t end = i;
        while (end < n && in_token(cps[end])) ++end;
        tokens.push_back({begin, end});
        i = end;
    }
    return tokens;
}

std::optional<NumericAnswer> normalize_token(const std::vector<char32_t>& cps, const Token& t) {
    return normalize_answer(uni::encode(cps.data() + t.begin, cps.data() + t.end));
}

// First parseable number token at or after byte offset `from` (byte offsets
// relative to the original UTF-8 text).
std::optional<NumericAnswer> first_number_after(std::string_view text, size_t from) {
    std::vector<char32_t> cps;
    if (!uni::decode(text.substr(from), cps)) return std::nullopt;
    for (const Token& t : scan_tokens(cps))
        if (auto a = normalize_token(cps, t)) return a;
    return std::nullopt;
}

// Byte offsets of every occurrence of any pattern, case-insensitive over
// ASCII. Returns (offset, pattern length) pairs sorted by offset.
std::vector<std::pair<size_t, size_t>> find_all(std::string_view text,
                                                const std::vector<std::string>& patterns) {
    std::string hay = uni::lower_ascii(text);
    std::vector<std::pair<size_t, size_t>> hits;
    for (const std::string& p : patterns) {
        if (p.empty()) continue;
        std::string needle = uni::lower_ascii(p);
        size_t pos = 0;
        while ((pos = hay.find(needle, pos)) != std::string::npos) {
            hits.emplace_back(pos, needle.size());
            ++pos;
        }
    }
    std::sort(hits.begin(), hits.end());
    return hits;
}

std::string trim(std::string_view s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    size_t e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace

const std::vector<std::string>& AnchorTable::for_lang(Lang l) const {
    auto it = anchors.find(l);
    if (it == anchors.end()) throw std::out_of_range("no anchor phrases for language " + std::string(to_string(l)));
    return it->second;
}

ExtractionResult extract_answer(std::string_view generation, Lang language, const AnchorTable& table) {
    // Pass 1: localized anchor phrase, last occurrence wins.
    auto hits = find_all(generation, table.for_lang(language));
    for (auto it = hits.rbegin(); it != hits.rend(); ++it) {
        if (auto a = first_number_after(generation, it->first + it->second))
            return {ExtractionStatus::Ok, std::move(a)};
    }

    // Pass 2: number after the last "####" marker.
    size_t marker = generation.rfind("####");
    if (marker != std::string_view::npos) {
        if (auto a = first_number_after(generation, marker + 4))
            return {ExtractionStatus::Ok, std::move(a)};
    }

    // Pass 3: last standalone number anywhere.
    auto numbers = scan_numbers(generation);
    if (!numbers.empty()) return {ExtractionStatus::Ok, numbers.back()};

    return {ExtractionStatus::NoNumberFound, std::nullopt};
}

std::vector<NumericAnswer> scan_numbers(std::string_view text) {
    std::vector<char32_t> cps;
    std::vector<NumericAnswer> out;
    if (!uni::decode(text, cps)) return out;
    for (const Token& t : scan_tokens(cps))
        if (auto a = normalize_token(cps, t)) out.push_back(std::move(*a));
    return out;
}

RewriteExtraction extract_rewritten_question(std::string_view stage1_output, PhrasingSetting setting,
                                             const RewriteMarkers& markers) {
    if (setting == PhrasingSetting::RtSQ) {
        std::string hay = uni::lower_ascii(stage1_output);
        std::string qm = uni::lower_ascii(markers.question_marker);
        std::string sm = uni::lower_ascii(markers.solution_marker);
        size_t q = hay.find(qm);
        if (q == std::string::npos) return {ExtractionStatus::ParseError, {}};
        size_t start = q + qm.size();
        size_t s = hay.find(sm, start);
        if (s == std::string::npos) return {ExtractionStatus::ParseError, {}};
        std::string text = trim(stage1_output.substr(start, s - start));
        if (text.empty()) return {ExtractionStatus::ParseError, {}};
        return {ExtractionStatus::Ok, std::move(text)};
    }

    if (setting != PhrasingSetting::RwS && setting != PhrasingSetting::QPlusRwS)
        throw std::invalid_argument("extract_rewritten_question: setting has no rewrite stage");

    // RwS / Q+RwS: pass the output through, shaving common instruction
    // echoes ("Rewritten question:", "Here is the rewritten question:", ...).
    std::string text = trim(stage1_output);
    std::string low = uni::lower_ascii(text);
    std::string qm = uni::lower_ascii(markers.question_marker);
    if (low.rfind(qm, 0) == 0) {
        text = trim(text.substr(qm.size()));
    } else {
        size_t nl = text.find('\n');
        if (nl != std::string::npos) {
            std::string first = uni::lower_ascii(trim(text.substr(0, nl)));
            if (!first.empty() && first.back() == ':' && first.find("rewrit") != std::string::npos)
                text = trim(text.substr(nl + 1));
        }
    }
    if (text.size() >= 2 && text.front() == '"' && text.back() == '"')
        text = trim(text.substr(1, text.size() - 2));
    if (text.empty()) return {ExtractionStatus::ParseError, {}};
    return {ExtractionStatus::Ok, std::move(text)};
}

}  // namespace mrc
