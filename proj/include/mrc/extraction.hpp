#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mrc/answer.hpp"
#include "mrc/types.hpp"

namespace mrc {

// Per-language anchor phrases ("The answer is" and its translations),
// loaded from the versioned data file. Listing order is precedence order;
// every language's list may carry cross-language fallbacks as data.
struct AnchorTable {
    std::map<Lang, std::vector<std::string>> anchors;

    const std::vector<std::string>& for_lang(Lang l) const;
};

// Markers the rewrite-then-solve template instructs the model to emit, so
// the two-stage flow can parse the rewrite deterministically.
struct RewriteMarkers {
    std::string question_marker = "Rewritten question:";
    std::string solution_marker = "Solution:";
};

struct ExtractionResult {
    ExtractionStatus status = ExtractionStatus::NoNumberFound;
    std::optional<NumericAnswer> answer;
};

// Maps a raw model generation to its final numeric answer. Pure function of
// (text, language, table). Tries, in order:
//   1. the localized anchor phrase, latest occurrence first, taking the
//      first number after it;
//   2. the number following the last "####" marker;
//   3. the last standalone number in the text.
// Status NoNumberFound when all passes fail.
ExtractionResult extract_answer(std::string_view generation, Lang language, const AnchorTable& table);

struct RewriteExtraction {
    ExtractionStatus status = ExtractionStatus::ParseError;
    std::string text;
};

// Recovers the rewritten question from a stage-1 generation.
// RtSQ: the text between the question marker and the solution marker, both
// required. RwS / QPlusRwS: the whole output, trimmed of instruction echoes.
RewriteExtraction extract_rewritten_question(std::string_view stage1_output, PhrasingSetting setting,
                                             const RewriteMarkers& markers = {});

// All standalone number tokens in the text, in order, normalized.
// Exposed for the extraction tests.
std::vector<NumericAnswer> scan_numbers(std::string_view text);

}  // namespace mrc
