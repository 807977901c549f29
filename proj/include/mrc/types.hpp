#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mrc/answer.hpp"
#include "mrc/lang.hpp"

namespace mrc {

// One (question, gold answer, language) item from a dataset split.
struct MathProblem {
    std::string id;        // unique within a dataset; shared across the per-language variants of one problem
    std::string question;  // UTF-8
    NumericAnswer gold_answer;
    Lang language = Lang::EN;
};

// A worked (question, step-by-step solution) pair shown in the few-shot prompt.
struct PromptExemplar {
    std::string question;
    std::string solution;
    Lang language = Lang::EN;
};

enum class Dimension { Order, Phrasing, Language };

constexpr std::string_view to_string(Dimension d) {
    switch (d) {
        case Dimension::Order: return "coc";
        case Dimension::Phrasing: return "cpc";
        case Dimension::Language: return "clc";
    }
    return "??";
}

inline std::optional<Dimension> dimension_from_string(std::string_view s) {
    if (s == "coc") return Dimension::Order;
    if (s == "cpc") return Dimension::Phrasing;
    if (s == "clc") return Dimension::Language;
    return std::nullopt;
}

// The five phrasing settings: the vanilla prompt plus the four rewrite flows.
enum class PhrasingSetting { Vanilla, RwS, QPlusRwS, RtS, RtSQ };

inline constexpr std::array<PhrasingSetting, 5> kAllSettings = {
    PhrasingSetting::Vanilla, PhrasingSetting::RwS, PhrasingSetting::QPlusRwS,
    PhrasingSetting::RtS, PhrasingSetting::RtSQ};

constexpr std::string_view to_string(PhrasingSetting s) {
    switch (s) {
        case PhrasingSetting::Vanilla: return "vanilla";
        case PhrasingSetting::RwS: return "rws";
        case PhrasingSetting::QPlusRwS: return "q_plus_rws";
        case PhrasingSetting::RtS: return "rts";
        case PhrasingSetting::RtSQ: return "rts_q";
    }
    return "??";
}

inline std::optional<PhrasingSetting> setting_from_string(std::string_view s) {
    for (PhrasingSetting p : kAllSettings)
        if (to_string(p) == s) return p;
    return std::nullopt;
}

// Display names matching the report column headers.
constexpr std::string_view display_name(PhrasingSetting s) {
    switch (s) {
        case PhrasingSetting::Vanilla: return "Vanilla CoT";
        case PhrasingSetting::RwS: return "RwS";
        case PhrasingSetting::QPlusRwS: return "Q+RwS";
        case PhrasingSetting::RtS: return "RtS";
        case PhrasingSetting::RtSQ: return "RtS Q";
    }
    return "??";
}

// A fully determined way to present one problem. Exactly the parameter
// matching `dimension` is set. `sample` distinguishes repeated sampled
// paths of the same variation; 0 for greedy single-path runs.
struct VariationSpec {
    Dimension dimension = Dimension::Order;
    std::optional<std::vector<int>> order_permutation;
    std::optional<PhrasingSetting> phrasing_setting;
    std::optional<Lang> language;
    int sample = 0;

    // Canonical serialization of the parameters; deterministic and injective
    // over any run's parameter space. Doubles as the report column key.
    std::string spec_id() const;

    static VariationSpec order(std::vector<int> permutation, int sample = 0);
    static VariationSpec phrasing(PhrasingSetting setting, int sample = 0);
    static VariationSpec lang(Lang language, int sample = 0);

    friend bool operator==(const VariationSpec& a, const VariationSpec& b) {
        return a.spec_id() == b.spec_id();
    }
};

enum class ExtractionStatus { Ok, NoNumberFound, ParseError };

constexpr std::string_view to_string(ExtractionStatus s) {
    switch (s) {
        case ExtractionStatus::Ok: return "ok";
        case ExtractionStatus::NoNumberFound: return "no_number_found";
        case ExtractionStatus::ParseError: return "parse_error";
    }
    return "??";
}

inline std::optional<ExtractionStatus> extraction_status_from_string(std::string_view s) {
    if (s == "ok") return ExtractionStatus::Ok;
    if (s == "no_number_found") return ExtractionStatus::NoNumberFound;
    if (s == "parse_error") return ExtractionStatus::ParseError;
    return std::nullopt;
}

// One model run of a prompt plan: every raw generation in stage order
// (1 for single-stage plans, 2 for the two-stage rewrite flows) plus the
// extracted, normalized final answer. extracted_answer is present iff
// extraction_status == Ok.
struct SolutionTrace {
    std::string problem_id;
    VariationSpec spec;
    std::vector<std::string> generations;
    std::optional<NumericAnswer> extracted_answer;
    ExtractionStatus extraction_status = ExtractionStatus::ParseError;
    std::vector<std::string> cache_keys;  // request hash per stage, for the manifest

    bool ok() const { return extraction_status == ExtractionStatus::Ok && extracted_answer.has_value(); }
};

// All traces for one problem across the variation paths of a run.
struct SolutionSet {
    std::string problem_id;
    std::vector<SolutionTrace> traces;

    int n() const { return static_cast<int>(traces.size()); }
    // Throws std::invalid_argument on an invariant break: empty, mixed
    // problem ids, or duplicate spec ids.
    void validate() const;
};

}  // namespace mrc
