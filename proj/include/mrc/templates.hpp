#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "mrc/extraction.hpp"
#include "mrc/lang.hpp"

namespace mrc {

// Localized prompt scaffolding for one language: the labels used to render
// exemplar demonstrations, plus the anchor phrases the extractor recognizes.
struct LangScaffold {
    std::string question_word;
    std::string answer_word;
    std::vector<std::string> anchors;
};

// Prompt templates and the language table, loaded from the data directory.
// Template files are "<stem>.<lang>.txt" with fallback to the "en" variant;
// placeholders are {exemplars}, {question} and {rewritten_question}.
// `version` is a digest over every loaded byte and feeds the cache key, so
// edited prompt wording invalidates stale cache hits.
class TemplateSet {
public:
    static TemplateSet load(const std::filesystem::path& templates_dir,
                            const std::filesystem::path& languages_file);

    // Template stems, one per prompt shape:
    //   solve                       few-shot solve (vanilla / orders / languages)
    //   rewrite_without_solve       RwS and Q+RwS stage 1 (shared rewrite)
    //   solve_rewritten             RwS stage 2
    //   solve_question_plus_rewrite Q+RwS stage 2
    //   rewrite_then_solve          RtS single stage, also RtS Q stage 1
    //   solve_rts_rewrite           RtS Q stage 2
    const std::string& get(std::string_view stem, Lang lang) const;

    const LangScaffold& scaffold(Lang lang) const;
    const RewriteMarkers& markers() const { return markers_; }
    const std::string& version() const { return version_; }
    AnchorTable anchor_table() const;

private:
    std::map<std::string, std::string> templates_;  // "<stem>.<lang>" -> body
    std::map<Lang, LangScaffold> scaffolds_;
    RewriteMarkers markers_;
    std::string version_;
};

// Single-pass placeholder substitution: each "{name}" present in `subs` is
// replaced once; unknown placeholders stay verbatim (stage-2 templates keep
// {rewritten_question} until the stage-1 output exists).
std::string render_template(std::string_view tpl, const std::map<std::string, std::string>& subs);

}  // namespace mrc
