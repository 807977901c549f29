#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mrc/dataset.hpp"
#include "mrc/templates.hpp"
#include "mrc/types.hpp"

namespace mrc {

struct ChatMessage {
    std::string role;
    std::string content;
};

// One model call of a plan. `consumes_previous` marks stages whose message
// texts still hold a {rewritten_question} placeholder to be filled from the
// parsed output of the stage before.
struct PromptStage {
    std::vector<ChatMessage> messages;
    bool consumes_previous = false;
};

// The concrete prompt(s) realizing one VariationSpec for one problem:
// 1 stage for Order / Language / Vanilla / RtS, 2 stages for the RwS,
// Q+RwS and RtS Q flows. `language` is the language the solve output is
// expected in (drives extraction).
struct PromptPlan {
    VariationSpec spec;
    Lang language = Lang::EN;
    std::vector<PromptStage> stages;
};

using BankMap = std::map<Lang, ExemplarBank>;

// k distinct exemplar-order permutations: the identity first, the rest
// drawn by a seeded shuffle of the remaining permutations in lexicographic
// order. Deterministic given (bank size, k, seed); throws when k exceeds
// the number of distinct permutations.
std::vector<VariationSpec> gen_order_specs(const ExemplarBank& bank, int k, std::uint64_t seed);

PromptPlan build_order_prompt(const VariationSpec& spec, const MathProblem& problem,
                              const ExemplarBank& bank, const TemplateSet& templates);

PromptPlan build_phrasing_plan(PhrasingSetting setting, const MathProblem& problem,
                               const ExemplarBank& bank, const TemplateSet& templates, int sample = 0);

PromptPlan build_language_prompt(Lang language, const MathProblem& problem_in_language,
                                 const ExemplarBank& bank_for_language, const TemplateSet& templates,
                                 int sample = 0);

// Builds the plan for any spec (dispatch on dimension).
PromptPlan build_plan(const VariationSpec& spec, const MathProblem& problem, const BankMap& banks,
                      const TemplateSet& templates);

// The union of Order, Phrasing and Language specs for a joint run, with
// specs whose rendered prompt plans are byte-identical removed (the vanilla
// English prompt appears once, not three times). Order and Phrasing paths
// present the English problem; Language paths present the translations.
std::vector<VariationSpec> compose_mrc_specs(const BankMap& banks, const TemplateSet& templates,
                                             int coc_k, const std::vector<PhrasingSetting>& cpc_settings,
                                             const std::vector<Lang>& clc_languages,
                                             const std::vector<Lang>& exclusions, std::uint64_t seed);

// Stable fingerprint of a plan's pre-substitution stage texts, used for
// dedup and the dedup-soundness tests.
std::string plan_fingerprint(const PromptPlan& plan);

}  // namespace mrc
