#include "mrc/prompt.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

namespace mrc {

namespace {

// Hand-rolled Fisher-Yates over mt19937_64 so the sequence is identical on
// every platform (std::shuffle and std::uniform_int_distribution are not
// specified bit-exactly).
template <typename T>
void seeded_shuffle(std::vector<T>& v, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (size_t i = v.size(); i > 1; --i) {
        size_t j = static_cast<size_t>(rng() % i);
        std::swap(v[i - 1], v[j]);
    }
}

std::uint64_t factorial(int n) {
    std::uint64_t f = 1;
    for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
    return f;
}

std::string exemplar_block(const ExemplarBank& bank, const std::vector<int>& permutation,
                           const LangScaffold& sc) {
    std::string out;
    for (int idx : permutation) {
        if (idx < 0 || idx >= bank.size())
            throw std::out_of_range("permutation index " + std::to_string(idx) +
                                    " out of range for bank of size " + std::to_string(bank.size()));
        const PromptExemplar& e = bank.exemplars[static_cast<size_t>(idx)];
        out += sc.question_word + ": " + e.question + "\n";
        out += sc.answer_word + ": " + e.solution + "\n\n";
    }
    return out;
}

std::vector<int> identity_permutation(int n) {
    std::vector<int> p(static_cast<size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    return p;
}

PromptStage user_stage(std::string text, bool consumes_previous = false) {
    PromptStage st;
    st.messages.push_back({"user", std::move(text)});
    st.consumes_previous = consumes_previous;
    return st;
}

// Few-shot solve stage shared by the Order, Vanilla and Language paths.
std::string render_solve(const MathProblem& problem, const ExemplarBank& bank,
                         const std::vector<int>& permutation, const TemplateSet& templates, Lang lang) {
    const LangScaffold& sc = templates.scaffold(lang);
    return render_template(templates.get("solve", lang),
                           {{"exemplars", exemplar_block(bank, permutation, sc)},
                            {"question", problem.question}});
}

}  // namespace

std::vector<VariationSpec> gen_order_specs(const ExemplarBank& bank, int k, std::uint64_t seed) {
    const int n = bank.size();
    if (n < 1 || n > 8) throw std::invalid_argument("gen_order_specs: bank size must be in 1..8");
    const std::uint64_t total = factorial(n);
    if (k < 1 || static_cast<std::uint64_t>(k) > total)
        throw std::invalid_argument("gen_order_specs: k = " + std::to_string(k) + " exceeds " +
                                    std::to_string(total) + " distinct permutations");

    // All permutations in lexicographic order; the identity comes first.
    std::vector<std::vector<int>> perms;
    std::vector<int> p = identity_permutation(n);
    do {
        perms.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));

    std::vector<std::vector<int>> rest(perms.begin() + 1, perms.end());
    seeded_shuffle(rest, seed);

    std::vector<VariationSpec> specs;
    specs.push_back(VariationSpec::order(perms.front()));
    for (int i = 0; i + 1 < k; ++i) specs.push_back(VariationSpec::order(rest[static_cast<size_t>(i)]));
    return specs;
}

PromptPlan build_order_prompt(const VariationSpec& spec, const MathProblem& problem,
                              const ExemplarBank& bank, const TemplateSet& templates) {
    if (spec.dimension != Dimension::Order || !spec.order_permutation)
        throw std::invalid_argument("build_order_prompt: spec is not an order spec");
    // Permutation must be a bijection on the bank's indices.
    std::set<int> seen(spec.order_permutation->begin(), spec.order_permutation->end());
    if (static_cast<int>(seen.size()) != bank.size() ||
        static_cast<int>(spec.order_permutation->size()) != bank.size())
        throw std::out_of_range("build_order_prompt: permutation is not a bijection on bank indices");

    PromptPlan plan;
    plan.spec = spec;
    plan.language = problem.language;
    plan.stages.push_back(
        user_stage(render_solve(problem, bank, *spec.order_permutation, templates, problem.language)));
    return plan;
}

PromptPlan build_phrasing_plan(PhrasingSetting setting, const MathProblem& problem,
                               const ExemplarBank& bank, const TemplateSet& templates, int sample) {
    PromptPlan plan;
    plan.spec = VariationSpec::phrasing(setting, sample);
    plan.language = problem.language;
    const Lang lang = problem.language;
    const LangScaffold& sc = templates.scaffold(lang);
    const std::string exemplars = exemplar_block(bank, identity_permutation(bank.size()), sc);

    switch (setting) {
        case PhrasingSetting::Vanilla:
            plan.stages.push_back(
                user_stage(render_solve(problem, bank, identity_permutation(bank.size()), templates, lang)));
            break;
        case PhrasingSetting::RwS:
            plan.stages.push_back(user_stage(render_template(
                templates.get("rewrite_without_solve", lang),
                {{"exemplars", exemplars}, {"question", problem.question}})));
            plan.stages.push_back(user_stage(
                render_template(templates.get("solve_rewritten", lang), {{"exemplars", exemplars}}),
                /*consumes_previous=*/true));
            break;
        case PhrasingSetting::QPlusRwS:
            plan.stages.push_back(user_stage(render_template(
                templates.get("rewrite_without_solve", lang),
                {{"exemplars", exemplars}, {"question", problem.question}})));
            plan.stages.push_back(user_stage(
                render_template(templates.get("solve_question_plus_rewrite", lang),
                                {{"exemplars", exemplars}, {"question", problem.question}}),
                /*consumes_previous=*/true));
            break;
        case PhrasingSetting::RtS:
            plan.stages.push_back(user_stage(render_template(
                templates.get("rewrite_then_solve", lang),
                {{"exemplars", exemplars}, {"question", problem.question}})));
            break;
        case PhrasingSetting::RtSQ:
            // Stage 1 is the RtS prompt itself; stage 2 solves only the
            // rewrite parsed out of it.
            plan.stages.push_back(user_stage(render_template(
                templates.get("rewrite_then_solve", lang),
                {{"exemplars", exemplars}, {"question", problem.question}})));
            plan.stages.push_back(user_stage(
                render_template(templates.get("solve_rts_rewrite", lang), {{"exemplars", exemplars}}),
                /*consumes_previous=*/true));
            break;
    }
    return plan;
}

PromptPlan build_language_prompt(Lang language, const MathProblem& problem_in_language,
                                 const ExemplarBank& bank_for_language, const TemplateSet& templates,
                                 int sample) {
    if (problem_in_language.language != language || bank_for_language.language != language)
        throw std::invalid_argument("build_language_prompt: problem/bank language mismatch for " +
                                    std::string(to_string(language)));
    PromptPlan plan;
    plan.spec = VariationSpec::lang(language, sample);
    plan.language = language;
    plan.stages.push_back(user_stage(render_solve(
        problem_in_language, bank_for_language, identity_permutation(bank_for_language.size()),
        templates, language)));
    return plan;
}

PromptPlan build_plan(const VariationSpec& spec, const MathProblem& problem, const BankMap& banks,
                      const TemplateSet& templates) {
    auto bank_for = [&](Lang l) -> const ExemplarBank& {
        auto it = banks.find(l);
        if (it == banks.end())
            throw std::invalid_argument("no exemplar bank for language " + std::string(to_string(l)));
        return it->second;
    };
    switch (spec.dimension) {
        case Dimension::Order: {
            PromptPlan plan = build_order_prompt(spec, problem, bank_for(problem.language), templates);
            return plan;
        }
        case Dimension::Phrasing: {
            PromptPlan plan = build_phrasing_plan(*spec.phrasing_setting, problem,
                                                  bank_for(problem.language), templates, spec.sample);
            return plan;
        }
        case Dimension::Language: {
            Lang l = *spec.language;
            if (problem.language != l)
                throw std::invalid_argument("build_plan: problem text is " +
                                            std::string(to_string(problem.language)) + ", spec wants " +
                                            std::string(to_string(l)));
            return build_language_prompt(l, problem, bank_for(l), templates, spec.sample);
        }
    }
    throw std::logic_error("unreachable");
}

std::string plan_fingerprint(const PromptPlan& plan) {
    std::string fp;
    for (const auto& stage : plan.stages) {
        for (const auto& m : stage.messages) {
            fp += m.role;
            fp += '\x1f';
            fp += m.content;
            fp += '\x1f';
        }
        fp += '\x1e';
    }
    return fp;
}

std::vector<VariationSpec> compose_mrc_specs(const BankMap& banks, const TemplateSet& templates,
                                             int coc_k, const std::vector<PhrasingSetting>& cpc_settings,
                                             const std::vector<Lang>& clc_languages,
                                             const std::vector<Lang>& exclusions, std::uint64_t seed) {
    auto en_bank = banks.find(Lang::EN);
    if (en_bank == banks.end())
        throw std::invalid_argument("compose_mrc_specs: English exemplar bank required");

    std::vector<VariationSpec> raw;
    if (coc_k > 0)
        for (auto& s : gen_order_specs(en_bank->second, coc_k, seed)) raw.push_back(std::move(s));
    for (PhrasingSetting s : cpc_settings) raw.push_back(VariationSpec::phrasing(s));
    for (Lang l : clc_languages) {
        if (std::find(exclusions.begin(), exclusions.end(), l) != exclusions.end()) continue;
        raw.push_back(VariationSpec::lang(l));
    }
    if (raw.empty()) throw std::invalid_argument("compose_mrc_specs: empty composition");

    // Drop specs whose rendered plans are byte-identical to an earlier one
    // (the vanilla English prompt shows up via Order identity, Phrasing
    // Vanilla and Language EN). A fixed probe question makes the check
    // problem-independent.
    std::vector<VariationSpec> out;
    std::set<std::string> seen;
    for (const auto& spec : raw) {
        MathProblem probe;
        probe.id = "probe";
        probe.question = "If a probe has 3 parts and gains 4 more, how many parts does it have?";
        probe.gold_answer = make_answer(7);
        probe.language = spec.dimension == Dimension::Language ? *spec.language : Lang::EN;
        std::string fp = plan_fingerprint(build_plan(spec, probe, banks, templates));
        if (seen.insert(fp).second) out.push_back(spec);
    }
    return out;
}

}  // namespace mrc
