#include "mrc/scripted_model.hpp"

#include <thread>

#include <nlohmann/json.hpp>

namespace mrc {

namespace {

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace

ScriptedModelTransport::ScriptedModelTransport(std::vector<MathProblem> known_problems,
                                               const TemplateSet& templates)
    : ScriptedModelTransport(std::move(known_problems), templates, Options()) {}

ScriptedModelTransport::ScriptedModelTransport(std::vector<MathProblem> known_problems,
                                               const TemplateSet& templates, Options options)
    : problems_(std::move(known_problems)), markers_(templates.markers()), options_(options) {
    for (Lang l : kAllLangs) {
        try {
            scaffolds_[l] = templates.scaffold(l);
        } catch (const std::out_of_range&) {
        }
    }
}

std::string ScriptedModelTransport::answer_sentence(Lang lang, std::int64_t value) const {
    auto it = scaffolds_.find(lang);
    const std::string& anchor =
        it != scaffolds_.end() ? it->second.anchors.front() : std::string("The answer is");
    return anchor + " " + std::to_string(value) + ".";
}

std::string ScriptedModelTransport::respond(const std::string& prompt, std::uint64_t h) const {
    // Which known problem is being asked? The target question is the last
    // known question text appearing in the prompt (exemplars are not in the
    // problem list, and the scripted rewrite embeds the original text).
    const MathProblem* target = nullptr;
    size_t best_pos = 0;
    for (const auto& p : problems_) {
        size_t pos = prompt.rfind(p.question);
        if (pos != std::string::npos && (!target || pos > best_pos)) {
            target = &p;
            best_pos = pos;
        }
    }
    if (!target) return "I do not recognize this problem.";

    // The output language follows the solve scaffold present in the prompt.
    Lang lang = Lang::EN;
    for (const auto& [l, sc] : scaffolds_) {
        if (prompt.find(sc.answer_word + ":") != std::string::npos) {
            lang = l;
            break;
        }
    }

    const bool rts = prompt.find("Reply in exactly this format:") != std::string::npos;
    const bool rewrite_only = !rts && prompt.rfind("Rewrite the following", 0) == 0;

    if (rewrite_only) {
        if (h % 100 >= 100 - static_cast<std::uint64_t>(options_.garbage_percent))
            return "";  // unusable rewrite; downstream stage records a parse error
        std::string text = "In short: " + target->question;
        if (h % 2 == 0) return markers_.question_marker + " " + text;
        return text;
    }

    const std::uint64_t roll = h % 100;
    const bool garbage = roll >= 100 - static_cast<std::uint64_t>(options_.garbage_percent);
    const bool wrong = roll < static_cast<std::uint64_t>(options_.wrong_percent);
    if (garbage) return "I am not sure how to approach this one.";

    std::int64_t value = target->gold_answer.num;  // fixture golds are integers
    if (wrong) value += 1 + static_cast<std::int64_t>((h >> 8) % 7);

    std::int64_t a = 1 + static_cast<std::int64_t>((h >> 16) % 9);
    std::int64_t b = value > a ? value - a : value + a;
    std::string steps = "We work through it. " + std::to_string(a) + " + " + std::to_string(b) +
                        " = " + std::to_string(a + b) + ". ";

    if (rts)
        return markers_.question_marker + " Put simply: " + target->question + "\n" +
               markers_.solution_marker + " " + steps + answer_sentence(lang, value);
    return steps + answer_sentence(lang, value);
}

Transport::Result ScriptedModelTransport::post_chat(const std::string& body_json) {
    int now = in_flight_.fetch_add(1) + 1;
    int prev_max = max_concurrent_.load();
    while (now > prev_max && !max_concurrent_.compare_exchange_weak(prev_max, now)) {
    }
    calls_.fetch_add(1);
    if (options_.artificial_delay.count() > 0) std::this_thread::sleep_for(options_.artificial_delay);

    nlohmann::json req = nlohmann::json::parse(body_json);
    std::string prompt;
    for (const auto& m : req.at("messages")) prompt += m.at("content").get<std::string>();

    const std::uint64_t h = fnv1a64(body_json);
    std::string text = respond(prompt, h);

    nlohmann::json body{
        {"id", "scripted-" + std::to_string(h % 1000000)},
        {"object", "chat.completion"},
        {"model", req.value("model", std::string("scripted"))},
        {"choices",
         nlohmann::json::array({nlohmann::json{{"index", 0},
                                               {"message", {{"role", "assistant"}, {"content", text}}},
                                               {"finish_reason", "stop"}}})},
        {"usage",
         {{"prompt_tokens", static_cast<std::int64_t>(prompt.size() / 4)},
          {"completion_tokens", static_cast<std::int64_t>(text.size() / 4)},
          {"total_tokens", static_cast<std::int64_t>(prompt.size() / 4 + text.size() / 4)}}}};

    in_flight_.fetch_sub(1);
    Result out;
    out.status = 200;
    out.body = body.dump();
    return out;
}

}  // namespace mrc
