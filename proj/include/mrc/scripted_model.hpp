#pragma once

#include <atomic>
#include <chrono>
#include <map>
#include <string>
#include <vector>

#include "mrc/client.hpp"
#include "mrc/templates.hpp"

namespace mrc {

// A deterministic stand-in for a chat-completions endpoint. It recognizes
// the harness's own prompt shapes (solve, rewrite, rewrite-then-solve),
// figures out which known problem is being asked, and answers with a small
// step-by-step text in the prompt's language. Whether a given path answers
// correctly is a pure function of the request bytes, so record/replay runs
// and fixtures are reproducible bit for bit.
class ScriptedModelTransport : public Transport {
public:
    struct Options {
        int wrong_percent = 20;    // paths that confidently give a wrong answer
        int garbage_percent = 3;   // paths with no parseable number at all
        std::chrono::milliseconds artificial_delay{0};  // for concurrency tests
    };

    ScriptedModelTransport(std::vector<MathProblem> known_problems, const TemplateSet& templates);
    ScriptedModelTransport(std::vector<MathProblem> known_problems, const TemplateSet& templates,
                           Options options);

    Result post_chat(const std::string& body_json) override;

    int calls() const { return calls_.load(); }
    int max_concurrent() const { return max_concurrent_.load(); }

private:
    std::string answer_sentence(Lang lang, std::int64_t value) const;
    std::string respond(const std::string& prompt, std::uint64_t h) const;

    std::vector<MathProblem> problems_;
    std::map<Lang, LangScaffold> scaffolds_;
    RewriteMarkers markers_;
    Options options_;

    std::atomic<int> calls_{0};
    std::atomic<int> in_flight_{0};
    std::atomic<int> max_concurrent_{0};
};

}  // namespace mrc
