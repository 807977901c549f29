#include "mrc/dataset.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "mrc/serde.hpp"

namespace mrc {

namespace {

std::string default_name(const std::filesystem::path& path) { return path.stem().string(); }

std::string row_id(const std::string& name, size_t row) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04zu", row);
    return name + "#" + buf;
}

std::string trim(std::string_view s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    size_t e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

NumericAnswer parse_gold_or_throw(const std::string& text, const std::string& problem_id) {
    auto a = normalize_answer(text);
    if (!a)
        throw std::runtime_error("problem " + problem_id + ": gold answer '" + text +
                                 "' is not a valid number");
    return *a;
}

// GSM8K convention: the gold value is the text after the final "####".
std::string gsm8k_final_answer(const std::string& answer_text) {
    size_t pos = answer_text.rfind("####");
    if (pos == std::string::npos) return {};
    std::string tail = answer_text.substr(pos + 4);
    size_t nl = tail.find('\n');
    if (nl != std::string::npos) tail = tail.substr(0, nl);
    return trim(tail);
}

}  // namespace

Dataset load_dataset(const std::filesystem::path& path, DatasetFormat format, Lang language,
                     std::string name, std::string split) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open dataset file " + path.string());

    Dataset ds;
    ds.name = name.empty() ? default_name(path) : std::move(name);
    ds.split = std::move(split);
    ds.language = language;

    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;

        MathProblem p;
        p.id = row_id(ds.name, ds.problems.size());
        p.language = language;

        if (format == DatasetFormat::Gsm8kJsonl) {
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(line);
            } catch (const nlohmann::json::parse_error& e) {
                throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                         ": invalid JSON: " + e.what());
            }
            if (!j.contains("question") || !j.contains("answer"))
                throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                         ": missing 'question' or 'answer' key");
            p.question = j["question"].get<std::string>();
            std::string gold_text = gsm8k_final_answer(j["answer"].get<std::string>());
            if (gold_text.empty())
                throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                         ": answer text has no '####' marker");
            p.gold_answer = parse_gold_or_throw(gold_text, p.id);
        } else {
            size_t tab = line.find('\t');
            if (tab == std::string::npos)
                throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                         ": expected tab-separated question and answer");
            p.question = trim(line.substr(0, tab));
            std::string ans = trim(line.substr(tab + 1));
            if (ans.find('\t') != std::string::npos)
                throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                         ": more than two columns");
            p.gold_answer = parse_gold_or_throw(ans, p.id);
        }
        if (p.question.empty())
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": empty question");
        ds.problems.push_back(std::move(p));
    }
    if (ds.problems.empty()) throw std::runtime_error("dataset file " + path.string() + " has no problems");
    return ds;
}

ExemplarBank load_exemplar_bank(const std::filesystem::path& path, Lang language) {
    std::string content = read_file(path);

    // Blank-line-separated blocks, alternating question / solution.
    std::vector<std::string> blocks;
    std::string current;
    std::istringstream in(content);
    std::string line;
    auto flush = [&] {
        std::string t = trim(current);
        if (!t.empty()) blocks.push_back(std::move(t));
        current.clear();
    };
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) {
            flush();
        } else {
            if (!current.empty()) current += '\n';
            current += line;
        }
    }
    flush();

    if (blocks.empty()) throw std::runtime_error("exemplar bank " + path.string() + " is empty");
    if (blocks.size() % 2 != 0)
        throw std::runtime_error("exemplar bank " + path.string() +
                                 ": odd number of blocks; expected alternating question/solution");

    ExemplarBank bank;
    bank.language = language;
    for (size_t i = 0; i < blocks.size(); i += 2) {
        PromptExemplar e;
        e.question = blocks[i];
        e.solution = blocks[i + 1];
        e.language = language;
        bank.exemplars.push_back(std::move(e));
    }

    int expected = expected_bank_size(language);
    if (bank.size() != expected)
        throw std::runtime_error("exemplar bank " + path.string() + ": " + std::to_string(bank.size()) +
                                 " exemplars for " + std::string(to_string(language)) + ", expected " +
                                 std::to_string(expected));
    return bank;
}

}  // namespace mrc
