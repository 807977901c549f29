#include "mrc/serde.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <openssl/evp.h>

namespace mrc {

json to_json(const NumericAnswer& a) {
    return json{{"num", a.num}, {"den", a.den}, {"raw", a.raw}};
}

NumericAnswer answer_from_json(const json& j) {
    return make_answer(j.at("num").get<std::int64_t>(), j.at("den").get<std::int64_t>(),
                       j.value("raw", std::string{}));
}

json to_json(const MathProblem& p) {
    return json{{"id", p.id},
                {"question", p.question},
                {"gold", to_json(p.gold_answer)},
                {"language", std::string(to_string(p.language))}};
}

MathProblem problem_from_json(const json& j) {
    MathProblem p;
    p.id = j.at("id").get<std::string>();
    p.question = j.at("question").get<std::string>();
    p.gold_answer = answer_from_json(j.at("gold"));
    p.language = lang_from_string_or_throw(j.at("language").get<std::string>());
    return p;
}

json to_json(const PromptExemplar& e) {
    return json{{"question", e.question},
                {"solution", e.solution},
                {"language", std::string(to_string(e.language))}};
}

PromptExemplar exemplar_from_json(const json& j) {
    PromptExemplar e;
    e.question = j.at("question").get<std::string>();
    e.solution = j.at("solution").get<std::string>();
    e.language = lang_from_string_or_throw(j.at("language").get<std::string>());
    return e;
}

json to_json(const VariationSpec& s) {
    json j{{"dimension", std::string(to_string(s.dimension))}, {"spec_id", s.spec_id()}};
    if (s.order_permutation) j["order_permutation"] = *s.order_permutation;
    if (s.phrasing_setting) j["phrasing_setting"] = std::string(to_string(*s.phrasing_setting));
    if (s.language) j["language"] = std::string(to_string(*s.language));
    if (s.sample > 0) j["sample"] = s.sample;
    return j;
}

VariationSpec spec_from_json(const json& j) {
    VariationSpec s;
    auto dim = dimension_from_string(j.at("dimension").get<std::string>());
    if (!dim) throw std::invalid_argument("bad dimension in spec record");
    s.dimension = *dim;
    if (j.contains("order_permutation")) s.order_permutation = j["order_permutation"].get<std::vector<int>>();
    if (j.contains("phrasing_setting")) {
        auto ps = setting_from_string(j["phrasing_setting"].get<std::string>());
        if (!ps) throw std::invalid_argument("bad phrasing setting in spec record");
        s.phrasing_setting = *ps;
    }
    if (j.contains("language")) s.language = lang_from_string_or_throw(j["language"].get<std::string>());
    s.sample = j.value("sample", 0);
    return s;
}

json to_json(const SolutionTrace& t) {
    json j{{"problem_id", t.problem_id},
           {"spec", to_json(t.spec)},
           {"generations", t.generations},
           {"extraction_status", std::string(to_string(t.extraction_status))}};
    if (t.extracted_answer) j["extracted_answer"] = to_json(*t.extracted_answer);
    if (!t.cache_keys.empty()) j["cache_keys"] = t.cache_keys;
    return j;
}

SolutionTrace trace_from_json(const json& j) {
    SolutionTrace t;
    t.problem_id = j.at("problem_id").get<std::string>();
    t.spec = spec_from_json(j.at("spec"));
    t.generations = j.at("generations").get<std::vector<std::string>>();
    auto st = extraction_status_from_string(j.at("extraction_status").get<std::string>());
    if (!st) throw std::invalid_argument("bad extraction status in trace record");
    t.extraction_status = *st;
    if (j.contains("extracted_answer")) t.extracted_answer = answer_from_json(j["extracted_answer"]);
    if (j.contains("cache_keys")) t.cache_keys = j["cache_keys"].get<std::vector<std::string>>();
    if ((t.extraction_status == ExtractionStatus::Ok) != t.extracted_answer.has_value())
        throw std::invalid_argument("trace record violates status/answer invariant");
    return t;
}

std::string to_jsonl_line(const json& j) { return j.dump() + "\n"; }

std::vector<json> read_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<json> out;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            out.push_back(json::parse(line));
        } catch (const json::parse_error& e) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<json>& records) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (const auto& r : records) out << to_jsonl_line(r);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx) throw std::runtime_error("EVP_MD_CTX_new failed");
    if (EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
        EVP_MD_CTX_free(ctx);
        throw std::runtime_error("sha256 failed");
    }
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(static_cast<size_t>(len) * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

}  // namespace mrc
