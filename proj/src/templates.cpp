#include "mrc/templates.hpp"

#include <stdexcept>

#include <nlohmann/json.hpp>

#include "mrc/serde.hpp"

namespace mrc {

namespace {

constexpr const char* kStems[] = {
    "solve",
    "rewrite_without_solve",
    "solve_rewritten",
    "solve_question_plus_rewrite",
    "rewrite_then_solve",
    "solve_rts_rewrite",
};

}  // namespace

TemplateSet TemplateSet::load(const std::filesystem::path& templates_dir,
                              const std::filesystem::path& languages_file) {
    TemplateSet ts;
    std::string all_bytes;

    std::string lang_bytes = read_file(languages_file);
    all_bytes += lang_bytes;
    nlohmann::json j = nlohmann::json::parse(lang_bytes);

    if (j.contains("rewrite_markers")) {
        ts.markers_.question_marker = j["rewrite_markers"].at("question").get<std::string>();
        ts.markers_.solution_marker = j["rewrite_markers"].at("solution").get<std::string>();
    }
    for (const auto& [code, entry] : j.at("languages").items()) {
        Lang lang = lang_from_string_or_throw(code);
        LangScaffold sc;
        sc.question_word = entry.at("question_word").get<std::string>();
        sc.answer_word = entry.at("answer_word").get<std::string>();
        sc.anchors = entry.at("anchors").get<std::vector<std::string>>();
        if (sc.anchors.empty())
            throw std::runtime_error("language " + code + " has no anchor phrases");
        ts.scaffolds_[lang] = std::move(sc);
    }

    for (const char* stem : kStems) {
        for (Lang lang : kAllLangs) {
            auto path = templates_dir / (std::string(stem) + "." + std::string(to_string(lang)) + ".txt");
            if (!std::filesystem::exists(path)) continue;
            std::string body = read_file(path);
            all_bytes += body;
            ts.templates_[std::string(stem) + "." + std::string(to_string(lang))] = std::move(body);
        }
        if (!ts.templates_.count(std::string(stem) + ".en"))
            throw std::runtime_error("missing template " + std::string(stem) + ".en.txt in " +
                                     templates_dir.string());
    }

    ts.version_ = sha256_hex(all_bytes).substr(0, 16);
    return ts;
}

const std::string& TemplateSet::get(std::string_view stem, Lang lang) const {
    auto it = templates_.find(std::string(stem) + "." + std::string(to_string(lang)));
    if (it == templates_.end()) it = templates_.find(std::string(stem) + ".en");
    if (it == templates_.end()) throw std::out_of_range("unknown template stem " + std::string(stem));
    return it->second;
}

const LangScaffold& TemplateSet::scaffold(Lang lang) const {
    auto it = scaffolds_.find(lang);
    if (it == scaffolds_.end())
        throw std::out_of_range("no scaffolding for language " + std::string(to_string(lang)));
    return it->second;
}

AnchorTable TemplateSet::anchor_table() const {
    AnchorTable t;
    for (const auto& [lang, sc] : scaffolds_) t.anchors[lang] = sc.anchors;
    return t;
}

std::string render_template(std::string_view tpl, const std::map<std::string, std::string>& subs) {
    std::string out;
    out.reserve(tpl.size());
    size_t i = 0;
    while (i < tpl.size()) {
        if (tpl[i] == '{') {
            size_t close = tpl.find('}', i + 1);
            if (close != std::string_view::npos) {
                std::string name(tpl.substr(i + 1, close - i - 1));
                auto it = subs.find(name);
                if (it != subs.end()) {
                    out += it->second;
                    i = close + 1;
                    continue;
                }
            }
        }
        out += tpl[i];
        ++i;
    }
    return out;
}

}  // namespace mrc
