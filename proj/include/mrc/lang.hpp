#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mrc {

// The 11 MGSM language codes. GSM8K runs use EN only.
enum class Lang { BN, DE, EN, ES, FR, JA, RU, SW, TE, TH, ZH };

inline constexpr std::array<Lang, 11> kAllLangs = {
    Lang::BN, Lang::DE, Lang::EN, Lang::ES, Lang::FR, Lang::JA,
    Lang::RU, Lang::SW, Lang::TE, Lang::TH, Lang::ZH};

constexpr std::string_view to_string(Lang l) {
    switch (l) {
        case Lang::BN: return "bn";
        case Lang::DE: return "de";
        case Lang::EN: return "en";
        case Lang::ES: return "es";
        case Lang::FR: return "fr";
        case Lang::JA: return "ja";
        case Lang::RU: return "ru";
        case Lang::SW: return "sw";
        case Lang::TE: return "te";
        case Lang::TH: return "th";
        case Lang::ZH: return "zh";
    }
    return "??";
}

inline std::optional<Lang> lang_from_string(std::string_view s) {
    for (Lang l : kAllLangs)
        if (to_string(l) == s) return l;
    return std::nullopt;
}

inline Lang lang_from_string_or_throw(std::string_view s) {
    auto l = lang_from_string(s);
    if (!l) throw std::invalid_argument("unknown language code: " + std::string(s));
    return *l;
}

}  // namespace mrc
