#include "mrc/unicode.hpp"

#include <algorithm>

namespace mrc::uni {

namespace {

// Unicode Nd blocks: codepoint of DIGIT ZERO per script; the nine following
// codepoints are digits 1..9. Covers the scripts the MGSM languages use plus
// the common remainder, so a new script is a table row, not a code change.
constexpr char32_t kDigitZero[] = {
    0x0030,  // ASCII
    0x0660,  // Arabic-Indic
    0x06F0,  // Extended Arabic-Indic
    0x0966,  // Devanagari
    0x09E6,  // Bengali
    0x0A66,  // Gurmukhi
    0x0AE6,  // Gujarati
    0x0B66,  // Oriya
    0x0BE6,  // Tamil
    0x0C66,  // Telugu
    0x0CE6,  // Kannada
    0x0D66,  // Malayalam
    0x0E50,  // Thai
    0x0ED0,  // Lao
    0x0F20,  // Tibetan
    0x1040,  // Myanmar
    0x17E0,  // Khmer
    0x1810,  // Mongolian
    0xFF10,  // Fullwidth
};

constexpr char32_t kCurrency[] = {
    0x0024, 0x00A2, 0x00A3, 0x00A4, 0x00A5, 0x0E3F, 0x20A9, 0x20AA,
    0x20AB, 0x20AC, 0x20B1, 0x20B9, 0x20BD, 0x09F3, 0xFF04, 0xFFE5,
};

constexpr char32_t kGrouping[] = {
    0x002C,  // ,
    0x00A0,  // no-break space
    0x2009,  // thin space
    0x202F,  // narrow no-break space
    0x066C,  // arabic thousands separator
};

}  // namespace

bool decode(std::string_view s, std::vector<char32_t>& out) {
    size_t i = 0;
    while (i < s.size()) {
        unsigned char c = static_cast<unsigned char>(s[i]);
        char32_t cp = 0;
        int extra = 0;
        if (c < 0x80) {
            cp = c;
        } else if ((c >> 5) == 0x6) {
            cp = c & 0x1F;
            extra = 1;
        } else if ((c >> 4) == 0xE) {
            cp = c & 0x0F;
            extra = 2;
        } else if ((c >> 3) == 0x1E) {
            cp = c & 0x07;
            extra = 3;
        } else {
            return false;
        }
        for (int k = 1; k <= extra; ++k) {
            if (i + k >= s.size()) return false;
            unsigned char cc = static_cast<unsigned char>(s[i + k]);
            if ((cc >> 6) != 0x2) return false;
            cp = (cp << 6) | (cc & 0x3F);
        }
        out.push_back(cp);
        i += 1 + static_cast<size_t>(extra);
    }
    return true;
}

void append(std::string& s, char32_t cp) {
    if (cp < 0x80) {
        s += static_cast<char>(cp);
    } else if (cp < 0x800) {
        s += static_cast<char>(0xC0 | (cp >> 6));
        s += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        s += static_cast<char>(0xE0 | (cp >> 12));
        s += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        s += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        s += static_cast<char>(0xF0 | (cp >> 18));
        s += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        s += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        s += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

std::string encode(const char32_t* begin, const char32_t* end) {
    std::string out;
    for (const char32_t* p = begin; p != end; ++p) append(out, *p);
    return out;
}

int digit_value(char32_t cp) {
    for (char32_t zero : kDigitZero)
        if (cp >= zero && cp <= zero + 9) return static_cast<int>(cp - zero);
    return -1;
}

bool is_currency(char32_t cp) {
    return std::find(std::begin(kCurrency), std::end(kCurrency), cp) != std::end(kCurrency);
}

bool is_grouping_sep(char32_t cp) {
    return std::find(std::begin(kGrouping), std::end(kGrouping), cp) != std::end(kGrouping);
}

bool is_space(char32_t cp) {
    return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' || cp == 0x3000;
}

std::string lower_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

}  // namespace mrc::uni
