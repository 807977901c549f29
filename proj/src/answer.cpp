#include "mrc/answer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "mrc/unicode.hpp"

namespace mrc {

namespace {

bool mul10_add(std::int64_t& acc, int d) {
    if (acc > (INT64_MAX - d) / 10) return false;
    acc = acc * 10 + d;
    return true;
}

}  // namespace

NumericAnswer make_answer(std::int64_t num, std::int64_t den, std::string raw) {
    if (den == 0) throw std::invalid_argument("zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    return NumericAnswer{num, den, std::move(raw)};
}

std::string NumericAnswer::to_string() const {
    std::string s = std::to_string(num);
    if (den != 1) s += "/" + std::to_string(den);
    return s;
}

bool answers_equal(const NumericAnswer& a, const NumericAnswer& b, double tol) {
    if (a == b) return true;
    if (tol <= 0.0) return false;
    return std::fabs(a.as_double() - b.as_double()) <= tol;
}

std::optional<NumericAnswer> normalize_answer(std::string_view raw) {
    std::vector<char32_t> cps;
    if (!uni::decode(raw, cps)) return std::nullopt;

    size_t lo = 0, hi = cps.size();
    while (lo < hi && uni::is_space(cps[lo])) ++lo;
    while (hi > lo && uni::is_space(cps[hi - 1])) --hi;

    // Map digits of any script to ASCII; drop currency and grouping marks.
    std::string cleaned;
    bool negative = false;
    bool seen_digit = false;
    int periods = 0;
    for (size_t i = lo; i < hi; ++i) {
        char32_t cp = cps[i];
        int d = uni::digit_value(cp);
        if (d >= 0) {
            cleaned += static_cast<char>('0' + d);
            seen_digit = true;
            continue;
        }
        if (uni::is_grouping_sep(cp) || uni::is_currency(cp)) continue;
        if (cp == U'.') {
            cleaned += '.';
            ++periods;
            continue;
        }
        if ((cp == U'-' || cp == 0x2212 || cp == U'+') && !seen_digit && cleaned.empty() && !negative) {
            negative = (cp != U'+');
            continue;
        }
        return std::nullopt;  // not a numeric string
    }

    // A trailing period is sentence punctuation, not part of the number.
    // After shaving it, two or more periods can only be grouping; a single
    // one is the decimal point.
    while (!cleaned.empty() && cleaned.back() == '.') {
        cleaned.pop_back();
        --periods;
    }
    if (periods >= 2) {
        cleaned.erase(std::remove(cleaned.begin(), cleaned.end(), '.'), cleaned.end());
        periods = 0;
    }

    std::string int_part, frac_part;
    if (periods == 1) {
        size_t dot = cleaned.find('.');
        int_part = cleaned.substr(0, dot);
        frac_part = cleaned.substr(dot + 1);
    } else {
        int_part = cleaned;
    }
    while (!frac_part.empty() && frac_part.back() == '0') frac_part.pop_back();
    if (int_part.empty() && frac_part.empty()) return std::nullopt;

    std::int64_t num = 0;
    for (char c : int_part)
        if (!mul10_add(num, c - '0')) return std::nullopt;
    std::int64_t den = 1;
    for (char c : frac_part) {
        if (den > INT64_MAX / 10) return std::nullopt;
        den *= 10;
        if (!mul10_add(num, c - '0')) return std::nullopt;
    }
    if (negative) num = -num;
    return make_answer(num, den, std::string(raw));
}

}  // namespace mrc
