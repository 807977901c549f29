#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace mrc {

// Exact rational answer value. Always held in canonical reduced form:
// den > 0, gcd(|num|, den) == 1, sign carried by num.
// Two answers are equal iff their reduced rationals are equal; `raw`
// keeps the original string for audit and plays no part in equality.
struct NumericAnswer {
    std::int64_t num = 0;
    std::int64_t den = 1;
    std::string raw;

    friend bool operator==(const NumericAnswer& a, const NumericAnswer& b) {
        return a.num == b.num && a.den == b.den;
    }
    friend bool operator!=(const NumericAnswer& a, const NumericAnswer& b) { return !(a == b); }
    // Ordering for use as a map key; groups equal rationals together.
    friend bool operator<(const NumericAnswer& a, const NumericAnswer& b) {
        if (a.num != b.num) return a.num < b.num;
        return a.den < b.den;
    }

    double as_double() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string to_string() const;  // "42", "-7/2"
};

NumericAnswer make_answer(std::int64_t num, std::int64_t den = 1, std::string raw = {});

// Equality with a configurable absolute tolerance. tol == 0 means exact
// rational equality (the default for integer-answer datasets).
bool answers_equal(const NumericAnswer& a, const NumericAnswer& b, double tol = 0.0);

// Parses a candidate numeric string into an exact rational.
//
// Handles, in this order: Unicode decimal digits from any supported script
// (mapped by a table of the Unicode Nd digit-zero codepoints), currency
// symbols, grouping separators (comma, thin/narrow/no-break space), an
// optional leading sign, and a decimal point. Periods count as grouping
// only when the string carries two or more of them; a single period is the
// decimal separator. Trailing fractional zeros reduce away exactly.
//
// Returns nullopt when no valid number remains (the ParseError case), or
// when the value does not fit the int64 rational representation.
std::optional<NumericAnswer> normalize_answer(std::string_view raw);

}  // namespace mrc
