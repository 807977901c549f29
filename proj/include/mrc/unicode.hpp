#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mrc::uni {

// Minimal UTF-8 decode; false on malformed input.
bool decode(std::string_view s, std::vector<char32_t>& out);

void append(std::string& s, char32_t cp);
std::string encode(const char32_t* begin, const char32_t* end);

// Decimal digit value via the Unicode Nd digit-zero table; -1 if not a digit.
int digit_value(char32_t cp);

bool is_currency(char32_t cp);
bool is_grouping_sep(char32_t cp);  // comma and space-like thousands separators
bool is_space(char32_t cp);

// Bytewise ASCII lowercase; multibyte UTF-8 units are >= 0x80 and unaffected.
std::string lower_ascii(std::string_view s);

}  // namespace mrc::uni
