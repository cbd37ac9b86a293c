#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace coleforge::text {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
bool is_valid_utf8(std::string_view s);

// Decodes UTF-8 into code points. Invalid sequences decode as U+FFFD.
std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);

// Shortest round-trip decimal for v after rounding to `decimals` places.
// Locale independent; "-0" is printed as "0".
std::string format_number(double v, int decimals = 4);

std::string xml_escape(std::string_view s);

// Lowercase ASCII alphanumeric runs joined by '-', truncated to max_len.
std::string slugify(std::string_view s, std::size_t max_len = 48);

// Lowercase alphanumeric words (apostrophes dropped).
std::vector<std::string> words(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace coleforge::text
