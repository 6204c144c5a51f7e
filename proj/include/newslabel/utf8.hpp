#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace newslabel::utf8 {

// Strict UTF-8 validation: rejects overlong forms, surrogates and > U+10FFFF.
bool validate(std::string_view s);

// Number of code points. Assumes valid UTF-8.
std::size_t length(std::string_view s);

// Decodes the code point starting at byte offset i and advances i past it.
// Assumes valid UTF-8.
char32_t decode(std::string_view s, std::size_t& i);

void append(std::string& out, char32_t cp);

std::vector<char32_t> decode_all(std::string_view s);

std::string encode(const std::vector<char32_t>& cps);

}  // namespace newslabel::utf8
