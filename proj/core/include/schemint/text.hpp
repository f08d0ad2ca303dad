#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace schemint {

// Decodes UTF-8 into Unicode scalar values. Malformed sequences decode to
// U+FFFD, one replacement per offending byte.
std::u32string decode_utf8(std::string_view bytes);
std::string encode_utf8(std::u32string_view text);
bool is_valid_utf8(std::string_view bytes);

// ASCII-only case folding; other code points pass through unchanged.
std::string ascii_lower(std::string_view s);
std::u32string fold_case(std::string_view utf8);

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char delim);

// 64-bit FNV-1a over raw bytes.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace schemint
