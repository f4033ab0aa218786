#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace dcrl::text {

std::string to_lower(std::string_view s);

/// Lowercased word tokens: maximal runs of ASCII letters, digits and apostrophes.
std::vector<std::string> words(std::string_view s);

/// True when `phrase` (already tokenized) occurs in `tokens` on token boundaries.
bool contains_phrase(const std::vector<std::string>& tokens, const std::vector<std::string>& phrase);

/// Position of the first occurrence of `phrase` in `tokens`, or npos.
std::size_t find_phrase(const std::vector<std::string>& tokens, const std::vector<std::string>& phrase);

/// 64-bit FNV-1a over `bytes`, continuing from `basis`.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

/// Lowercase hex of an FNV-1a digest, used for config and manifest ids.
std::string hash_hex(std::string_view bytes);

std::string trim(std::string_view s);

/// Non-empty, non-comment (#) trimmed lines of a text file.
std::vector<std::string> read_lines(const std::string& path);

}  // namespace dcrl::text
