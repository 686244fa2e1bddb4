#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// Language-neutral text helpers shared by pattern harvesting and instance
// extraction. Case folding is ASCII-only so byte offsets in the folded string
// line up with the original; non-ASCII bytes pass through untouched.
namespace topicpref::text {

// Literal slot marker used in stance templates.
inline constexpr std::string_view kSlot = "{A}";

std::string fold_case(std::string_view s);
std::string_view trim(std::string_view s);

// Trims and collapses every run of whitespace to a single space.
std::string normalize_space(std::string_view s);

// Splits on '.', '!', '?', U+3002 and newline. The terminator (and any
// terminators directly following it) stays with its sentence. Sentences come
// back whitespace-normalized; empty ones are dropped.
std::vector<std::string> split_sentences(std::string_view text);

// Whitespace-separated tokens.
std::vector<std::string_view> split_tokens(std::string_view s);

// Byte offsets where `needle` occurs in `haystack` with a token boundary on
// both sides. A boundary is the string edge, whitespace, or ASCII punctuation.
// Both arguments are expected to be case-folded already.
std::vector<std::size_t> find_bounded(std::string_view haystack, std::string_view needle);

bool is_boundary_char(char c);

// Start of the window that keeps up to `window` whole tokens before the token
// containing byte offset `pos`. `s` must be whitespace-normalized.
std::size_t window_start(std::string_view s, std::size_t pos, std::size_t window);

}  // namespace topicpref::text
