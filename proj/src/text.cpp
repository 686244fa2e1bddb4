#include "topicpref/text.hpp"

#include <cctype>

namespace topicpref::text {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool is_ascii_terminator(char c) { return c == '.' || c == '!' || c == '?' || c == '\n'; }

// UTF-8 encoding of U+3002 IDEOGRAPHIC FULL STOP.
constexpr std::string_view kIdeographicStop = "\xE3\x80\x82";

// Length of the terminator starting at s[i], or 0.
std::size_t terminator_at(std::string_view s, std::size_t i) {
  if (is_ascii_terminator(s[i])) return 1;
  if (s.substr(i, kIdeographicStop.size()) == kIdeographicStop) return kIdeographicStop.size();
  return 0;
}

}  // namespace

std::string fold_case(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string_view trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

std::string normalize_space(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending = false;
  for (char c : trim(s)) {
    if (is_space(c)) {
      pending = true;
      continue;
    }
    if (pending) out.push_back(' ');
    pending = false;
    out.push_back(c);
  }
  return out;
}

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  std::size_t i = 0;
  auto flush = [&](std::size_t end) {
    auto sentence = normalize_space(text.substr(start, end - start));
    if (!sentence.empty()) out.push_back(std::move(sentence));
    start = end;
  };
  while (i < text.size()) {
    auto len = terminator_at(text, i);
    if (len == 0) {
      ++i;
      continue;
    }
    i += len;
    while (i < text.size() && (len = terminator_at(text, i)) != 0) i += len;
    flush(i);
  }
  if (start < text.size()) flush(text.size());
  return out;
}

std::vector<std::string_view> split_tokens(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t b = i;
    while (i < s.size() && !is_space(s[i])) ++i;
    if (i > b) out.push_back(s.substr(b, i - b));
  }
  return out;
}

bool is_boundary_char(char c) {
  auto u = static_cast<unsigned char>(c);
  return u < 0x80 && (std::isspace(u) || std::ispunct(u));
}

std::vector<std::size_t> find_bounded(std::string_view haystack, std::string_view needle) {
  std::vector<std::size_t> out;
  if (needle.empty()) return out;
  for (auto pos = haystack.find(needle); pos != std::string_view::npos; pos = haystack.find(needle, pos + 1)) {
    auto end = pos + needle.size();
    bool left = pos == 0 || is_boundary_char(haystack[pos - 1]);
    bool right = end == haystack.size() || is_boundary_char(haystack[end]);
    if (left && right) out.push_back(pos);
  }
  return out;
}

std::size_t window_start(std::string_view s, std::size_t pos, std::size_t window) {
  std::size_t p = pos;
  while (p > 0 && s[p - 1] != ' ') --p;
  for (std::size_t i = 0; i < window && p > 0; ++i) {
    --p;
    while (p > 0 && s[p - 1] != ' ') --p;
  }
  return p;
}

}  // namespace topicpref::text
