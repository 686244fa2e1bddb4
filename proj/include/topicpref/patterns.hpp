#pragma once

#include <filesystem>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "topicpref/corpus.hpp"

namespace topicpref {

enum class Polarity { kPro, kCon };

std::string_view to_string(Polarity p);
// Accepts "pro" / "con"; throws ConfigError otherwise.
Polarity parse_polarity(std::string_view s);
inline int sign_of(Polarity p) { return p == Polarity::kPro ? 1 : -1; }

// A regex matched against a whole hashtag token, with exactly one capture
// group that yields the topic.
class HashtagRule {
 public:
  // Throws ConfigError on invalid syntax or a capture-group count other than one.
  HashtagRule(Polarity polarity, std::string pattern);

  Polarity polarity() const noexcept { return polarity_; }
  const std::string& pattern() const noexcept { return pattern_; }
  const std::regex& regex() const noexcept { return regex_; }

 private:
  Polarity polarity_;
  std::string pattern_;
  std::regex regex_;
};

// Rule file: `pro|con<TAB>regex` per line; '#' at line start is NOT a comment
// (hashtag regexes start with it), blank lines are skipped.
std::vector<HashtagRule> load_rules(const std::filesystem::path& path);

struct HashtagOccurrence {
  std::string user_id;
  std::string topic;  // case-folded, trimmed capture
  Polarity polarity;
  std::string tweet_id;

  bool operator==(const HashtagOccurrence&) const = default;
};

// Hashtag tokens are the whitespace-separated tokens starting with '#'.
std::vector<std::string_view> hashtag_tokens(std::string_view text);

// One occurrence per (tweet, hashtag token, matching rule).
std::vector<HashtagOccurrence> find_hashtag_occurrences(const std::vector<Tweet>& tweets,
                                                        const std::vector<HashtagRule>& rules);

// Distinct topics, most frequent first, ties in lexicographic order.
std::vector<std::string> build_topic_set(const std::vector<HashtagOccurrence>& occurrences);

// A polarity-tagged template containing the slot marker `{A}` exactly once.
class StancePattern {
 public:
  // Throws ConfigError if the template breaks the slot invariants.
  StancePattern(Polarity polarity, std::string tmpl);

  Polarity polarity() const noexcept { return polarity_; }
  const std::string& templ() const noexcept { return template_; }
  std::string_view prefix() const noexcept { return std::string_view(template_).substr(0, slot_); }
  std::string_view suffix() const noexcept {
    return std::string_view(template_).substr(slot_ + 3);
  }
  // Template with the topic substituted into the slot.
  std::string fill(std::string_view topic) const;

  bool operator==(const StancePattern& o) const {
    return polarity_ == o.polarity_ && template_ == o.template_;
  }

 private:
  Polarity polarity_;
  std::string template_;
  std::size_t slot_;
};

struct PatternCandidate {
  StancePattern pattern;
  std::size_t distinct_user_count = 0;
  std::size_t occurrence_count = 0;
};

struct HarvestConfig {
  // Whole tokens kept before the topic keyword.
  std::size_t window = 3;
};

// For every (author, topic, polarity) carrying a hashtag occurrence, each
// sentence in the author's other tweets that contains the topic at a token
// boundary yields the template "window + {A} + rest of sentence". Templates
// that still contain the keyword (or a literal slot marker) are dropped.
// Output is in rank order (see rank_candidates).
std::vector<PatternCandidate> harvest_candidates(const std::vector<Tweet>& tweets,
                                                 const std::vector<HashtagOccurrence>& occurrences,
                                                 const HarvestConfig& cfg = {});

// Sorts by distinct users desc, occurrences desc, template asc, polarity.
void rank_candidates(std::vector<PatternCandidate>& candidates);

// Writes the top_n ranked candidates as
// `polarity<TAB>template<TAB>user_count<TAB>occurrence_count`.
void rank_and_export(std::vector<PatternCandidate> candidates, std::size_t top_n,
                     const std::filesystem::path& out);

struct CuratedPatterns {
  std::vector<StancePattern> pro;
  std::vector<StancePattern> con;
};

// Reads `polarity<TAB>template[<TAB>user_count<TAB>occurrence_count]` lines;
// the count columns of an exported candidate file are accepted and ignored.
// Errors name the offending line.
CuratedPatterns load_curated(const std::filesystem::path& path);
CuratedPatterns parse_curated(std::istream& in);

void write_curated(const std::filesystem::path& path, const CuratedPatterns& patterns);

}  // namespace topicpref
