#include "topicpref/patterns.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "topicpref/errors.hpp"
#include "topicpref/text.hpp"

namespace topicpref {

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (auto tab = line.find('\t'); tab != std::string_view::npos; tab = line.find('\t', start)) {
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  fields.push_back(line.substr(start));
  return fields;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

std::string_view to_string(Polarity p) { return p == Polarity::kPro ? "pro" : "con"; }

Polarity parse_polarity(std::string_view s) {
  s = text::trim(s);
  if (s == "pro") return Polarity::kPro;
  if (s == "con") return Polarity::kCon;
  throw ConfigError("unknown polarity '" + std::string(s) + "' (expected pro or con)");
}

HashtagRule::HashtagRule(Polarity polarity, std::string pattern) : polarity_(polarity), pattern_(std::move(pattern)) {
  try {
    regex_ = std::regex(pattern_, std::regex::ECMAScript);
  } catch (const std::regex_error& e) {
    throw ConfigError("invalid hashtag rule '" + pattern_ + "': " + e.what());
  }
  if (regex_.mark_count() != 1) {
    throw ConfigError("hashtag rule '" + pattern_ + "' must have exactly one capture group, has " +
                      std::to_string(regex_.mark_count()));
  }
}

std::vector<HashtagRule> load_rules(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open rules file: " + path.string());
  std::vector<HashtagRule> rules;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(std::move(line));
    if (text::trim(line).empty()) continue;
    auto fields = split_tabs(line);
    if (fields.size() != 2) {
      throw ConfigError("rules line " + std::to_string(lineno) + ": expected polarity<TAB>regex");
    }
    try {
      rules.emplace_back(parse_polarity(fields[0]), std::string(fields[1]));
    } catch (const ConfigError& e) {
      throw ConfigError("rules line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return rules;
}

std::vector<std::string_view> hashtag_tokens(std::string_view text) {
  std::vector<std::string_view> out;
  for (auto tok : text::split_tokens(text)) {
    if (tok.size() > 1 && tok.front() == '#') out.push_back(tok);
  }
  return out;
}

std::vector<HashtagOccurrence> find_hashtag_occurrences(const std::vector<Tweet>& tweets,
                                                        const std::vector<HashtagRule>& rules) {
  std::vector<HashtagOccurrence> out;
  std::match_results<std::string_view::const_iterator> m;
  for (const auto& tweet : tweets) {
    for (auto tok : hashtag_tokens(tweet.text)) {
      for (const auto& rule : rules) {
        if (!std::regex_match(tok.begin(), tok.end(), m, rule.regex())) continue;
        auto topic = text::fold_case(text::normalize_space(tok.substr(static_cast<std::size_t>(m[1].first - tok.begin()), static_cast<std::size_t>(m[1].length()))));
        if (topic.empty()) continue;
        out.push_back({tweet.user_id, std::move(topic), rule.polarity(), tweet.tweet_id});
      }
    }
  }
  return out;
}

std::vector<std::string> build_topic_set(const std::vector<HashtagOccurrence>& occurrences) {
  std::map<std::string, std::size_t> counts;
  for (const auto& o : occurrences) ++counts[o.topic];
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> topics;
  topics.reserve(ranked.size());
  for (auto& [topic, n] : ranked) topics.push_back(topic);
  return topics;
}

StancePattern::StancePattern(Polarity polarity, std::string tmpl) : polarity_(polarity), template_(std::move(tmpl)) {
  auto first = template_.find(text::kSlot);
  if (first == std::string::npos) throw ConfigError("template '" + template_ + "' has no slot marker {A}");
  if (template_.find(text::kSlot, first + 1) != std::string::npos) {
    throw ConfigError("template '" + template_ + "' has more than one slot marker {A}");
  }
  slot_ = first;
  if (text::trim(prefix()).empty() && text::trim(suffix()).empty()) {
    throw ConfigError("template '" + template_ + "' is empty outside the slot");
  }
}

std::string StancePattern::fill(std::string_view topic) const {
  std::string out(prefix());
  out += topic;
  out += suffix();
  return out;
}

std::vector<PatternCandidate> harvest_candidates(const std::vector<Tweet>& tweets,
                                                 const std::vector<HashtagOccurrence>& occurrences,
                                                 const HarvestConfig& cfg) {
  using UserTopic = std::pair<std::string, std::string>;
  std::map<UserTopic, std::set<Polarity>> stances;
  std::map<UserTopic, std::unordered_set<std::string>> source_tweets;
  for (const auto& o : occurrences) {
    UserTopic key{o.user_id, o.topic};
    stances[key].insert(o.polarity);
    source_tweets[key].insert(o.tweet_id);
  }

  std::unordered_map<std::string, std::vector<const Tweet*>> by_user;
  for (const auto& t : tweets) by_user[t.user_id].push_back(&t);

  struct Tally {
    std::set<std::string> users;
    std::size_t occurrences = 0;
  };
  std::map<std::pair<Polarity, std::string>, Tally> tallies;

  for (const auto& [key, polarities] : stances) {
    const auto& [user, topic] = key;
    auto it = by_user.find(user);
    if (it == by_user.end()) continue;
    const auto& skip = source_tweets[key];
    for (const Tweet* tweet : it->second) {
      if (skip.count(tweet->tweet_id)) continue;
      for (const auto& sentence : text::split_sentences(tweet->text)) {
        if (sentence.find(text::kSlot) != std::string::npos) continue;
        auto folded = text::fold_case(sentence);
        for (auto pos : text::find_bounded(folded, topic)) {
          auto start = text::window_start(sentence, pos, cfg.window);
          auto head = sentence.substr(start, pos - start);
          auto tail = sentence.substr(pos + topic.size());
          auto rest = text::fold_case(head + '\x01' + tail);
          if (rest.find(topic) != std::string::npos) continue;
          if (text::trim(head).empty() && text::trim(tail).empty()) continue;
          std::string tmpl = head + std::string(text::kSlot) + tail;
          for (auto pol : polarities) {
            auto& tally = tallies[{pol, tmpl}];
            tally.users.insert(user);
            ++tally.occurrences;
          }
        }
      }
    }
  }

  std::vector<PatternCandidate> out;
  out.reserve(tallies.size());
  for (auto& [key, tally] : tallies) {
    out.push_back({StancePattern(key.first, key.second), tally.users.size(), tally.occurrences});
  }
  rank_candidates(out);
  return out;
}

void rank_candidates(std::vector<PatternCandidate>& candidates) {
  std::sort(candidates.begin(), candidates.end(), [](const PatternCandidate& a, const PatternCandidate& b) {
    if (a.distinct_user_count != b.distinct_user_count) return a.distinct_user_count > b.distinct_user_count;
    if (a.occurrence_count != b.occurrence_count) return a.occurrence_count > b.occurrence_count;
    if (a.pattern.templ() != b.pattern.templ()) return a.pattern.templ() < b.pattern.templ();
    return a.pattern.polarity() < b.pattern.polarity();
  });
}

void rank_and_export(std::vector<PatternCandidate> candidates, std::size_t top_n, const std::filesystem::path& out) {
  rank_candidates(candidates);
  if (candidates.size() > top_n) candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(top_n), candidates.end());
  std::ofstream f(out, std::ios::binary);
  if (!f) throw IoError("cannot write candidate file: " + out.string());
  for (const auto& c : candidates) {
    f << to_string(c.pattern.polarity()) << '\t' << c.pattern.templ() << '\t' << c.distinct_user_count << '\t'
      << c.occurrence_count << '\n';
  }
  if (!f) throw IoError("write failure: " + out.string());
}

CuratedPatterns parse_curated(std::istream& in) {
  CuratedPatterns out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(std::move(line));
    if (text::trim(line).empty()) continue;
    auto fields = split_tabs(line);
    if (fields.size() != 2 && fields.size() != 4) {
      throw ConfigError("patterns line " + std::to_string(lineno) + ": expected polarity<TAB>template");
    }
    try {
      StancePattern p(parse_polarity(fields[0]), text::normalize_space(fields[1]));
      (p.polarity() == Polarity::kPro ? out.pro : out.con).push_back(std::move(p));
    } catch (const ConfigError& e) {
      throw ConfigError("patterns line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

CuratedPatterns load_curated(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open patterns file: " + path.string());
  return parse_curated(in);
}

void write_curated(const std::filesystem::path& path, const CuratedPatterns& patterns) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write patterns file: " + path.string());
  for (const auto& p : patterns.pro) out << "pro\t" << p.templ() << '\n';
  for (const auto& p : patterns.con) out << "con\t" << p.templ() << '\n';
  if (!out) throw IoError("write failure: " + path.string());
}

}  // namespace topicpref
