#pragma once

// Hand-built extraction fixture plus an independent matcher used as its oracle.

#include <algorithm>
#include <cctype>
#include <string>
#include <vector>

#include "topicpref/corpus.hpp"
#include "topicpref/extraction.hpp"
#include "topicpref/patterns.hpp"
#include "topicpref/text.hpp"

namespace fixtures {

using topicpref::CuratedPatterns;
using topicpref::Polarity;
using topicpref::PreferenceInstance;
using topicpref::StancePattern;
using topicpref::Tweet;

inline std::vector<Tweet> stance_tweets() {
  const std::vector<std::pair<const char*, const char*>> rows = {
      {"u1", "I support TPP."},
      {"u1", "Nuclear power is necessary. I don't want the tax hike."},
      {"u2", "I don't want tax hike."},
      {"u2", "do not let casino pass."},
      {"u3", "i SUPPORT tpp."},
      {"u3", "I support TPP"},
      {"u3", "Honestly I support casino."},
      {"u4", "We all support TPP."},
      {"u4", "I support TPPs."},
      {"u4", "I support nuclear power. I support nuclear power."},
      {"u5", "Casino is necessary! Tax hike is necessary."},
      {"u5", "I support bananas."},
      {"u5", "do not let TPP pass. do not let TPP pass."},
      {"u6", "I don't want TPP."},
      {"u6", "I don't want  casino  ."},
      {"u6", "Xi support TPP."},
      {"u7", "TPP is necessary. TPP is necessary"},
      {"u7", "I support tax hike.I don't want casino."},
      {"u8", "nuclear power is necessary. do not let nuclear power pass."},
      {"u8", "I support TPP? Maybe."},
  };
  std::vector<Tweet> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.push_back(Tweet{"f" + std::to_string(i + 1), rows[i].first, static_cast<std::int64_t>(i), rows[i].second, false});
  }
  return out;
}

inline CuratedPatterns stance_patterns() {
  CuratedPatterns cp;
  cp.pro.emplace_back(Polarity::kPro, "I support {A}.");
  cp.pro.emplace_back(Polarity::kPro, "{A} is necessary.");
  cp.con.emplace_back(Polarity::kCon, "I don't want {A}.");
  cp.con.emplace_back(Polarity::kCon, "do not let {A} pass.");
  return cp;
}

inline std::vector<std::string> stance_topics() { return {"TPP", "nuclear power", "power", "tax hike", "casino"}; }

// Worked out by hand, sorted.
inline std::vector<PreferenceInstance> expected_instances() {
  std::vector<PreferenceInstance> v = {
      {"u1", "tpp", 1},           {"u1", "nuclear power", 1}, {"u1", "power", 1},
      {"u2", "tax hike", -1},     {"u2", "casino", -1},       {"u3", "tpp", 1},
      {"u3", "casino", 1},        {"u4", "nuclear power", 1}, {"u4", "nuclear power", 1},
      {"u5", "tax hike", 1},      {"u5", "tpp", -1},          {"u5", "tpp", -1},
      {"u6", "tpp", -1},          {"u7", "tpp", 1},           {"u7", "tax hike", 1},
      {"u7", "casino", -1},       {"u8", "nuclear power", 1}, {"u8", "power", 1},
      {"u8", "nuclear power", -1},
  };
  std::sort(v.begin(), v.end());
  return v;
}

inline std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

inline bool edge(const std::string& s, std::ptrdiff_t i) {
  if (i < 0 || i >= static_cast<std::ptrdiff_t>(s.size())) return true;
  auto c = static_cast<unsigned char>(s[static_cast<std::size_t>(i)]);
  return c < 0x80 && (std::isspace(c) || std::ispunct(c));
}

// Exhaustive matcher: every (sentence, pattern, topic) triple is tested by
// asking whether the sentence ends with the filled template, starting at a
// token start, with the topic standing at token boundaries. Returns sorted.
inline std::vector<PreferenceInstance> brute_force_instances(const std::vector<Tweet>& tweets,
                                                             const CuratedPatterns& patterns,
                                                             const std::vector<std::string>& topics) {
  std::vector<PreferenceInstance> out;
  for (const auto& tweet : tweets) {
    for (const auto& raw : topicpref::text::split_sentences(tweet.text)) {
      auto sentence = lower(raw);
      std::vector<std::string> seen;
      for (const auto& t : topics) {
        auto topic = lower(t);
        if (std::find(seen.begin(), seen.end(), topic) != seen.end()) continue;
        seen.push_back(topic);
        for (int polarity : {1, -1}) {
          const auto& list = polarity > 0 ? patterns.pro : patterns.con;
          bool hit = false;
          for (const auto& p : list) {
            auto prefix = lower(std::string(p.prefix()));
            auto filled = prefix + topic + lower(std::string(p.suffix()));
            if (filled.size() > sentence.size()) continue;
            auto start = sentence.size() - filled.size();
            if (sentence.compare(start, filled.size(), filled) != 0) continue;
            if (start > 0 && sentence[start - 1] != ' ') continue;
            auto at = static_cast<std::ptrdiff_t>(start + prefix.size());
            if (!edge(sentence, at - 1) || !edge(sentence, at + static_cast<std::ptrdiff_t>(topic.size()))) continue;
            hit = true;
          }
          if (hit) out.push_back({tweet.user_id, topic, polarity});
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace fixtures
