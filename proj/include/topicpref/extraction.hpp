#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "topicpref/corpus.hpp"
#include "topicpref/patterns.hpp"
#include "topicpref/sparse_matrix.hpp"

namespace topicpref {

struct PreferenceInstance {
  std::string user_id;
  std::string topic;
  int polarity = 1;  // +1 or -1

  auto operator<=>(const PreferenceInstance&) const = default;
};

// Set of target topics, case-folded. Order is irrelevant for matching.
class TopicVocabulary {
 public:
  TopicVocabulary() = default;
  explicit TopicVocabulary(const std::vector<std::string>& topics);

  const std::vector<std::string>& topics() const noexcept { return topics_; }
  bool contains(const std::string& folded) const { return members_.count(folded) > 0; }
  std::size_t size() const noexcept { return topics_.size(); }

 private:
  std::vector<std::string> topics_;
  std::set<std::string> members_;
};

// One topic per line.
std::vector<std::string> read_topic_list(const std::filesystem::path& path);
void write_topic_list(const std::filesystem::path& path, const std::vector<std::string>& topics);

// Matches one normalized sentence against the patterns. A sentence yields
// (t, +1) when some occurrence of topic t at a token boundary lines up with
// the slot of a pro template: the sentence text after the occurrence equals
// the template suffix and the text before it ends, at a token start, with the
// template prefix (compared case-folded). At most one instance per
// (sentence, topic, polarity).
std::vector<std::pair<std::string, int>> match_sentence(const std::string& sentence, const CuratedPatterns& patterns,
                                                        const TopicVocabulary& topics);

// Instances in tweet order, then sentence order, then topic vocabulary order.
std::vector<PreferenceInstance> extract_instances(const std::vector<Tweet>& tweets, const CuratedPatterns& patterns,
                                                  const TopicVocabulary& topics);

struct PairCounts {
  std::size_t pro = 0;
  std::size_t con = 0;

  bool operator==(const PairCounts&) const = default;
};

// (user, topic) -> counts; every stored pair has pro + con >= 1.
using InstanceCounts = std::map<std::pair<std::string, std::string>, PairCounts>;

struct FilterConfig {
  std::size_t min_occurrences = 5;
  std::set<std::string> stop_topics;
  // Repeat the three removal steps until nothing changes. Off by default:
  // the standard filter is a single pass.
  bool until_stable = false;
};

InstanceCounts aggregate(const std::vector<PreferenceInstance>& instances);

// Drops users with fewer than min_occurrences total instances, then topics
// with fewer than min_occurrences (counted after the user step), then stop
// topics.
InstanceCounts filter_instances(const std::vector<PreferenceInstance>& instances, const FilterConfig& cfg);
InstanceCounts filter_counts(InstanceCounts counts, const FilterConfig& cfg);

// (pro - con) / (pro + con).
double preference_value(const PairCounts& c);

// Users and topics are ordered lexicographically. Throws std::invalid_argument
// on empty counts.
SparseMatrix build_matrix(const InstanceCounts& counts);

// `user<TAB>topic<TAB>+1|-1`.
void write_instances(const std::filesystem::path& path, const std::vector<PreferenceInstance>& instances);
std::vector<PreferenceInstance> read_instances(const std::filesystem::path& path);

}  // namespace topicpref
