#include "topicpref/extraction.hpp"

#include <fstream>
#include <stdexcept>

#include "topicpref/errors.hpp"
#include "topicpref/text.hpp"

namespace topicpref {

TopicVocabulary::TopicVocabulary(const std::vector<std::string>& topics) {
  for (const auto& t : topics) {
    auto folded = text::fold_case(text::normalize_space(t));
    if (folded.empty()) continue;
    if (members_.insert(folded).second) topics_.push_back(std::move(folded));
  }
}

std::vector<std::string> read_topic_list(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open topic list: " + path.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    auto t = text::trim(line);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

void write_topic_list(const std::filesystem::path& path, const std::vector<std::string>& topics) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write topic list: " + path.string());
  for (const auto& t : topics) out << t << '\n';
  if (!out) throw IoError("write failure: " + path.string());
}

namespace {

struct FoldedPattern {
  std::string prefix;
  std::string suffix;
};

std::vector<FoldedPattern> fold_all(const std::vector<StancePattern>& patterns) {
  std::vector<FoldedPattern> out;
  out.reserve(patterns.size());
  for (const auto& p : patterns) out.push_back({text::fold_case(p.prefix()), text::fold_case(p.suffix())});
  return out;
}

bool slot_fits(std::string_view folded, std::size_t pos, std::size_t len, const FoldedPattern& p) {
  if (folded.substr(pos + len) != p.suffix) return false;
  if (p.prefix.size() > pos) return false;
  auto start = pos - p.prefix.size();
  if (folded.substr(start, p.prefix.size()) != p.prefix) return false;
  return start == 0 || folded[start - 1] == ' ';
}

bool any_fits(std::string_view folded, const std::vector<std::size_t>& positions, std::size_t len,
              const std::vector<FoldedPattern>& patterns) {
  for (auto pos : positions) {
    for (const auto& p : patterns) {
      if (slot_fits(folded, pos, len, p)) return true;
    }
  }
  return false;
}

std::vector<std::pair<std::string, int>> match_folded(const std::string& folded, const std::vector<FoldedPattern>& pro,
                                                      const std::vector<FoldedPattern>& con,
                                                      const TopicVocabulary& topics) {
  std::vector<std::pair<std::string, int>> out;
  for (const auto& topic : topics.topics()) {
    auto positions = text::find_bounded(folded, topic);
    if (positions.empty()) continue;
    if (any_fits(folded, positions, topic.size(), pro)) out.emplace_back(topic, 1);
    if (any_fits(folded, positions, topic.size(), con)) out.emplace_back(topic, -1);
  }
  return out;
}

}  // namespace

std::vector<std::pair<std::string, int>> match_sentence(const std::string& sentence, const CuratedPatterns& patterns,
                                                        const TopicVocabulary& topics) {
  return match_folded(text::fold_case(text::normalize_space(sentence)), fold_all(patterns.pro), fold_all(patterns.con),
                      topics);
}

std::vector<PreferenceInstance> extract_instances(const std::vector<Tweet>& tweets, const CuratedPatterns& patterns,
                                                  const TopicVocabulary& topics) {
  std::vector<PreferenceInstance> out;
  if (patterns.pro.empty() && patterns.con.empty()) return out;
  auto pro = fold_all(patterns.pro);
  auto con = fold_all(patterns.con);
  for (const auto& tweet : tweets) {
    for (const auto& sentence : text::split_sentences(tweet.text)) {
      for (auto& [topic, polarity] : match_folded(text::fold_case(sentence), pro, con, topics)) {
        out.push_back({tweet.user_id, std::move(topic), polarity});
      }
    }
  }
  return out;
}

InstanceCounts aggregate(const std::vector<PreferenceInstance>& instances) {
  InstanceCounts counts;
  for (const auto& inst : instances) {
    auto& c = counts[{inst.user_id, inst.topic}];
    (inst.polarity > 0 ? c.pro : c.con) += 1;
  }
  return counts;
}

namespace {

// One pass of the three removal steps; returns true if anything was removed.
bool filter_pass(InstanceCounts& counts, const FilterConfig& cfg) {
  const auto before = counts.size();
  std::map<std::string, std::size_t> user_totals;
  for (const auto& [key, c] : counts) user_totals[key.first] += c.pro + c.con;
  std::erase_if(counts, [&](const auto& kv) { return user_totals[kv.first.first] < cfg.min_occurrences; });

  std::map<std::string, std::size_t> topic_totals;
  for (const auto& [key, c] : counts) topic_totals[key.second] += c.pro + c.con;
  std::erase_if(counts, [&](const auto& kv) { return topic_totals[kv.first.second] < cfg.min_occurrences; });

  if (!cfg.stop_topics.empty()) {
    std::set<std::string> stop;
    for (const auto& s : cfg.stop_topics) stop.insert(text::fold_case(text::normalize_space(s)));
    std::erase_if(counts, [&](const auto& kv) { return stop.count(kv.first.second) > 0; });
  }
  return counts.size() != before;
}

}  // namespace

InstanceCounts filter_counts(InstanceCounts counts, const FilterConfig& cfg) {
  bool changed = filter_pass(counts, cfg);
  while (cfg.until_stable && changed) changed = filter_pass(counts, cfg);
  return counts;
}

InstanceCounts filter_instances(const std::vector<PreferenceInstance>& instances, const FilterConfig& cfg) {
  return filter_counts(aggregate(instances), cfg);
}

double preference_value(const PairCounts& c) {
  const auto total = static_cast<double>(c.pro + c.con);
  return (static_cast<double>(c.pro) - static_cast<double>(c.con)) / total;
}

SparseMatrix build_matrix(const InstanceCounts& counts) {
  if (counts.empty()) throw std::invalid_argument("no preference instances left to build a matrix from");
  std::set<std::string> user_set;
  std::set<std::string> topic_set;
  for (const auto& [key, c] : counts) {
    if (c.pro + c.con == 0) throw std::invalid_argument("stored pair with zero counts: " + key.first + "/" + key.second);
    user_set.insert(key.first);
    topic_set.insert(key.second);
  }
  Index users(std::vector<std::string>(user_set.begin(), user_set.end()));
  Index topics(std::vector<std::string>(topic_set.begin(), topic_set.end()));
  std::vector<Cell> cells;
  cells.reserve(counts.size());
  for (const auto& [key, c] : counts) {
    cells.push_back({*users.find(key.first), *topics.find(key.second), preference_value(c)});
  }
  return SparseMatrix(std::move(users), std::move(topics), std::move(cells));
}

void write_instances(const std::filesystem::path& path, const std::vector<PreferenceInstance>& instances) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write instance dump: " + path.string());
  for (const auto& i : instances) out << i.user_id << '\t' << i.topic << '\t' << (i.polarity > 0 ? "+1" : "-1") << '\n';
  if (!out) throw IoError("write failure: " + path.string());
}

std::vector<PreferenceInstance> read_instances(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open instance dump: " + path.string());
  std::vector<PreferenceInstance> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto a = line.find('\t');
    auto b = a == std::string::npos ? a : line.find('\t', a + 1);
    if (b == std::string::npos) throw FormatError("instance line " + std::to_string(lineno) + " is malformed");
    auto pol = line.substr(b + 1);
    if (pol != "+1" && pol != "-1") throw FormatError("instance line " + std::to_string(lineno) + ": bad polarity");
    out.push_back({line.substr(0, a), line.substr(a + 1, b - a - 1), pol == "+1" ? 1 : -1});
  }
  return out;
}

}  // namespace topicpref
