#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace topicpref {

struct Tweet {
  std::string tweet_id;
  std::string user_id;
  std::int64_t timestamp = 0;
  std::string text;
  bool is_retweet = false;

  bool operator==(const Tweet&) const = default;
};

struct CorpusStats {
  std::size_t tweet_count = 0;
  std::size_t user_count = 0;
  std::size_t retweets_removed = 0;
  std::size_t malformed_lines = 0;

  bool operator==(const CorpusStats&) const = default;
};

// Parses one corpus line: tweet_id, user_id, timestamp, is_retweet (0/1), text,
// tab-separated. Returns nullopt for anything malformed.
std::optional<Tweet> parse_tweet_line(std::string_view line);

// Serializes a tweet to its corpus line (no trailing newline). Tabs and
// newlines inside the text are replaced by spaces.
std::string format_tweet_line(const Tweet& tweet);

// Streaming reader over a corpus file. Malformed lines (wrong field count,
// bad timestamp or flag, blank text, repeated tweet_id) are skipped and
// counted; they never abort the stream.
class CorpusReader {
 public:
  CorpusReader(const std::filesystem::path& path, bool drop_retweets);

  // Fills `out` with the next kept tweet; false at end of file.
  bool next(Tweet& out);

  const CorpusStats& stats() const noexcept { return stats_; }

 private:
  std::ifstream in_;
  bool drop_retweets_;
  CorpusStats stats_;
  std::unordered_set<std::string> seen_ids_;
  std::unordered_set<std::string> users_;
};

struct Corpus {
  std::vector<Tweet> tweets;
  CorpusStats stats;
};

// Reads the whole file through CorpusReader.
Corpus ingest(const std::filesystem::path& path, bool drop_retweets);

void write_corpus(const std::filesystem::path& path, const std::vector<Tweet>& tweets);

// --- synthetic corpora ----------------------------------------------------

struct SyntheticSpec {
  std::size_t num_users = 500;
  std::size_t num_topics = 50;
  std::size_t true_rank = 5;
  double density = 0.2;
  double polarity_noise = 0.0;
  std::size_t statements_min = 1;
  std::size_t statements_max = 3;
  // Chance that an observed cell also gets a pro/con hashtag tweet.
  double hashtag_rate = 0.3;
  // Chance that a statement tweet is followed by a retweet of it by another user.
  double retweet_rate = 0.05;
  // Latent dimension d is drawn with standard deviation factor_decay^d, so
  // values below 1 give the planted space a dominant leading axis.
  double factor_decay = 0.7;
  std::uint64_t seed = 1;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

using GroundTruth = std::map<std::pair<std::string, std::string>, int>;

struct SyntheticCorpus {
  std::vector<Tweet> tweets;
  GroundTruth truth;
  std::vector<std::string> users;
  std::vector<std::string> topics;
};

// Statement templates and hashtag rules the generator writes with; exported so
// a generated corpus comes with a matching curated pattern file and rule file.
const std::vector<std::string>& synthetic_pro_templates();
const std::vector<std::string>& synthetic_con_templates();
inline constexpr std::string_view kSyntheticProRule = "#(.+)sansei";
inline constexpr std::string_view kSyntheticConRule = "#(.+)hantai";

// Draws Gaussian latent vectors of dimension true_rank for users and topics;
// each cell is observed with probability `density` and its polarity is the
// sign of the inner product (0 maps to +1). Every emitted stance (statement or
// hashtag) is flipped independently with probability polarity_noise.
SyntheticCorpus generate_synthetic(const SyntheticSpec& spec);

// Ground truth as `user<TAB>topic<TAB>+1|-1` lines.
void write_ground_truth(const std::filesystem::path& path, const GroundTruth& truth);
GroundTruth read_ground_truth(const std::filesystem::path& path);

}  // namespace topicpref
