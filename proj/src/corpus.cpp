#include "topicpref/corpus.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "topicpref/errors.hpp"
#include "topicpref/text.hpp"

namespace topicpref {

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::string sanitize(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  }
  return out;
}

std::string padded(std::string_view prefix, std::size_t value, std::size_t count) {
  std::size_t width = 1;
  for (std::size_t n = count > 0 ? count - 1 : 0; n >= 10; n /= 10) ++width;
  auto digits = std::to_string(value);
  return std::string(prefix) + std::string(width > digits.size() ? width - digits.size() : 0, '0') + digits;
}

const std::vector<std::string>& filler_sentences() {
  static const std::vector<std::string> kFillers = {
      "What a day.",        "Just got home.",          "Coffee time!", "Reading the news again.",
      "Any thoughts?",      "Long meeting today.",     "So tired.",    "Weekend plans are set.",
      "Rain all morning.", "Watching the debate live."};
  return kFillers;
}

}  // namespace

std::optional<Tweet> parse_tweet_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  auto fields = split_tabs(line);
  if (fields.size() != 5) return std::nullopt;
  Tweet t;
  t.tweet_id = std::string(text::trim(fields[0]));
  t.user_id = std::string(text::trim(fields[1]));
  if (t.tweet_id.empty() || t.user_id.empty()) return std::nullopt;
  auto ts = text::trim(fields[2]);
  auto [ptr, ec] = std::from_chars(ts.data(), ts.data() + ts.size(), t.timestamp);
  if (ec != std::errc{} || ptr != ts.data() + ts.size() || ts.empty()) return std::nullopt;
  auto flag = text::trim(fields[3]);
  if (flag == "0") {
    t.is_retweet = false;
  } else if (flag == "1") {
    t.is_retweet = true;
  } else {
    return std::nullopt;
  }
  if (text::trim(fields[4]).empty()) return std::nullopt;
  t.text = std::string(fields[4]);
  return t;
}

std::string format_tweet_line(const Tweet& tweet) {
  std::string out;
  out += sanitize(tweet.tweet_id);
  out += '\t';
  out += sanitize(tweet.user_id);
  out += '\t';
  out += std::to_string(tweet.timestamp);
  out += '\t';
  out += tweet.is_retweet ? '1' : '0';
  out += '\t';
  out += sanitize(tweet.text);
  return out;
}

CorpusReader::CorpusReader(const std::filesystem::path& path, bool drop_retweets)
    : in_(path, std::ios::binary), drop_retweets_(drop_retweets) {
  if (!in_) throw IoError("cannot open corpus file: " + path.string());
}

bool CorpusReader::next(Tweet& out) {
  std::string line;
  while (std::getline(in_, line)) {
    if (text::trim(line).empty()) continue;
    auto parsed = parse_tweet_line(line);
    if (!parsed || !seen_ids_.insert(parsed->tweet_id).second) {
      ++stats_.malformed_lines;
      continue;
    }
    if (drop_retweets_ && parsed->is_retweet) {
      ++stats_.retweets_removed;
      continue;
    }
    ++stats_.tweet_count;
    if (users_.insert(parsed->user_id).second) ++stats_.user_count;
    out = std::move(*parsed);
    return true;
  }
  if (in_.bad()) throw IoError("read failure while scanning corpus");
  return false;
}

Corpus ingest(const std::filesystem::path& path, bool drop_retweets) {
  CorpusReader reader(path, drop_retweets);
  Corpus corpus;
  Tweet t;
  while (reader.next(t)) corpus.tweets.push_back(std::move(t));
  corpus.stats = reader.stats();
  return corpus;
}

void write_corpus(const std::filesystem::path& path, const std::vector<Tweet>& tweets) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write corpus file: " + path.string());
  for (const auto& t : tweets) out << format_tweet_line(t) << '\n';
  if (!out) throw IoError("write failure: " + path.string());
}

void SyntheticSpec::validate() const {
  if (num_users == 0) throw std::invalid_argument("num_users must be positive");
  if (num_topics == 0) throw std::invalid_argument("num_topics must be positive");
  if (true_rank == 0) throw std::invalid_argument("true_rank must be positive");
  if (true_rank > std::min(num_users, num_topics))
    throw std::invalid_argument("true_rank must not exceed min(num_users, num_topics)");
  if (!(density > 0.0 && density <= 1.0)) throw std::invalid_argument("density must lie in (0, 1]");
  if (!(polarity_noise >= 0.0 && polarity_noise < 1.0))
    throw std::invalid_argument("polarity_noise must lie in [0, 1)");
  if (statements_min == 0 || statements_max < statements_min)
    throw std::invalid_argument("statements range must satisfy 1 <= min <= max");
  if (!(hashtag_rate >= 0.0 && hashtag_rate <= 1.0)) throw std::invalid_argument("hashtag_rate must lie in [0, 1]");
  if (!(retweet_rate >= 0.0 && retweet_rate <= 1.0)) throw std::invalid_argument("retweet_rate must lie in [0, 1]");
  if (!(factor_decay > 0.0 && factor_decay <= 1.0)) throw std::invalid_argument("factor_decay must lie in (0, 1]");
}

const std::vector<std::string>& synthetic_pro_templates() {
  static const std::vector<std::string> kPro = {"I support {A}.", "{A} is necessary.", "welcome {A}!",
                                                "we need {A} now."};
  return kPro;
}

const std::vector<std::string>& synthetic_con_templates() {
  static const std::vector<std::string> kCon = {"I don't want {A}.", "{A} is completely wrong.",
                                                "do not let {A} pass.", "stop {A} now!"};
  return kCon;
}

SyntheticCorpus generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto coin = [&](double p) { return p > 0.0 && unit(rng) < p; };
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };

  SyntheticCorpus out;
  const auto r = spec.true_rank;
  std::vector<double> user_vecs(spec.num_users * r);
  std::vector<double> topic_vecs(spec.num_topics * r);
  std::vector<double> scale(r);
  for (std::size_t d = 0; d < r; ++d) scale[d] = std::pow(spec.factor_decay, static_cast<double>(d));
  for (std::size_t i = 0; i < user_vecs.size(); ++i) user_vecs[i] = scale[i % r] * normal(rng);
  for (std::size_t i = 0; i < topic_vecs.size(); ++i) topic_vecs[i] = scale[i % r] * normal(rng);
  for (std::size_t u = 0; u < spec.num_users; ++u) out.users.push_back(padded("user", u, spec.num_users));
  for (std::size_t t = 0; t < spec.num_topics; ++t) out.topics.push_back(padded("topic", t, spec.num_topics));

  constexpr std::int64_t kEpoch = 1360108800;  // 2013-02-06
  std::size_t serial = 0;
  auto emit = [&](std::size_t user, std::string body, bool retweet) {
    Tweet t;
    t.tweet_id = "tw" + std::to_string(serial);
    t.user_id = out.users[user];
    t.timestamp = kEpoch + static_cast<std::int64_t>(serial) * 37;
    t.text = std::move(body);
    t.is_retweet = retweet;
    ++serial;
    out.tweets.push_back(std::move(t));
  };
  auto fill = [](const std::string& tmpl, const std::string& topic) {
    auto pos = tmpl.find(text::kSlot);
    return tmpl.substr(0, pos) + topic + tmpl.substr(pos + text::kSlot.size());
  };
  const auto& fillers = filler_sentences();

  std::uniform_int_distribution<std::size_t> statements(spec.statements_min, spec.statements_max);
  for (std::size_t u = 0; u < spec.num_users; ++u) {
    for (std::size_t t = 0; t < spec.num_topics; ++t) {
      if (spec.density < 1.0 && !(unit(rng) < spec.density)) continue;
      double dot = 0.0;
      for (std::size_t d = 0; d < r; ++d) dot += user_vecs[u * r + d] * topic_vecs[t * r + d];
      const int truth = dot >= 0.0 ? 1 : -1;
      const auto& topic = out.topics[t];
      out.truth.emplace(std::make_pair(out.users[u], topic), truth);

      auto n = statements(rng);
      for (std::size_t i = 0; i < n; ++i) {
        int polarity = coin(spec.polarity_noise) ? -truth : truth;
        const auto& pool = polarity > 0 ? synthetic_pro_templates() : synthetic_con_templates();
        auto sentence = fill(pool[pick(pool.size())], topic);
        if (coin(0.3)) sentence = fillers[pick(fillers.size())] + " " + sentence;
        if (spec.num_users > 1 && coin(spec.retweet_rate)) {
          auto other = (u + 1 + pick(spec.num_users - 1)) % spec.num_users;
          emit(u, sentence, false);
          emit(other, "RT @" + out.users[u] + ": " + sentence, true);
        } else {
          emit(u, std::move(sentence), false);
        }
      }
      if (coin(spec.hashtag_rate)) {
        int polarity = coin(spec.polarity_noise) ? -truth : truth;
        emit(u, "my position is clear #" + topic + (polarity > 0 ? "sansei" : "hantai"), false);
      }
    }
    if (coin(0.5)) emit(u, fillers[pick(fillers.size())], false);
  }
  return out;
}

void write_ground_truth(const std::filesystem::path& path, const GroundTruth& truth) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write ground truth file: " + path.string());
  for (const auto& [cell, v] : truth) out << cell.first << '\t' << cell.second << '\t' << (v > 0 ? "+1" : "-1") << '\n';
  if (!out) throw IoError("write failure: " + path.string());
}

GroundTruth read_ground_truth(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open ground truth file: " + path.string());
  GroundTruth truth;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    auto fields = split_tabs(line);
    if (fields.size() != 3 || (fields[2] != "+1" && fields[2] != "-1"))
      throw FormatError("ground truth line " + std::to_string(lineno) + " is malformed");
    truth[{std::string(fields[0]), std::string(fields[1])}] = fields[2] == "+1" ? 1 : -1;
  }
  return truth;
}

}  // namespace topicpref
