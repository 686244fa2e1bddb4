#include "topicpref/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "topicpref/corpus.hpp"
#include "topicpref/patterns.hpp"
#include "topicpref/text.hpp"

namespace topicpref {

std::map<std::string, std::string> read_flat_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file: " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = text::trim(line);
    if (t.empty() || t.front() == '#' || t.front() == ';') continue;
    auto eq = t.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    }
    std::string key(text::trim(t.substr(0, eq)));
    std::string value(text::trim(t.substr(eq + 1)));
    if (key.empty()) throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": empty key");
    for (auto& c : key) c = c == '_' ? '-' : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    out[key] = value;
  }
  return out;
}

std::vector<std::size_t> parse_thetas(const std::string& s) {
  std::vector<std::size_t> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    auto t = std::string(text::trim(item));
    if (t.empty()) continue;
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      if (t.front() == '-') throw std::invalid_argument(t);
      v = std::stoull(t, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("theta '" + t + "' is not a non-negative integer");
    }
    if (used != t.size()) throw std::invalid_argument("theta '" + t + "' is not a non-negative integer");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

void PipelineConfig::validate() const {
  auto require = [](const std::filesystem::path& p, const char* what) {
    if (p.empty()) throw StageError("config", std::string(what) + " path is not set");
    if (!std::filesystem::is_regular_file(p)) {
      throw StageError("config", std::string(what) + " file not found: " + p.string());
    }
  };
  require(corpus, "corpus");
  require(patterns, "patterns");
  if (rules) require(*rules, "rules");
  if (topics) require(*topics, "topics");
  if (stop_topics) require(*stop_topics, "stop-topics");
  if (!rules && !topics) throw StageError("config", "either a rules file or a topics file is required");
  if (out_dir.empty()) throw StageError("config", "output directory is not set");
  try {
    train.validate();
  } catch (const std::invalid_argument& e) {
    throw StageError("config", e.what());
  }
  if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0)) {
    throw StageError("config", "holdout fraction must lie in (0, 1)");
  }
  if (!std::is_sorted(thetas.begin(), thetas.end())) throw StageError("config", "thetas must be ascending");
}

void write_threshold_report(std::ostream& out, const ThresholdReport& report, std::size_t train_nnz,
                            std::size_t test_cells, double train_rmse) {
  auto fmt = [](const std::optional<double>& v) {
    if (!v) return std::string("NA");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", *v);
    return std::string(buf);
  };
  out << "theta\tmodel_accuracy\tbaseline_accuracy\tusers_evaluated\tcells_evaluated\n";
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report) {
    out << r.theta << '\t' << fmt(r.model_accuracy) << '\t' << fmt(r.baseline_accuracy) << '\t' << r.users_evaluated
        << '\t' << r.cells_evaluated << '\n';
    nlohmann::json row = {{"theta", r.theta},
                          {"users_evaluated", r.users_evaluated},
                          {"cells_evaluated", r.cells_evaluated}};
    row["model_accuracy"] = r.model_accuracy ? nlohmann::json(*r.model_accuracy) : nlohmann::json(nullptr);
    row["baseline_accuracy"] = r.baseline_accuracy ? nlohmann::json(*r.baseline_accuracy) : nlohmann::json(nullptr);
    rows.push_back(row);
  }
  nlohmann::json summary = {
      {"train_nnz", train_nnz}, {"test_cells", test_cells}, {"train_rmse", train_rmse}, {"rows", rows}};
  out << "# summary " << summary.dump() << '\n';
}

namespace {

template <typename Fn>
auto stage(const char* name, std::ostream* log, Fn&& fn) -> decltype(fn()) {
  if (log) *log << "[" << name << "] start\n";
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

}  // namespace

PipelineSummary run_pipeline(const PipelineConfig& cfg, std::ostream* log) {
  cfg.validate();
  PipelineSummary summary;
  const auto& out = cfg.out_dir;
  stage("setup", log, [&] { std::filesystem::create_directories(out); });

  auto corpus = stage("corpus", log, [&] {
    auto c = ingest(cfg.corpus, cfg.drop_retweets);
    std::ofstream f(out / "corpus_stats.tsv", std::ios::binary);
    f << "tweet_count\t" << c.stats.tweet_count << "\nuser_count\t" << c.stats.user_count << "\nretweets_removed\t"
      << c.stats.retweets_removed << "\nmalformed_lines\t" << c.stats.malformed_lines << '\n';
    if (!f) throw IoError("cannot write corpus_stats.tsv");
    return c;
  });
  summary.corpus = corpus.stats;
  if (log) {
    *log << "[corpus] " << corpus.stats.tweet_count << " tweets, " << corpus.stats.user_count << " users, "
         << corpus.stats.retweets_removed << " retweets removed, " << corpus.stats.malformed_lines
         << " malformed lines\n";
  }

  auto vocabulary = stage("patterns", log, [&] {
    std::vector<std::string> topics;
    if (cfg.rules) {
      auto rules = load_rules(*cfg.rules);
      auto occurrences = find_hashtag_occurrences(corpus.tweets, rules);
      summary.hashtag_occurrences = occurrences.size();
      topics = build_topic_set(occurrences);
      auto candidates = harvest_candidates(corpus.tweets, occurrences, HarvestConfig{cfg.window});
      summary.candidates = candidates.size();
      rank_and_export(std::move(candidates), cfg.top_candidates, out / "candidates.tsv");
    }
    if (cfg.topics) topics = read_topic_list(*cfg.topics);
    write_topic_list(out / "topics.txt", topics);
    return TopicVocabulary(topics);
  });
  summary.vocabulary = vocabulary.size();

  auto curated = stage("patterns", nullptr, [&] { return load_curated(cfg.patterns); });
  if (log) {
    *log << "[patterns] " << summary.vocabulary << " topics, " << curated.pro.size() << " pro / " << curated.con.size()
         << " con curated patterns\n";
  }

  auto matrix = stage("extract", log, [&] {
    auto instances = extract_instances(corpus.tweets, curated, vocabulary);
    summary.raw_instances = instances.size();
    write_instances(out / "instances.tsv", instances);
    auto filter = cfg.filter;
    if (cfg.stop_topics) {
      for (auto& t : read_topic_list(*cfg.stop_topics)) filter.stop_topics.insert(std::move(t));
    }
    auto m = build_matrix(filter_instances(instances, filter));
    write_matrix_dir(out / "matrix", m);
    return m;
  });
  summary.users = matrix.rows();
  summary.topics = matrix.cols();
  summary.nnz = matrix.nnz();
  if (log) {
    *log << "[extract] " << summary.raw_instances << " instances -> " << summary.users << " users x " << summary.topics
         << " topics, nnz " << summary.nnz << '\n';
  }

  stage("train", log, [&] {
    auto result = factorize(matrix, cfg.train);
    save_model(result.model, out / "model.bin");
    std::ofstream trace(out / "train_trace.tsv", std::ios::binary);
    trace << "epoch\trmse\n";
    char buf[32];
    for (std::size_t e = 0; e < result.rmse_per_epoch.size(); ++e) {
      std::snprintf(buf, sizeof buf, "%.10f", result.rmse_per_epoch[e]);
      trace << e + 1 << '\t' << buf << '\n';
    }
    if (!trace) throw IoError("cannot write train_trace.tsv");
    summary.final_rmse = result.rmse_per_epoch.back();
  });
  if (log) *log << "[train] final RMSE " << summary.final_rmse << '\n';

  stage("eval", log, [&] {
    auto holdout = split(matrix, cfg.holdout_fraction, cfg.split_seed);
    auto result = factorize(holdout.train, cfg.train);
    summary.report = threshold_sweep(result.model, holdout, cfg.thetas);
    std::ofstream f(out / "eval_report.tsv", std::ios::binary);
    write_threshold_report(f, summary.report, holdout.train.nnz(), holdout.test.size(), result.rmse_per_epoch.back());
    if (!f) throw IoError("cannot write eval_report.tsv");
  });
  if (log) *log << "[eval] report written to " << (out / "eval_report.tsv").string() << '\n';
  return summary;
}

}  // namespace topicpref
