// topicpref: command line front end for the stance-mining and topic
// preference factorization pipeline.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "topicpref/corpus.hpp"
#include "topicpref/evaluation.hpp"
#include "topicpref/extraction.hpp"
#include "topicpref/factorization.hpp"
#include "topicpref/patterns.hpp"
#include "topicpref/pipeline.hpp"
#include "topicpref/topic_space.hpp"

namespace fs = std::filesystem;
using namespace topicpref;

namespace {

std::string fixed(double v, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

std::ofstream open_out(const fs::path& p) {
  ensure_parent(p);
  std::ofstream f(p, std::ios::binary);
  if (!f) throw IoError("cannot write " + p.string());
  return f;
}

// --- corpus ---------------------------------------------------------------

struct CorpusStatsArgs {
  std::string path;
  bool keep_retweets = false;
};

int run_corpus_stats(const CorpusStatsArgs& a) {
  auto c = ingest(a.path, !a.keep_retweets);
  std::cout << "tweet_count\t" << c.stats.tweet_count << "\nuser_count\t" << c.stats.user_count
            << "\nretweets_removed\t" << c.stats.retweets_removed << "\nmalformed_lines\t" << c.stats.malformed_lines
            << '\n';
  return 0;
}

struct SynthArgs {
  SyntheticSpec spec;
  std::string out;
  std::string truth_out;
  std::string patterns_out;
  std::string rules_out;
  std::string topics_out;
};

int run_corpus_synth(const SynthArgs& a) {
  auto syn = generate_synthetic(a.spec);
  ensure_parent(a.out);
  write_corpus(a.out, syn.tweets);
  if (!a.truth_out.empty()) {
    ensure_parent(a.truth_out);
    write_ground_truth(a.truth_out, syn.truth);
  }
  if (!a.patterns_out.empty()) {
    CuratedPatterns cp;
    for (const auto& t : synthetic_pro_templates()) cp.pro.emplace_back(Polarity::kPro, t);
    for (const auto& t : synthetic_con_templates()) cp.con.emplace_back(Polarity::kCon, t);
    ensure_parent(a.patterns_out);
    write_curated(a.patterns_out, cp);
  }
  if (!a.rules_out.empty()) {
    auto f = open_out(a.rules_out);
    f << "pro\t" << kSyntheticProRule << "\ncon\t" << kSyntheticConRule << '\n';
  }
  if (!a.topics_out.empty()) {
    ensure_parent(a.topics_out);
    write_topic_list(a.topics_out, syn.topics);
  }
  std::cerr << "synth: " << syn.tweets.size() << " tweets, " << syn.truth.size() << " observed cells -> " << a.out
            << '\n';
  return 0;
}

// --- patterns -------------------------------------------------------------

struct HarvestArgs {
  std::string corpus;
  std::string rules;
  std::string out;
  std::string topics_out;
  std::size_t top_n = 200;
  std::size_t window = 3;
  bool keep_retweets = false;
};

int run_patterns_harvest(const HarvestArgs& a) {
  auto rules = load_rules(a.rules);
  auto corpus = ingest(a.corpus, !a.keep_retweets);
  auto occurrences = find_hashtag_occurrences(corpus.tweets, rules);
  auto topics = build_topic_set(occurrences);
  auto candidates = harvest_candidates(corpus.tweets, occurrences, HarvestConfig{a.window});
  ensure_parent(a.out);
  auto n = candidates.size();
  rank_and_export(std::move(candidates), a.top_n, a.out);
  if (!a.topics_out.empty()) {
    ensure_parent(a.topics_out);
    write_topic_list(a.topics_out, topics);
  }
  std::cerr << "harvest: " << occurrences.size() << " hashtag occurrences, " << topics.size() << " topics, " << n
            << " candidate patterns (top " << std::min(n, a.top_n) << " written to " << a.out << ")\n";
  return 0;
}

int run_patterns_load(const std::string& path) {
  auto cp = load_curated(path);
  std::cout << "pro\t" << cp.pro.size() << "\ncon\t" << cp.con.size() << '\n';
  return 0;
}

// --- extract --------------------------------------------------------------

struct ExtractArgs {
  std::string corpus;
  std::string patterns;
  std::string topics;
  std::size_t min_count = 5;
  std::string stop_topics;
  std::string out;
  bool keep_retweets = false;
};

int run_extract(const ExtractArgs& a) {
  auto patterns = load_curated(a.patterns);
  TopicVocabulary vocab(read_topic_list(a.topics));
  FilterConfig filter;
  filter.min_occurrences = a.min_count;
  if (!a.stop_topics.empty()) {
    for (auto& t : read_topic_list(a.stop_topics)) filter.stop_topics.insert(std::move(t));
  }
  auto corpus = ingest(a.corpus, !a.keep_retweets);
  auto instances = extract_instances(corpus.tweets, patterns, vocab);
  fs::create_directories(a.out);
  write_instances(fs::path(a.out) / "instances.tsv", instances);
  auto matrix = build_matrix(filter_instances(instances, filter));
  write_matrix_dir(a.out, matrix);
  std::cerr << "extract: " << instances.size() << " instances -> " << matrix.rows() << " users x " << matrix.cols()
            << " topics, nnz " << matrix.nnz() << '\n';
  return 0;
}

// --- train / rmse ---------------------------------------------------------

struct TrainArgs {
  std::string matrix;
  TrainConfig cfg;
  std::string out = "model.bin";
  std::string trace;
  bool quiet = false;
};

int run_train(const TrainArgs& a) {
  auto matrix = read_matrix_dir(a.matrix);
  auto result = factorize(matrix, a.cfg, [&](std::size_t epoch, double err) {
    if (!a.quiet) std::cerr << "epoch " << epoch << " rmse " << fixed(err, 6) << '\n';
  });
  ensure_parent(a.out);
  save_model(result.model, a.out);
  if (!a.trace.empty()) {
    auto f = open_out(a.trace);
    f << "epoch\trmse\n";
    for (std::size_t e = 0; e < result.rmse_per_epoch.size(); ++e) {
      f << e + 1 << '\t' << fixed(result.rmse_per_epoch[e], 10) << '\n';
    }
  }
  std::cout << "rmse\t" << fixed(result.rmse_per_epoch.back(), 6) << '\n';
  return 0;
}

int run_rmse(const std::string& model_path, const std::string& matrix_path) {
  auto model = load_model(model_path);
  auto matrix = read_matrix_dir(matrix_path);
  if (!(matrix.users() == model.users()) || !(matrix.topics() == model.topics())) {
    throw std::invalid_argument("matrix index maps differ from the model's");
  }
  std::cout << "rmse\t" << fixed(rmse(model, matrix), 6) << '\n';
  return 0;
}

// --- eval -----------------------------------------------------------------

struct HoldoutArgs {
  std::string matrix;
  double fraction = 0.05;
  std::uint64_t seed = 1;
  TrainConfig cfg;
  std::string thetas = "0,5,10,30,100";
  std::string out;
};

int run_eval_holdout(HoldoutArgs a) {
  auto matrix = read_matrix_dir(a.matrix);
  auto thetas = parse_thetas(a.thetas);
  a.cfg.seed = a.seed;
  auto holdout = split(matrix, a.fraction, a.seed);
  auto result = factorize(holdout.train, a.cfg);
  auto report = threshold_sweep(result.model, holdout, thetas);
  if (a.out.empty()) {
    write_threshold_report(std::cout, report, holdout.train.nnz(), holdout.test.size(), result.rmse_per_epoch.back());
  } else {
    auto f = open_out(a.out);
    write_threshold_report(f, report, holdout.train.nnz(), holdout.test.size(), result.rmse_per_epoch.back());
  }
  return 0;
}

int run_eval_spearman(const std::string& model_path, const std::string& judgements) {
  auto model = load_model(model_path);
  std::vector<double> cosines;
  std::vector<double> scores;
  for (const auto& j : read_judgements(judgements)) {
    cosines.push_back(cosine(model, j.topic_a, j.topic_b));
    scores.push_back(j.score);
  }
  std::cout << "pairs\t" << cosines.size() << "\nspearman_rho\t" << fixed(spearman(cosines, scores), 6) << '\n';
  return 0;
}

int run_eval_variance(const std::string& matrix_path, const std::string& thetas) {
  auto matrix = read_matrix_dir(matrix_path);
  std::cout << "theta\tmean_variance\n";
  for (auto theta : parse_thetas(thetas)) {
    std::cout << theta << '\t';
    try {
      std::cout << fixed(mean_variance(matrix, theta), 6) << '\n';
    } catch (const MetricError&) {
      std::cout << "NA\n";
    }
  }
  return 0;
}

// --- topics / user --------------------------------------------------------

int run_topics_near(const std::string& model_path, const std::string& topic, std::size_t n, const std::string& format) {
  auto model = load_model(model_path);
  auto neighbors = nearest_topics(model, topic, n);
  if (format == "tsv") {
    std::cout << "rank\ttopic\tcosine\n";
    for (std::size_t i = 0; i < neighbors.size(); ++i) {
      std::cout << i + 1 << '\t' << neighbors[i].topic << '\t' << fixed(neighbors[i].cosine, 6) << '\n';
    }
  } else {
    std::cout << "Topics closest to '" << topic << "'\n";
    for (std::size_t i = 0; i < neighbors.size(); ++i) {
      std::cout << std::setw(4) << i + 1 << "  " << std::left << std::setw(32) << neighbors[i].topic << std::right
                << fixed(neighbors[i].cosine) << '\n';
    }
  }
  return 0;
}

int run_topics_pairs(const std::string& model_path, const std::string& bands, std::size_t per_band,
                     std::uint64_t seed, const std::string& out) {
  auto model = load_model(model_path);
  auto parsed = parse_bands(bands);
  auto pairs = stratified_pair_sample(model, parsed, per_band, seed);
  std::ostringstream s;
  s << "band\ttopic_a\ttopic_b\tcosine\n";
  for (const auto& p : pairs) {
    s << parsed[p.band].low << ':' << parsed[p.band].high << '\t' << p.a << '\t' << p.b << '\t' << fixed(p.cosine, 6)
      << '\n';
  }
  if (out.empty()) {
    std::cout << s.str();
  } else {
    open_out(out) << s.str();
  }
  return 0;
}

int run_user_report(const std::string& model_path, const std::string& matrix_path, const std::string& user,
                    std::size_t n, const std::string& format) {
  auto model = load_model(model_path);
  auto matrix = read_matrix_dir(matrix_path);
  auto rep = user_report(model, matrix, user, n);
  if (format == "tsv") {
    std::cout << "kind\ttopic\tvalue\n";
    for (const auto& t : rep.declared_pro) std::cout << "declared_pro\t" << t << "\t\n";
    for (const auto& t : rep.declared_con) std::cout << "declared_con\t" << t << "\t\n";
    for (const auto& t : rep.predicted_pro) std::cout << "predicted_pro\t" << t.topic << '\t' << fixed(t.predicted) << '\n';
    for (const auto& t : rep.predicted_con) std::cout << "predicted_con\t" << t.topic << '\t' << fixed(t.predicted) << '\n';
    return 0;
  }
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : ", ") + x;
    return s.empty() ? std::string("-") : s;
  };
  auto join_scored = [](const std::vector<ScoredTopic>& v) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : ", ") + x.topic + " (" + fixed(x.predicted) + ")";
    return s.empty() ? std::string("-") : s;
  };
  std::cout << "User " << rep.user_id << '\n'
            << "  declared pro : " << join(rep.declared_pro) << '\n'
            << "  declared con : " << join(rep.declared_con) << '\n'
            << "  predicted pro: " << join_scored(rep.predicted_pro) << '\n'
            << "  predicted con: " << join_scored(rep.predicted_con) << '\n';
  return 0;
}

// --- pipeline -------------------------------------------------------------

struct PipelineArgs {
  std::string config;
  std::string corpus;
  std::string rules;
  std::string topics;
  std::string patterns;
  std::string stop_topics;
  std::string out = "out";
  std::size_t min_count = 5;
  std::size_t window = 3;
  std::size_t top_candidates = 200;
  bool keep_retweets = false;
  TrainConfig train;
  double fraction = 0.05;
  std::uint64_t split_seed = 1;
  std::string thetas = "0,5,10,30,100";
};

int run_pipeline_cmd(const PipelineArgs& a) {
  PipelineConfig cfg;
  cfg.corpus = a.corpus;
  if (!a.rules.empty()) cfg.rules = a.rules;
  if (!a.topics.empty()) cfg.topics = a.topics;
  cfg.patterns = a.patterns;
  if (!a.stop_topics.empty()) cfg.stop_topics = a.stop_topics;
  cfg.out_dir = a.out;
  cfg.drop_retweets = !a.keep_retweets;
  cfg.window = a.window;
  cfg.top_candidates = a.top_candidates;
  cfg.filter.min_occurrences = a.min_count;
  cfg.train = a.train;
  cfg.holdout_fraction = a.fraction;
  cfg.split_seed = a.split_seed;
  try {
    cfg.thetas = parse_thetas(a.thetas);
  } catch (const std::invalid_argument& e) {
    throw StageError("config", e.what());
  }
  auto summary = run_pipeline(cfg, &std::cerr);
  std::cout << "users\t" << summary.users << "\ntopics\t" << summary.topics << "\nnnz\t" << summary.nnz
            << "\nfinal_rmse\t" << fixed(summary.final_rmse, 6) << '\n';
  for (const auto& row : summary.report) {
    std::cout << "accuracy_theta_" << row.theta << '\t'
              << (row.model_accuracy ? fixed(*row.model_accuracy) : std::string("NA")) << '\n';
  }
  return 0;
}

// Fills options of `sub` that were not given on the command line from the
// flat config file. Keys are option long names without the leading dashes.
// Relative input paths are taken relative to the config file.
void apply_config(CLI::App* sub, const std::string& path) {
  static const std::set<std::string> kInputPaths = {"corpus", "rules", "topics", "patterns", "stop-topics"};
  const auto base = fs::path(path).parent_path();
  for (auto [key, value] : read_flat_config(path)) {
    if (kInputPaths.count(key) && !value.empty() && fs::path(value).is_relative()) value = (base / value).string();
    CLI::Option* opt = nullptr;
    try {
      opt = sub->get_option("--" + key);
    } catch (const CLI::OptionNotFound&) {
      throw StageError("config", path + ": unknown key '" + key + "'");
    }
    if (key == "config") throw StageError("config", path + ": 'config' cannot be set from a config file");
    if (opt->count() > 0) continue;
    if (opt->get_type_size() == 0) {
      // Flag: accept boolean spellings.
      if (value == "true" || value == "1" || value == "yes" || value == "on") {
        opt->add_result("true");
      } else if (value == "false" || value == "0" || value == "no" || value == "off") {
        continue;
      } else {
        throw StageError("config", path + ": key '" + key + "' expects a boolean");
      }
    } else {
      opt->add_result(value);
    }
    try {
      opt->run_callback();
    } catch (const CLI::ParseError& e) {
      throw StageError("config", path + ": key '" + key + "': " + e.what());
    }
  }
}

void add_train_options(CLI::App* sub, TrainConfig& cfg, bool with_seed) {
  sub->add_option("--k", cfg.k, "Latent dimension")->check(CLI::PositiveNumber);
  sub->add_option("--lp", cfg.lambda_p, "L2 coefficient for user vectors")->check(CLI::NonNegativeNumber);
  sub->add_option("--lq", cfg.lambda_q, "L2 coefficient for topic vectors")->check(CLI::NonNegativeNumber);
  sub->add_option("--lr", cfg.learning_rate, "SGD learning rate")->check(CLI::PositiveNumber);
  sub->add_option("--epochs", cfg.epochs, "Training epochs")->check(CLI::PositiveNumber);
  if (with_seed) sub->add_option("--seed", cfg.seed, "Random seed for initialization and visit order");
  sub->add_option("--workers", cfg.workers, "Training threads (1 = deterministic)")->check(CLI::PositiveNumber);
}

void fail_line(const std::string& stage, const std::string& message) {
  std::string flat = message;
  for (auto& c : flat) {
    if (c == '\n' || c == '\t') c = ' ';
  }
  std::cerr << "error\tstage=" << stage << "\t" << flat << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mine stance statements from a tweet corpus, factorize user-topic preferences, and evaluate them."};
  app.name("topicpref");
  app.option_defaults()->always_capture_default();
  app.require_subcommand(0, 1);

  // corpus
  auto* corpus = app.add_subcommand("corpus", "Inspect or generate tweet corpora");
  corpus->require_subcommand(1);
  CorpusStatsArgs stats_args;
  auto* corpus_stats = corpus->add_subcommand("stats", "Count tweets, users, and dropped records in a corpus file");
  corpus_stats->add_option("path", stats_args.path, "Corpus file")->required();
  corpus_stats->add_flag("--keep-retweets", stats_args.keep_retweets, "Keep records flagged as retweets");

  SynthArgs synth_args;
  auto* synth = corpus->add_subcommand("synth", "Generate a synthetic corpus with planted preferences");
  synth->add_option("--users", synth_args.spec.num_users, "Number of users")->check(CLI::PositiveNumber);
  synth->add_option("--topics", synth_args.spec.num_topics, "Number of topics")->check(CLI::PositiveNumber);
  synth->add_option("--rank", synth_args.spec.true_rank, "Planted latent rank")->check(CLI::PositiveNumber);
  synth->add_option("--density", synth_args.spec.density, "Probability that a user-topic cell is observed");
  synth->add_option("--noise", synth_args.spec.polarity_noise, "Probability of flipping each emitted stance");
  synth->add_option("--decay", synth_args.spec.factor_decay, "Per-dimension scale decay of planted factors");
  synth->add_option("--statements-min", synth_args.spec.statements_min, "Minimum statements per observed cell");
  synth->add_option("--statements-max", synth_args.spec.statements_max, "Maximum statements per observed cell");
  synth->add_option("--hashtag-rate", synth_args.spec.hashtag_rate, "Chance of a pro/con hashtag tweet per cell");
  synth->add_option("--retweet-rate", synth_args.spec.retweet_rate, "Chance of a retweet per statement");
  synth->add_option("--seed", synth_args.spec.seed, "Random seed");
  synth->add_option("--out", synth_args.out, "Output corpus file")->required();
  synth->add_option("--truth-out", synth_args.truth_out, "Ground truth output (user, topic, +1/-1)");
  synth->add_option("--patterns-out", synth_args.patterns_out, "Write the generator's templates as a curated file");
  synth->add_option("--rules-out", synth_args.rules_out, "Write matching hashtag rules");
  synth->add_option("--topics-out", synth_args.topics_out, "Write the topic list");

  // patterns
  auto* patterns = app.add_subcommand("patterns", "Harvest candidate stance patterns or check a curated file");
  patterns->require_subcommand(1);
  HarvestArgs harvest_args;
  auto* harvest = patterns->add_subcommand("harvest", "Rank candidate patterns from hashtag-declared authors");
  harvest->add_option("--corpus", harvest_args.corpus, "Corpus file")->required();
  harvest->add_option("--rules", harvest_args.rules, "Hashtag rule file (polarity<TAB>regex)")->required();
  harvest->add_option("--out", harvest_args.out, "Ranked candidate output file")->required();
  harvest->add_option("--topics-out", harvest_args.topics_out, "Write the discovered topic vocabulary");
  harvest->add_option("--top-n", harvest_args.top_n, "Number of candidates to export")->check(CLI::PositiveNumber);
  harvest->add_option("--window", harvest_args.window, "Tokens kept before the topic keyword");
  harvest->add_flag("--keep-retweets", harvest_args.keep_retweets, "Keep records flagged as retweets");
  std::string check_path;
  auto* load = patterns->add_subcommand("load", "Validate a curated pattern file");
  load->add_option("--check", check_path, "Curated pattern file")->required();

  // extract
  ExtractArgs extract_args;
  auto* extract = app.add_subcommand("extract", "Extract preference instances and build the user-topic matrix");
  extract->add_option("--corpus", extract_args.corpus, "Corpus file")->required();
  extract->add_option("--patterns", extract_args.patterns, "Curated pattern file")->required();
  extract->add_option("--topics", extract_args.topics, "Topic vocabulary, one per line")->required();
  extract->add_option("--min-count", extract_args.min_count, "Minimum instances per user and per topic");
  extract->add_option("--stop-topics", extract_args.stop_topics, "Topics to drop, one per line");
  extract->add_option("--out", extract_args.out, "Output directory")->required();
  extract->add_flag("--keep-retweets", extract_args.keep_retweets, "Keep records flagged as retweets");

  // train / rmse
  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "Factorize a matrix with SGD");
  train->add_option("--matrix", train_args.matrix, "Matrix directory")->required();
  add_train_options(train, train_args.cfg, true);
  train->add_option("--out", train_args.out, "Model output file");
  train->add_option("--trace", train_args.trace, "Per-epoch RMSE output (TSV)");
  train->add_flag("--quiet", train_args.quiet, "Do not log per-epoch RMSE");

  std::string rmse_model, rmse_matrix;
  auto* rmse_cmd = app.add_subcommand("rmse", "Reconstruction RMSE of a model over a matrix");
  rmse_cmd->add_option("--model", rmse_model, "Model file")->required();
  rmse_cmd->add_option("--matrix", rmse_matrix, "Matrix directory")->required();

  // eval
  auto* eval = app.add_subcommand("eval", "Evaluate predictions and topic similarity");
  eval->require_subcommand(1);
  HoldoutArgs holdout_args;
  auto* holdout = eval->add_subcommand("holdout", "Hold out cells, retrain, and sweep the user threshold");
  holdout->add_option("--matrix", holdout_args.matrix, "Matrix directory")->required();
  holdout->add_option("--fraction", holdout_args.fraction, "Fraction of known cells held out");
  holdout->add_option("--seed", holdout_args.seed, "Seed for the split and for training");
  add_train_options(holdout, holdout_args.cfg, false);
  holdout->add_option("--thetas", holdout_args.thetas, "Comma-separated user thresholds");
  holdout->add_option("--out", holdout_args.out, "Report file (default stdout)");

  std::string sp_model, sp_judgements;
  auto* sp = eval->add_subcommand("spearman", "Rank correlation of topic cosines with judgement scores");
  sp->add_option("--model", sp_model, "Model file")->required();
  sp->add_option("--judgements", sp_judgements, "topic_a<TAB>topic_b<TAB>score file")->required();

  std::string var_matrix, var_thetas = "0,5,10,30,100";
  auto* var = eval->add_subcommand("variance", "Mean per-user preference variance by threshold");
  var->add_option("--matrix", var_matrix, "Matrix directory")->required();
  var->add_option("--thetas", var_thetas, "Comma-separated user thresholds");

  // topics
  auto* topics = app.add_subcommand("topics", "Query the topic vector space");
  topics->require_subcommand(1);
  std::string near_model, near_topic, near_format = "table";
  std::size_t near_n = 10;
  auto* near = topics->add_subcommand("near", "Most similar topics by cosine");
  near->add_option("--model", near_model, "Model file")->required();
  near->add_option("--topic", near_topic, "Query topic")->required();
  near->add_option("-n", near_n, "Number of neighbors")->check(CLI::PositiveNumber);
  near->add_option("--format", near_format, "table or tsv")->check(CLI::IsMember({"table", "tsv"}));

  std::string pairs_model, pairs_bands = "-1:-0.6,-0.6:0.6,0.6:1", pairs_out;
  std::size_t pairs_per_band = 150;
  std::uint64_t pairs_seed = 1;
  auto* pairs = topics->add_subcommand("pairs", "Sample topic pairs stratified by cosine band");
  pairs->add_option("--model", pairs_model, "Model file")->required();
  pairs->add_option("--bands", pairs_bands, "Comma-separated low:high cosine bands");
  pairs->add_option("--per-band", pairs_per_band, "Pairs per band");
  pairs->add_option("--seed", pairs_seed, "Random seed");
  pairs->add_option("--out", pairs_out, "Output file (default stdout)");

  // user
  auto* user = app.add_subcommand("user", "Per-user queries");
  user->require_subcommand(1);
  std::string rep_model, rep_matrix, rep_user, rep_format = "table";
  std::size_t rep_n = 10;
  auto* report = user->add_subcommand("report", "Declared and predicted stances of one user");
  report->add_option("--model", rep_model, "Model file")->required();
  report->add_option("--matrix", rep_matrix, "Matrix directory")->required();
  report->add_option("--user", rep_user, "User id")->required();
  report->add_option("-n", rep_n, "Predicted topics per side")->check(CLI::PositiveNumber);
  report->add_option("--format", rep_format, "table or tsv")->check(CLI::IsMember({"table", "tsv"}));

  // pipeline
  PipelineArgs pipe_args;
  auto* pipe = app.add_subcommand("pipeline", "Run corpus -> patterns -> extract -> train -> eval end to end");
  pipe->add_option("--config", pipe_args.config, "Flat key = value config; flags override it");
  pipe->add_option("--corpus", pipe_args.corpus, "Corpus file");
  pipe->add_option("--rules", pipe_args.rules, "Hashtag rule file (builds the topic vocabulary)");
  pipe->add_option("--topics", pipe_args.topics, "Topic vocabulary file (overrides hashtag discovery)");
  pipe->add_option("--patterns", pipe_args.patterns, "Curated pattern file");
  pipe->add_option("--stop-topics", pipe_args.stop_topics, "Topics to drop, one per line");
  pipe->add_option("--out", pipe_args.out, "Output directory");
  pipe->add_option("--min-count", pipe_args.min_count, "Minimum instances per user and per topic");
  pipe->add_option("--window", pipe_args.window, "Tokens kept before the topic keyword when harvesting");
  pipe->add_option("--top-candidates", pipe_args.top_candidates, "Harvested candidates to export");
  pipe->add_flag("--keep-retweets", pipe_args.keep_retweets, "Keep records flagged as retweets");
  add_train_options(pipe, pipe_args.train, true);
  pipe->add_option("--fraction", pipe_args.fraction, "Holdout fraction for evaluation");
  pipe->add_option("--split-seed", pipe_args.split_seed, "Seed for the holdout split");
  pipe->add_option("--thetas", pipe_args.thetas, "Comma-separated user thresholds");

  if (argc <= 1) {
    std::cerr << app.help();
    return 2;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return 2;
  }

  std::string stage = app.get_subcommands().front()->get_name();
  try {
    if (corpus_stats->parsed()) return run_corpus_stats(stats_args);
    if (synth->parsed()) return run_corpus_synth(synth_args);
    if (harvest->parsed()) return run_patterns_harvest(harvest_args);
    if (load->parsed()) return run_patterns_load(check_path);
    if (extract->parsed()) return run_extract(extract_args);
    if (train->parsed()) return run_train(train_args);
    if (rmse_cmd->parsed()) return run_rmse(rmse_model, rmse_matrix);
    if (holdout->parsed()) return run_eval_holdout(holdout_args);
    if (sp->parsed()) return run_eval_spearman(sp_model, sp_judgements);
    if (var->parsed()) return run_eval_variance(var_matrix, var_thetas);
    if (near->parsed()) return run_topics_near(near_model, near_topic, near_n, near_format);
    if (pairs->parsed()) return run_topics_pairs(pairs_model, pairs_bands, pairs_per_band, pairs_seed, pairs_out);
    if (report->parsed()) return run_user_report(rep_model, rep_matrix, rep_user, rep_n, rep_format);
    if (pipe->parsed()) {
      if (!pipe_args.config.empty()) apply_config(pipe, pipe_args.config);
      return run_pipeline_cmd(pipe_args);
    }
  } catch (const StageError& e) {
    fail_line(e.stage(), e.what());
    return 1;
  } catch (const std::exception& e) {
    fail_line(stage, e.what());
    return 1;
  }
  std::cerr << app.help();
  return 2;
}
