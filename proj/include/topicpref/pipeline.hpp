#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "topicpref/errors.hpp"
#include "topicpref/evaluation.hpp"
#include "topicpref/extraction.hpp"
#include "topicpref/factorization.hpp"

namespace topicpref {

// Failure inside a named pipeline stage.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& message) : Error(message), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

// Flat `key = value` file. '#' or ';' start a comment line; keys are
// normalized to lower case with '_' mapped to '-'. Throws ConfigError naming
// the line on anything else.
std::map<std::string, std::string> read_flat_config(const std::filesystem::path& path);

struct PipelineConfig {
  std::filesystem::path corpus;
  // Hashtag rules; used to build the topic vocabulary (and harvest candidates)
  // when no explicit topic list is given.
  std::optional<std::filesystem::path> rules;
  std::optional<std::filesystem::path> topics;
  std::filesystem::path patterns;
  std::optional<std::filesystem::path> stop_topics;
  std::filesystem::path out_dir = "out";

  bool drop_retweets = true;
  std::size_t window = 3;
  std::size_t top_candidates = 200;
  FilterConfig filter;
  TrainConfig train;
  double holdout_fraction = 0.05;
  std::uint64_t split_seed = 1;
  std::vector<std::size_t> thetas{0, 5, 10, 30, 100};

  // Checks every referenced input path up front; throws StageError("config").
  void validate() const;
};

struct PipelineSummary {
  CorpusStats corpus;
  std::size_t hashtag_occurrences = 0;
  std::size_t vocabulary = 0;
  std::size_t candidates = 0;
  std::size_t raw_instances = 0;
  std::size_t users = 0;
  std::size_t topics = 0;
  std::size_t nnz = 0;
  double final_rmse = 0.0;
  ThresholdReport report;
};

// corpus -> topic vocabulary (+ harvested candidates) -> curated patterns ->
// instances -> filter -> matrix -> train -> holdout evaluation. Every stage
// writes its artifact under cfg.out_dir. Failures surface as StageError.
PipelineSummary run_pipeline(const PipelineConfig& cfg, std::ostream* log = nullptr);

// Tab-separated report rows (`NA` for empty rows) followed by one
// `# summary {json}` line.
void write_threshold_report(std::ostream& out, const ThresholdReport& report, std::size_t train_nnz,
                            std::size_t test_cells, double train_rmse);

// Comma-separated non-negative integers, e.g. "0,5,10".
std::vector<std::size_t> parse_thetas(const std::string& s);

}  // namespace topicpref
