#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "topicpref/factorization.hpp"
#include "topicpref/sparse_matrix.hpp"

namespace topicpref {

// Decision rule used by every sign comparison: sign(0) = +1.
inline int sign_of(double x) { return x >= 0.0 ? 1 : -1; }

struct HeldOutCell {
  std::size_t row = 0;
  std::size_t col = 0;
  double value = 0.0;

  bool operator==(const HeldOutCell&) const = default;
};

struct HoldoutSplit {
  SparseMatrix train;  // keeps the full index maps of the source matrix
  std::vector<HeldOutCell> test;  // sorted by (row, col)
  double fraction = 0.0;
  std::uint64_t seed = 0;
};

// Holds out round(fraction * nnz) cells chosen uniformly without replacement.
// Throws std::invalid_argument if fraction is outside (0, 1) or either side
// would be empty.
HoldoutSplit split(const SparseMatrix& r, double fraction, std::uint64_t seed);

struct AccuracyResult {
  double accuracy = 0.0;
  std::size_t cells_evaluated = 0;
  std::size_t users_evaluated = 0;
};

// Keeps test cells whose user has more than `theta` known cells in `train`,
// then scores sign(prediction) == sign(reference). Throws MetricError (with
// theta in the message) when nothing is kept.
AccuracyResult sign_accuracy(const FactorModel& model, std::span<const HeldOutCell> test, std::size_t theta,
                             const SparseMatrix& train);

// Per-topic majority sign of the training cells (zero counts as positive,
// unseen topics predict +1), scored under the same user filter.
AccuracyResult majority_baseline(const SparseMatrix& train, std::span<const HeldOutCell> test, std::size_t theta);

struct ThresholdRow {
  std::size_t theta = 0;
  // Empty when no test cell survives the filter.
  std::optional<double> model_accuracy;
  std::optional<double> baseline_accuracy;
  std::size_t users_evaluated = 0;
  std::size_t cells_evaluated = 0;
};

using ThresholdReport = std::vector<ThresholdRow>;

// Requires ascending thetas (std::invalid_argument otherwise).
ThresholdReport threshold_sweep(const FactorModel& model, const HoldoutSplit& split,
                                const std::vector<std::size_t>& thetas);

// Mean over users with more than `theta` known cells of the population
// variance of their cell values. Throws MetricError if no user qualifies.
double mean_variance(const SparseMatrix& r, std::size_t theta);

// Average ranks (1-based) with ties sharing the mean of their positions.
std::vector<double> average_ranks(std::span<const double> xs);

// Spearman's rho as the Pearson correlation of average ranks. Throws
// std::invalid_argument on length mismatch, fewer than two points, or a
// constant input.
double spearman(std::span<const double> xs, std::span<const double> ys);

struct Judgement {
  std::string topic_a;
  std::string topic_b;
  double score = 0.0;
};

// `topic_a<TAB>topic_b<TAB>mean_score`, scores in [-1, 1].
std::vector<Judgement> read_judgements(const std::filesystem::path& path);

}  // namespace topicpref
