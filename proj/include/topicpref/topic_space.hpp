#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "topicpref/factorization.hpp"
#include "topicpref/sparse_matrix.hpp"

namespace topicpref {

struct TopicNeighbor {
  std::string topic;
  double cosine = 0.0;
};

// Cosine of two topic vectors. LookupError for unknown topics,
// DegenerateVectorError if either vector is all zeros.
double cosine(const FactorModel& model, std::string_view a, std::string_view b);
double cosine(std::span<const double> a, std::span<const double> b);

// Exact scan over all topic columns; best first, ties by topic name. Topics
// with a zero vector are skipped.
std::vector<TopicNeighbor> nearest_topics(const FactorModel& model, std::string_view topic, std::size_t n);

struct ScoredTopic {
  std::string topic;
  double predicted = 0.0;
};

struct UserReport {
  std::string user_id;
  std::vector<std::string> declared_pro;
  std::vector<std::string> declared_con;
  std::vector<ScoredTopic> predicted_pro;
  std::vector<ScoredTopic> predicted_con;
};

// Declared lists come from the user's known cells (value >= 0 is pro);
// predicted lists cover the user's missing cells, split by sign of the
// prediction and ranked by |prediction| (ties by topic name), top_n per side.
UserReport user_report(const FactorModel& model, const SparseMatrix& r, std::string_view user, std::size_t top_n);

struct CosineBand {
  double low = 0.0;
  double high = 0.0;
  // Half-open [low, high); a band reaching 1.0 also takes cosine == high.
  bool contains(double c) const { return c >= low && (c < high || (high >= 1.0 && c <= high)); }
};

// Parses "-1:-0.6,-0.6:0.6,0.6:1".
std::vector<CosineBand> parse_bands(std::string_view spec);

struct TopicPair {
  std::string a;
  std::string b;
  double cosine = 0.0;
  std::size_t band = 0;
};

// Uniform sample of per_band distinct unordered topic pairs from each band,
// grouped by band. Bands must be disjoint. Throws std::invalid_argument naming
// the band and its available count when a band is too small.
std::vector<TopicPair> stratified_pair_sample(const FactorModel& model, const std::vector<CosineBand>& bands,
                                              std::size_t per_band, std::uint64_t seed);

}  // namespace topicpref
