#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "topicpref/sparse_matrix.hpp"

namespace topicpref {

struct TrainConfig {
  std::size_t k = 100;
  double lambda_p = 0.1;
  double lambda_q = 0.1;
  double learning_rate = 0.05;
  std::size_t epochs = 50;
  std::uint64_t seed = 1;
  std::size_t workers = 1;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

// Latent user vectors P (k x |U|) and topic vectors Q (k x |T|), both stored
// column-major so that p_u and q_t are contiguous runs of k doubles.
class FactorModel {
 public:
  FactorModel() = default;
  FactorModel(std::size_t k, Index users, Index topics);
  FactorModel(std::size_t k, Index users, Index topics, std::vector<double> p, std::vector<double> q);

  std::size_t k() const noexcept { return k_; }
  const Index& users() const noexcept { return users_; }
  const Index& topics() const noexcept { return topics_; }

  std::span<double> user_vector(std::size_t row) { return {p_.data() + row * k_, k_}; }
  std::span<const double> user_vector(std::size_t row) const { return {p_.data() + row * k_, k_}; }
  std::span<double> topic_vector(std::size_t col) { return {q_.data() + col * k_, k_}; }
  std::span<const double> topic_vector(std::size_t col) const { return {q_.data() + col * k_, k_}; }

  const std::vector<double>& p() const noexcept { return p_; }
  const std::vector<double>& q() const noexcept { return q_; }
  std::vector<double>& p() noexcept { return p_; }
  std::vector<double>& q() noexcept { return q_; }

  // p_u . q_t by ordinal.
  double predict(std::size_t row, std::size_t col) const;
  // By id; throws LookupError saying whether the user or the topic is unknown.
  double predict(std::string_view user, std::string_view topic) const;

  bool all_finite() const;

  bool operator==(const FactorModel&) const = default;

 private:
  std::size_t k_ = 0;
  Index users_;
  Index topics_;
  std::vector<double> p_;
  std::vector<double> q_;
};

double dot(std::span<const double> a, std::span<const double> b);

// One SGD step on a single known cell:
//   e = r - p.q;  p += lr (e q - lambda_p p);  q += lr (e p - lambda_q q)
// with both right-hand sides evaluated at the pre-step values.
void sgd_step(std::span<double> p, std::span<double> q, double r, double learning_rate, double lambda_p,
              double lambda_q);

struct TrainResult {
  FactorModel model;
  std::vector<double> rmse_per_epoch;
};

// Called after every epoch with (1-based epoch, training RMSE).
using EpochCallback = std::function<void(std::size_t, double)>;

// Minimizes the regularized squared error over the known cells of `r` with
// constant-rate SGD. Factors start uniform on +-0.1/sqrt(k); every epoch visits
// the known cells in a freshly shuffled order. workers > 1 shards each epoch
// across threads that update shared factors without locking, so only
// workers == 1 is bit-reproducible. Throws DivergenceError if the RMSE turns
// non-finite.
TrainResult factorize(const SparseMatrix& r, const TrainConfig& cfg, const EpochCallback& on_epoch = {});

// sqrt(sum over known cells of (p_u.q_t - r_ut)^2 / nnz). Throws MetricError on
// an empty matrix and std::invalid_argument if the shapes disagree.
double rmse(const FactorModel& model, const SparseMatrix& r);

// Binary model container; see docs/model_format.md.
void save_model(const FactorModel& model, const std::filesystem::path& path);
FactorModel load_model(const std::filesystem::path& path);

}  // namespace topicpref
