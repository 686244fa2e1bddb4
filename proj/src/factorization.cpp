#include "topicpref/factorization.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>

#include "topicpref/errors.hpp"

namespace topicpref {

void TrainConfig::validate() const {
  if (k == 0) throw std::invalid_argument("k must be positive");
  if (!(lambda_p >= 0.0) || !std::isfinite(lambda_p)) throw std::invalid_argument("lambda_p must be non-negative");
  if (!(lambda_q >= 0.0) || !std::isfinite(lambda_q)) throw std::invalid_argument("lambda_q must be non-negative");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    throw std::invalid_argument("learning_rate must be positive");
  if (epochs == 0) throw std::invalid_argument("epochs must be positive");
  if (workers == 0) throw std::invalid_argument("workers must be positive");
}

FactorModel::FactorModel(std::size_t k, Index users, Index topics)
    : k_(k),
      users_(std::move(users)),
      topics_(std::move(topics)),
      p_(k_ * users_.size(), 0.0),
      q_(k_ * topics_.size(), 0.0) {}

FactorModel::FactorModel(std::size_t k, Index users, Index topics, std::vector<double> p, std::vector<double> q)
    : k_(k), users_(std::move(users)), topics_(std::move(topics)), p_(std::move(p)), q_(std::move(q)) {
  if (p_.size() != k_ * users_.size() || q_.size() != k_ * topics_.size()) {
    throw std::invalid_argument("factor sizes do not match k and the index maps");
  }
}

double FactorModel::predict(std::size_t row, std::size_t col) const {
  return dot(user_vector(row), topic_vector(col));
}

double FactorModel::predict(std::string_view user, std::string_view topic) const {
  auto row = users_.find(user);
  auto col = topics_.find(topic);
  if (!row && !col) throw LookupError("unknown user '" + std::string(user) + "' and topic '" + std::string(topic) + "'");
  if (!row) throw LookupError("unknown user '" + std::string(user) + "'");
  if (!col) throw LookupError("unknown topic '" + std::string(topic) + "'");
  return predict(*row, *col);
}

bool FactorModel::all_finite() const {
  auto finite = [](double x) { return std::isfinite(x); };
  return std::all_of(p_.begin(), p_.end(), finite) && std::all_of(q_.begin(), q_.end(), finite);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void sgd_step(std::span<double> p, std::span<double> q, double r, double learning_rate, double lambda_p,
              double lambda_q) {
  const double e = r - dot(p, q);
  for (std::size_t d = 0; d < p.size(); ++d) {
    const double pd = p[d];
    const double qd = q[d];
    p[d] = pd + learning_rate * (e * qd - lambda_p * pd);
    q[d] = qd + learning_rate * (e * pd - lambda_q * qd);
  }
}

namespace {

// Same update as sgd_step, through relaxed atomic accesses so concurrent
// workers may race on a shared vector without undefined behaviour.
void sgd_step_shared(double* p, double* q, std::size_t k, double r, double lr, double lp, double lq) {
  double e = r;
  for (std::size_t d = 0; d < k; ++d) {
    e -= std::atomic_ref<double>(p[d]).load(std::memory_order_relaxed) *
         std::atomic_ref<double>(q[d]).load(std::memory_order_relaxed);
  }
  for (std::size_t d = 0; d < k; ++d) {
    std::atomic_ref<double> pa(p[d]);
    std::atomic_ref<double> qa(q[d]);
    const double pd = pa.load(std::memory_order_relaxed);
    const double qd = qa.load(std::memory_order_relaxed);
    pa.store(pd + lr * (e * qd - lp * pd), std::memory_order_relaxed);
    qa.store(qd + lr * (e * pd - lq * qd), std::memory_order_relaxed);
  }
}

}  // namespace

TrainResult factorize(const SparseMatrix& r, const TrainConfig& cfg, const EpochCallback& on_epoch) {
  cfg.validate();
  if (r.nnz() == 0) throw std::invalid_argument("cannot factorize a matrix with no known cells");

  TrainResult result{FactorModel(cfg.k, r.users(), r.topics()), {}};
  auto& model = result.model;
  std::mt19937_64 rng(cfg.seed);
  const double scale = 0.1 / std::sqrt(static_cast<double>(cfg.k));
  std::uniform_real_distribution<double> init(-scale, scale);
  for (auto& x : model.p()) x = init(rng);
  for (auto& x : model.q()) x = init(rng);

  const auto& cells = r.cells();
  std::vector<std::size_t> order(cells.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t k = cfg.k;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    if (cfg.workers == 1) {
      for (auto idx : order) {
        const auto& c = cells[idx];
        sgd_step(model.user_vector(c.row), model.topic_vector(c.col), c.value, cfg.learning_rate, cfg.lambda_p,
                 cfg.lambda_q);
      }
    } else {
      const std::size_t n_workers = std::min(cfg.workers, order.size());
      const std::size_t chunk = (order.size() + n_workers - 1) / n_workers;
      double* p = model.p().data();
      double* q = model.q().data();
      std::vector<std::jthread> pool;
      pool.reserve(n_workers);
      for (std::size_t w = 0; w < n_workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(order.size(), lo + chunk);
        pool.emplace_back([&, lo, hi] {
          for (std::size_t i = lo; i < hi; ++i) {
            const auto& c = cells[order[i]];
            sgd_step_shared(p + c.row * k, q + c.col * k, k, c.value, cfg.learning_rate, cfg.lambda_p, cfg.lambda_q);
          }
        });
      }
    }
    const double err = rmse(model, r);
    if (!std::isfinite(err)) {
      throw DivergenceError("training diverged at epoch " + std::to_string(epoch) + " (RMSE is " +
                                (std::isnan(err) ? std::string("NaN") : std::string("Inf")) +
                                "); lower the learning rate",
                            epoch);
    }
    result.rmse_per_epoch.push_back(err);
    if (on_epoch) on_epoch(epoch, err);
  }
  return result;
}

double rmse(const FactorModel& model, const SparseMatrix& r) {
  if (r.nnz() == 0) throw MetricError("RMSE is undefined for a matrix with no known cells");
  if (r.rows() != model.users().size() || r.cols() != model.topics().size()) {
    throw std::invalid_argument("matrix shape " + std::to_string(r.rows()) + "x" + std::to_string(r.cols()) +
                                " does not match model shape " + std::to_string(model.users().size()) + "x" +
                                std::to_string(model.topics().size()));
  }
  double sum = 0.0;
  for (const auto& c : r.cells()) {
    const double d = model.predict(c.row, c.col) - c.value;
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(r.nnz()));
}

}  // namespace topicpref
