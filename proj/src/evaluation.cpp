#include "topicpref/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

#include "topicpref/errors.hpp"
#include "topicpref/text.hpp"

namespace topicpref {

HoldoutSplit split(const SparseMatrix& r, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw std::invalid_argument("holdout fraction must lie in (0, 1)");
  const auto nnz = r.nnz();
  const auto n_test = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(nnz)));
  if (n_test == 0) throw std::invalid_argument("holdout fraction leaves the test set empty");
  if (n_test >= nnz) throw std::invalid_argument("holdout fraction leaves the training set empty");

  std::vector<std::size_t> idx(nnz);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates: the first n_test slots end up a uniform sample.
  for (std::size_t i = 0; i < n_test; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, nnz - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  std::vector<bool> held(nnz, false);
  for (std::size_t i = 0; i < n_test; ++i) held[idx[i]] = true;

  HoldoutSplit out;
  out.fraction = fraction;
  out.seed = seed;
  std::vector<Cell> train;
  train.reserve(nnz - n_test);
  const auto& cells = r.cells();
  for (std::size_t i = 0; i < nnz; ++i) {
    if (held[i]) {
      out.test.push_back({cells[i].row, cells[i].col, cells[i].value});
    } else {
      train.push_back(cells[i]);
    }
  }
  out.train = SparseMatrix(r.users(), r.topics(), std::move(train));
  return out;
}

namespace {

template <typename Predict>
std::optional<AccuracyResult> score(std::span<const HeldOutCell> test, std::size_t theta, const SparseMatrix& train,
                                    Predict predict) {
  const auto counts = train.row_counts();
  std::size_t kept = 0;
  std::size_t correct = 0;
  std::set<std::size_t> users;
  for (const auto& c : test) {
    if (c.row >= counts.size() || counts[c.row] <= theta) continue;
    ++kept;
    users.insert(c.row);
    if (sign_of(predict(c)) == sign_of(c.value)) ++correct;
  }
  if (kept == 0) return std::nullopt;
  return AccuracyResult{static_cast<double>(correct) / static_cast<double>(kept), kept, users.size()};
}

std::vector<int> topic_majorities(const SparseMatrix& train) {
  std::vector<long> balance(train.cols(), 0);
  for (const auto& c : train.cells()) balance[c.col] += sign_of(c.value);
  std::vector<int> out(train.cols());
  for (std::size_t t = 0; t < out.size(); ++t) out[t] = balance[t] >= 0 ? 1 : -1;
  return out;
}

}  // namespace

AccuracyResult sign_accuracy(const FactorModel& model, std::span<const HeldOutCell> test, std::size_t theta,
                             const SparseMatrix& train) {
  auto r = score(test, theta, train, [&](const HeldOutCell& c) { return model.predict(c.row, c.col); });
  if (!r) throw MetricError("sign accuracy undefined: no test cells from users with more than theta=" +
                            std::to_string(theta) + " training cells");
  return *r;
}

AccuracyResult majority_baseline(const SparseMatrix& train, std::span<const HeldOutCell> test, std::size_t theta) {
  const auto majority = topic_majorities(train);
  auto r = score(test, theta, train, [&](const HeldOutCell& c) { return static_cast<double>(majority[c.col]); });
  if (!r) throw MetricError("baseline accuracy undefined: no test cells from users with more than theta=" +
                            std::to_string(theta) + " training cells");
  return *r;
}

ThresholdReport threshold_sweep(const FactorModel& model, const HoldoutSplit& split,
                                const std::vector<std::size_t>& thetas) {
  if (!std::is_sorted(thetas.begin(), thetas.end())) throw std::invalid_argument("theta values must be ascending");
  const auto majority = topic_majorities(split.train);
  ThresholdReport report;
  for (auto theta : thetas) {
    ThresholdRow row;
    row.theta = theta;
    auto m = score(split.test, theta, split.train, [&](const HeldOutCell& c) { return model.predict(c.row, c.col); });
    auto b = score(split.test, theta, split.train,
                   [&](const HeldOutCell& c) { return static_cast<double>(majority[c.col]); });
    if (m && b) {
      row.model_accuracy = m->accuracy;
      row.baseline_accuracy = b->accuracy;
      row.users_evaluated = m->users_evaluated;
      row.cells_evaluated = m->cells_evaluated;
    }
    report.push_back(row);
  }
  return report;
}

double mean_variance(const SparseMatrix& r, std::size_t theta) {
  double total = 0.0;
  std::size_t users = 0;
  for (std::size_t row = 0; row < r.rows(); ++row) {
    auto cells = r.row_cells(row);
    if (cells.size() <= theta) continue;
    const double n = static_cast<double>(cells.size());
    double mean = 0.0;
    for (const auto& c : cells) mean += c.value;
    mean /= n;
    double var = 0.0;
    for (const auto& c : cells) var += (c.value - mean) * (c.value - mean);
    total += var / n;
    ++users;
  }
  if (users == 0) {
    throw MetricError("mean variance undefined: no user has more than theta=" + std::to_string(theta) +
                      " known cells");
  }
  return total / static_cast<double>(users);
}

std::vector<double> average_ranks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t m = i; m <= j; ++m) ranks[order[m]] = rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw std::invalid_argument("spearman: length mismatch (" + std::to_string(xs.size()) + " vs " +
                                std::to_string(ys.size()) + ")");
  }
  if (xs.size() < 2) throw std::invalid_argument("spearman: need at least two points");
  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);
  const double n = static_cast<double>(rx.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw std::invalid_argument("spearman: constant input has no rank correlation");
  return sxy / std::sqrt(sxx * syy);
}

std::vector<Judgement> read_judgements(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open judgement file: " + path.string());
  std::vector<Judgement> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    auto a = line.find('\t');
    auto b = a == std::string::npos ? a : line.find('\t', a + 1);
    if (b == std::string::npos) throw FormatError("judgement line " + std::to_string(lineno) + " is malformed");
    Judgement j{line.substr(0, a), line.substr(a + 1, b - a - 1), 0.0};
    auto score = line.substr(b + 1);
    char* end = nullptr;
    j.score = std::strtod(score.c_str(), &end);
    if (end == score.c_str() || !(j.score >= -1.0 && j.score <= 1.0)) {
      throw FormatError("judgement line " + std::to_string(lineno) + ": score must be a number in [-1, 1]");
    }
    out.push_back(std::move(j));
  }
  return out;
}

}  // namespace topicpref
