#include "topicpref/topic_space.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "topicpref/errors.hpp"
#include "topicpref/text.hpp"

namespace topicpref {

namespace {

std::size_t topic_ordinal(const FactorModel& model, std::string_view topic) {
  auto col = model.topics().find(topic);
  if (!col) throw LookupError("unknown topic '" + std::string(topic) + "'");
  return *col;
}

double norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

}  // namespace

double cosine(std::span<const double> a, std::span<const double> b) {
  const double na = norm(a);
  const double nb = norm(b);
  if (na == 0.0 || nb == 0.0) throw DegenerateVectorError("cosine undefined for an all-zero vector");
  // na * nb is commutative, so cosine(a, b) == cosine(b, a) bit for bit.
  return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

double cosine(const FactorModel& model, std::string_view a, std::string_view b) {
  const auto ca = topic_ordinal(model, a);
  const auto cb = topic_ordinal(model, b);
  try {
    return cosine(model.topic_vector(ca), model.topic_vector(cb));
  } catch (const DegenerateVectorError&) {
    throw DegenerateVectorError("cosine undefined: topic '" +
                                std::string(norm(model.topic_vector(ca)) == 0.0 ? a : b) + "' has an all-zero vector");
  }
}

std::vector<TopicNeighbor> nearest_topics(const FactorModel& model, std::string_view topic, std::size_t n) {
  const auto col = topic_ordinal(model, topic);
  const auto query = model.topic_vector(col);
  if (norm(query) == 0.0) throw DegenerateVectorError("topic '" + std::string(topic) + "' has an all-zero vector");
  std::vector<TopicNeighbor> all;
  all.reserve(model.topics().size());
  for (std::size_t t = 0; t < model.topics().size(); ++t) {
    if (t == col) continue;
    auto v = model.topic_vector(t);
    if (norm(v) == 0.0) continue;
    all.push_back({model.topics().id(t), cosine(query, v)});
  }
  std::sort(all.begin(), all.end(), [](const TopicNeighbor& x, const TopicNeighbor& y) {
    return x.cosine != y.cosine ? x.cosine > y.cosine : x.topic < y.topic;
  });
  if (all.size() > n) all.resize(n);
  return all;
}

UserReport user_report(const FactorModel& model, const SparseMatrix& r, std::string_view user, std::size_t top_n) {
  auto row = model.users().find(user);
  if (!row) throw LookupError("unknown user '" + std::string(user) + "'");
  auto r_row = r.users().find(user);

  UserReport report;
  report.user_id = std::string(user);
  std::vector<bool> declared(model.topics().size(), false);
  if (r_row) {
    for (const auto& c : r.row_cells(*r_row)) {
      const auto& name = r.topics().id(c.col);
      if (auto mc = model.topics().find(name)) declared[*mc] = true;
      (c.value >= 0.0 ? report.declared_pro : report.declared_con).push_back(name);
    }
  }
  for (std::size_t t = 0; t < model.topics().size(); ++t) {
    if (declared[t]) continue;
    const double p = model.predict(*row, t);
    (p >= 0.0 ? report.predicted_pro : report.predicted_con).push_back({model.topics().id(t), p});
  }
  auto rank = [&](std::vector<ScoredTopic>& v) {
    std::sort(v.begin(), v.end(), [](const ScoredTopic& a, const ScoredTopic& b) {
      const double ma = std::abs(a.predicted);
      const double mb = std::abs(b.predicted);
      return ma != mb ? ma > mb : a.topic < b.topic;
    });
    if (v.size() > top_n) v.resize(top_n);
  };
  rank(report.predicted_pro);
  rank(report.predicted_con);
  return report;
}

std::vector<CosineBand> parse_bands(std::string_view spec) {
  std::vector<CosineBand> bands;
  std::string item;
  std::istringstream in{std::string(spec)};
  while (std::getline(in, item, ',')) {
    auto t = text::trim(item);
    if (t.empty()) continue;
    auto colon = t.find(':', 1);  // skip a leading minus sign
    if (colon == std::string_view::npos) throw std::invalid_argument("band '" + std::string(t) + "' is not low:high");
    CosineBand b;
    std::string lo(t.substr(0, colon));
    std::string hi(t.substr(colon + 1));
    char* end = nullptr;
    b.low = std::strtod(lo.c_str(), &end);
    if (end == lo.c_str() || *end != '\0') throw std::invalid_argument("band '" + std::string(t) + "': bad low bound");
    b.high = std::strtod(hi.c_str(), &end);
    if (end == hi.c_str() || *end != '\0') throw std::invalid_argument("band '" + std::string(t) + "': bad high bound");
    if (!(b.low < b.high)) throw std::invalid_argument("band '" + std::string(t) + "': low must be below high");
    bands.push_back(b);
  }
  return bands;
}

std::vector<TopicPair> stratified_pair_sample(const FactorModel& model, const std::vector<CosineBand>& bands,
                                              std::size_t per_band, std::uint64_t seed) {
  auto sorted = bands;
  std::sort(sorted.begin(), sorted.end(), [](const CosineBand& a, const CosineBand& b) { return a.low < b.low; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].low < sorted[i - 1].high) throw std::invalid_argument("cosine bands overlap");
  }
  if (per_band == 0) return {};

  const auto n = model.topics().size();
  std::vector<double> norms(n);
  for (std::size_t t = 0; t < n; ++t) norms[t] = norm(model.topic_vector(t));

  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> members(bands.size());
  for (std::size_t a = 0; a < n; ++a) {
    if (norms[a] == 0.0) continue;
    for (std::size_t b = a + 1; b < n; ++b) {
      if (norms[b] == 0.0) continue;
      const double c = cosine(model.topic_vector(a), model.topic_vector(b));
      for (std::size_t i = 0; i < bands.size(); ++i) {
        if (bands[i].contains(c)) {
          members[i].emplace_back(a, b);
          break;
        }
      }
    }
  }

  std::mt19937_64 rng(seed);
  std::vector<TopicPair> out;
  for (std::size_t i = 0; i < bands.size(); ++i) {
    auto& pool = members[i];
    if (pool.size() < per_band) {
      std::ostringstream msg;
      msg << "band [" << bands[i].low << ", " << bands[i].high << ") has only " << pool.size()
          << " topic pairs, " << per_band << " requested";
      throw std::invalid_argument(msg.str());
    }
    for (std::size_t j = 0; j < per_band; ++j) {
      std::uniform_int_distribution<std::size_t> pick(j, pool.size() - 1);
      std::swap(pool[j], pool[pick(rng)]);
      const auto [a, b] = pool[j];
      out.push_back({model.topics().id(a), model.topics().id(b),
                     cosine(model.topic_vector(a), model.topic_vector(b)), i});
    }
  }
  return out;
}

}  // namespace topicpref
