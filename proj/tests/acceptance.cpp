// Acceptance checks AC1-AC10. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "topicpref/corpus.hpp"
#include "topicpref/errors.hpp"
#include "topicpref/evaluation.hpp"
#include "topicpref/extraction.hpp"
#include "topicpref/factorization.hpp"
#include "topicpref/patterns.hpp"
#include "topicpref/topic_space.hpp"

namespace fs = std::filesystem;
using namespace topicpref;

namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
};

fs::path g_work;

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Default synthetic corpus run through curated extraction.
SparseMatrix synthetic_matrix() {
  SyntheticSpec spec;
  auto syn = generate_synthetic(spec);
  CuratedPatterns cp;
  for (const auto& t : synthetic_pro_templates()) cp.pro.emplace_back(Polarity::kPro, t);
  for (const auto& t : synthetic_con_templates()) cp.con.emplace_back(Polarity::kCon, t);
  std::vector<Tweet> kept;
  for (auto& t : syn.tweets) {
    if (!t.is_retweet) kept.push_back(std::move(t));
  }
  auto instances = extract_instances(kept, cp, TopicVocabulary(syn.topics));
  return build_matrix(filter_instances(instances, FilterConfig{}));
}

Outcome ac1() {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<std::size_t> count(0, 60);
  InstanceCounts counts;
  for (std::size_t i = 0; i < 1000; ++i) {
    PairCounts c{count(rng), count(rng)};
    if (c.pro + c.con == 0) c.pro = 1;
    counts[{"u" + std::to_string(i / 40), "t" + std::to_string(i % 40)}] = c;
  }
  auto m = build_matrix(counts);
  std::size_t mismatches = 0, out_of_range = 0;
  for (const auto& [key, c] : counts) {
    auto row = *m.users().find(key.first);
    auto col = *m.topics().find(key.second);
    const double direct =
        (static_cast<double>(c.pro) - static_cast<double>(c.con)) / (static_cast<double>(c.pro) + static_cast<double>(c.con));
    auto v = m.at(row, col);
    if (!v || *v != direct) ++mismatches;
    if (v && (*v < -1.0 || *v > 1.0)) ++out_of_range;
  }
  const bool ok = m.nnz() == 1000 && mismatches == 0 && out_of_range == 0;
  return {ok, "1000 pairs, " + std::to_string(mismatches) + " mismatches, " + std::to_string(out_of_range) +
                  " out of [-1,1]"};
}

Outcome ac2() {
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> v(-1.0, 1.0);
  std::uniform_real_distribution<double> reg(0.0, 1.0);
  double worst = 0.0;
  for (int c = 0; c < 100; ++c) {
    const std::size_t k = 1 + static_cast<std::size_t>(rng() % 10);
    std::vector<double> p(k), q(k);
    for (auto& x : p) x = v(rng);
    for (auto& x : q) x = v(rng);
    const double r = v(rng), lp = reg(rng), lq = reg(rng), lr = 0.01;
    auto grad = oracles::numeric_gradient(p, q, r, lp, lq);
    auto p2 = p, q2 = q;
    sgd_step(p2, q2, r, lr, lp, lq);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < 2 * k; ++i) {
      const double step = i < k ? (p2[i] - p[i]) / lr : (q2[i - k] - q[i - k]) / lr;
      const double expect = -0.5 * grad[i];
      num = std::max(num, std::abs(step - expect));
      den = std::max(den, std::abs(expect));
    }
    worst = std::max(worst, num / std::max(den, 1e-12));
  }
  return {worst < 1e-4, "100 cases, worst relative error " + fmt("%.2e", worst) + " (limit 1e-4)"};
}

Outcome ac3() {
  const double a[3] = {0.9, -0.6, 0.8};
  const double b[3] = {1.0, 0.7, -0.5};
  std::vector<Cell> cells;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) cells.push_back({i, j, a[i] * b[j]});
  }
  SparseMatrix r(Index({"u0", "u1", "u2"}), Index({"t0", "t1", "t2"}), cells);
  TrainConfig cfg;
  cfg.k = 1;
  cfg.lambda_p = cfg.lambda_q = 0.0;
  cfg.epochs = 200;
  auto res = factorize(r, cfg);
  const double final_rmse = res.rmse_per_epoch.back();
  return {final_rmse < 1e-3, "rank-1 3x3, k=1, lambda=0, 200 epochs: RMSE " + fmt("%.3e", final_rmse) + " (limit 1e-3)"};
}

Outcome ac4() {
  auto m = synthetic_matrix();
  auto run = [&](std::size_t k) {
    TrainConfig cfg;
    cfg.k = k;
    return factorize(m, cfg).rmse_per_epoch;
  };
  auto mean = [](const std::vector<double>& v, std::size_t from, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = from; i < from + n; ++i) s += v[i];
    return s / static_cast<double>(n);
  };
  auto k1 = run(1);
  auto k50 = run(50);
  const std::size_t e = k50.size();
  const double first = mean(k50, 0, 5), last = mean(k50, e - 5, 5);
  const double first1 = mean(k1, 0, 5), last1 = mean(k1, e - 5, 5);
  const bool ok = last < first && last1 < first1 && k50.back() <= k1.back();
  return {ok, "nnz " + std::to_string(m.nnz()) + "; k=50 first5 " + fmt("%.4f", first) + " last5 " +
                  fmt("%.4f", last) + "; k=1 first5 " + fmt("%.4f", first1) + " last5 " + fmt("%.4f", last1) +
                  "; final k=50 " + fmt("%.4f", k50.back()) + " <= k=1 " + fmt("%.4f", k1.back())};
}

Outcome ac5() {
  auto m = synthetic_matrix();
  auto s = split(m, 0.05, 1);
  TrainConfig cfg;
  cfg.k = 10;
  auto res = factorize(s.train, cfg);
  auto report = threshold_sweep(res.model, s, {0, 5, 10});
  bool ok = report[0].model_accuracy && *report[0].model_accuracy >= 0.85;
  std::string detail = "test cells " + std::to_string(s.test.size());
  for (const auto& row : report) {
    detail += "; theta " + std::to_string(row.theta) + ": ";
    if (!row.model_accuracy) {
      detail += "empty";
      continue;
    }
    detail += "model " + fmt("%.4f", *row.model_accuracy) + " vs baseline " + fmt("%.4f", *row.baseline_accuracy) +
              " (" + std::to_string(row.cells_evaluated) + " cells)";
    if (!(*row.model_accuracy > *row.baseline_accuracy)) ok = false;
  }
  return {ok, detail + "; need theta 0 >= 0.85"};
}

Outcome ac6() {
  std::size_t fixtures_run = 0, disagreements = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t users = 10 + seed, topics = 8 + seed % 5, k = 1 + seed % 5;
    std::vector<std::string> u, t;
    for (std::size_t i = 0; i < users; ++i) u.push_back("u" + std::to_string(i));
    for (std::size_t i = 0; i < topics; ++i) t.push_back("t" + std::to_string(i));
    std::vector<Cell> cells;
    for (std::size_t i = 0; i < users; ++i) {
      for (std::size_t j = 0; j < topics; ++j) {
        // Values on a coarse grid so exact zeros show up.
        if (unit(rng) < 0.4) cells.push_back({i, j, std::round(4.0 * (2.0 * unit(rng) - 1.0)) / 4.0});
      }
    }
    SparseMatrix r{Index(u), Index(t), cells};
    auto s = split(r, 0.3, seed);
    std::vector<double> p(k * users), q(k * topics);
    for (auto& x : p) x = std::round(4.0 * (2.0 * unit(rng) - 1.0)) / 4.0;
    for (auto& x : q) x = std::round(4.0 * (2.0 * unit(rng) - 1.0)) / 4.0;
    FactorModel model(k, r.users(), r.topics(), p, q);
    for (std::size_t theta : {0, 1, 2, 4, 8}) {
      ++fixtures_run;
      auto oracle = oracles::brute_sign_accuracy(model, s.test, theta, s.train);
      if (oracle.kept == 0) {
        try {
          (void)sign_accuracy(model, s.test, theta, s.train);
          ++disagreements;
        } catch (const MetricError&) {
        }
        continue;
      }
      auto got = sign_accuracy(model, s.test, theta, s.train);
      const double ratio = static_cast<double>(oracle.correct) / static_cast<double>(oracle.kept);
      if (got.cells_evaluated != oracle.kept || got.users_evaluated != oracle.users || got.accuracy != ratio) {
        ++disagreements;
      }
    }
  }
  return {disagreements == 0,
          std::to_string(fixtures_run) + " fixtures, " + std::to_string(disagreements) + " disagreements"};
}

Outcome ac7() {
  auto tweets = fixtures::stance_tweets();
  auto patterns = fixtures::stance_patterns();
  auto got = extract_instances(tweets, patterns, TopicVocabulary(fixtures::stance_topics()));
  std::sort(got.begin(), got.end());
  auto oracle = fixtures::brute_force_instances(tweets, patterns, fixtures::stance_topics());
  const bool ok = tweets.size() == 20 && patterns.pro.size() == 2 && patterns.con.size() == 2 && got == oracle &&
                  got == fixtures::expected_instances();
  return {ok, std::to_string(tweets.size()) + " tweets, " + std::to_string(got.size()) + " instances extracted, " +
                  std::to_string(oracle.size()) + " from exhaustive matcher"};
}

Outcome ac8() {
  struct Case {
    std::vector<double> x, y;
    double rho;
  };
  const std::vector<Case> cases = {
      {{1, 2, 3, 4, 5}, {2, 1, 4, 3, 5}, 0.8},
      {{1, 2, 3, 4}, {10, 20, 30, 40}, 1.0},
      {{1, 2, 3, 4}, {4, 3, 2, 1}, -1.0},
      {{1, 2, 3}, {1, 3, 2}, 0.5},
      {{1, 2, 3, 4}, {4, 3, 1, 2}, -0.8},
      {{1, 2, 2, 3}, {1, 2, 3, 4}, std::sqrt(0.9)},
      {{1, 1, 2, 2}, {1, 2, 1, 2}, 0.0},
      {{3, 1, 2}, {30, 10, 20}, 1.0},
      {{1, 2, 3, 4, 5}, {5, 5, 1, 1, 3}, -2.0 / std::sqrt(10.0)},
      {{0.1, 0.4, 0.4, 0.4, 0.9, 1.0}, {2, 1, 3, 3, 5, 4}, 12.5 / std::sqrt(263.5)},
  };
  double worst = 0.0;
  for (const auto& c : cases) worst = std::max(worst, std::abs(spearman(c.x, c.y) - c.rho));

  std::mt19937_64 rng(808);
  std::uniform_int_distribution<int> d(-50, 50);
  double worst_invariance = 0.0;
  for (int c = 0; c < 100; ++c) {
    std::vector<double> x(4 + static_cast<std::size_t>(c % 30)), y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = d(rng);
      y[i] = d(rng);
    }
    x[0] = -51;
    y[0] = 51;
    std::vector<double> tx(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) tx[i] = std::exp(x[i] / 10.0) + 3.0 * x[i];
    worst_invariance = std::max(worst_invariance, std::abs(spearman(tx, y) - spearman(x, y)));
  }
  const bool ok = worst <= 1e-12 && worst_invariance <= 1e-12;
  return {ok, "10 hand fixtures, worst error " + fmt("%.1e", worst) + "; 100 monotone transforms, worst drift " +
                  fmt("%.1e", worst_invariance) + " (limit 1e-12)"};
}

Outcome ac9() {
  auto dir = g_work / "determinism";
  fs::create_directories(dir);
  std::vector<std::string> failed;

  SyntheticSpec spec;
  write_corpus(dir / "synth_a.tsv", generate_synthetic(spec).tweets);
  write_corpus(dir / "synth_b.tsv", generate_synthetic(spec).tweets);
  if (slurp(dir / "synth_a.tsv") != slurp(dir / "synth_b.tsv")) failed.push_back("synth");

  auto m = synthetic_matrix();
  auto s1 = split(m, 0.05, 7);
  auto s2 = split(m, 0.05, 7);
  if (!(s1.test == s2.test) || !(s1.train == s2.train)) failed.push_back("split");

  TrainConfig cfg;
  cfg.k = 10;
  cfg.epochs = 10;
  save_model(factorize(m, cfg).model, dir / "model_a.bin");
  save_model(factorize(m, cfg).model, dir / "model_b.bin");
  if (slurp(dir / "model_a.bin") != slurp(dir / "model_b.bin")) failed.push_back("train");

  auto model = load_model(dir / "model_a.bin");
  auto bands = parse_bands("-1:-0.6,-0.6:0.6,0.6:1");
  auto dump = [&](const std::vector<TopicPair>& pairs) {
    std::ostringstream o;
    for (const auto& p : pairs) o << p.band << '\t' << p.a << '\t' << p.b << '\t' << fmt("%.17g", p.cosine) << '\n';
    return o.str();
  };
  auto pa = dump(stratified_pair_sample(model, bands, 20, 3));
  auto pb = dump(stratified_pair_sample(model, bands, 20, 3));
  if (pa != pb) failed.push_back("pairs");

  std::string detail = "synth, split, train (workers=1), pair sampling";
  if (!failed.empty()) {
    detail += "; differing:";
    for (const auto& f : failed) detail += " " + f;
  }
  return {failed.empty(), detail};
}

Outcome ac10() {
  auto dir = g_work / "persistence";
  fs::create_directories(dir);
  auto m = synthetic_matrix();
  TrainConfig cfg;
  cfg.k = 8;
  cfg.epochs = 5;
  auto model = factorize(m, cfg).model;
  save_model(model, dir / "model.bin");
  auto back = load_model(dir / "model.bin");
  const bool exact = back.k() == model.k() && back.users() == model.users() && back.topics() == model.topics() &&
                     back.p().size() == model.p().size() && back.q().size() == model.q().size() &&
                     std::memcmp(back.p().data(), model.p().data(), model.p().size() * sizeof(double)) == 0 &&
                     std::memcmp(back.q().data(), model.q().data(), model.q().size() * sizeof(double)) == 0;

  const auto bytes = slurp(dir / "model.bin");
  std::size_t tried = 0, rejected = 0;
  auto probe = [&](const std::string& content) {
    {
      std::ofstream f(dir / "bad.bin", std::ios::binary);
      f << content;
    }
    ++tried;
    try {
      (void)load_model(dir / "bad.bin");
    } catch (const FormatError&) {
      ++rejected;
    }
  };
  std::mt19937_64 rng(1010);
  for (int i = 0; i < 200; ++i) probe(bytes.substr(0, rng() % bytes.size()));
  for (int i = 0; i < 200; ++i) {
    auto bad = bytes;
    bad[rng() % bad.size()] ^= static_cast<char>(1 + rng() % 255);
    probe(bad);
  }
  auto bad_k = bytes;
  bad_k[16] = static_cast<char>(bad_k[16] + 1);
  probe(bad_k);
  probe(bytes + "extra");
  const bool ok = exact && rejected == tried;
  return {ok, std::string(exact ? "round-trip bit-exact" : "round-trip differs") + "; " + std::to_string(rejected) +
                  "/" + std::to_string(tried) + " corrupted files rejected with format errors"};
}

}  // namespace

int main(int argc, char** argv) {
  g_work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "topicpref-acceptance";
  fs::remove_all(g_work);
  fs::create_directories(g_work);

  struct Criterion {
    const char* id;
    const char* name;
    double limit_seconds;  // 0 = no runtime limit
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"AC1", "preference value oracle", 1.0, ac1},
      {"AC2", "SGD update vs finite-difference gradient", 5.0, ac2},
      {"AC3", "exact recovery of a rank-1 matrix", 1.0, ac3},
      {"AC4", "training RMSE trend and capacity", 60.0, ac4},
      {"AC5", "holdout sign accuracy vs majority baseline", 60.0, ac5},
      {"AC6", "sign accuracy vs brute-force recount", 0.0, ac6},
      {"AC7", "pattern extraction vs exhaustive matcher", 1.0, ac7},
      {"AC8", "Spearman fixtures and monotone invariance", 0.0, ac8},
      {"AC9", "seeded stages are byte-reproducible", 0.0, ac9},
      {"AC10", "model persistence and corruption checks", 0.0, ac10},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    Outcome out;
    const auto start = std::chrono::steady_clock::now();
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string timing = fmt("%.3fs", secs);
    if (c.limit_seconds > 0.0) {
      timing += fmt(" (limit %.0fs)", c.limit_seconds);
      if (secs >= c.limit_seconds) {
        out.ok = false;
        out.detail += "; runtime limit exceeded";
      }
    }
    std::printf("%-4s %s  %s: %s [%s]\n", c.id, out.ok ? "PASS" : "FAIL", c.name, out.detail.c_str(), timing.c_str());
    if (!out.ok) ++failures;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
