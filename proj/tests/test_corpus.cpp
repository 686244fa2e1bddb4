#include "doctest.h"
#include "support.hpp"
#include "topicpref/corpus.hpp"
#include "topicpref/errors.hpp"

#include <cmath>
#include <set>

using namespace topicpref;
using testsupport::scratch;
using testsupport::write_file;

TEST_CASE("parse_tweet_line") {
  auto t = parse_tweet_line("t1\tu1\t100\t0\tI support TPP.");
  REQUIRE(t);
  CHECK(t->tweet_id == "t1");
  CHECK(t->user_id == "u1");
  CHECK(t->timestamp == 100);
  CHECK_FALSE(t->is_retweet);
  CHECK(t->text == "I support TPP.");

  CHECK(parse_tweet_line("t1\tu1\t100\t1\tRT text\r")->is_retweet);
  CHECK_FALSE(parse_tweet_line("t1\tu1\t100\t0"));
  CHECK_FALSE(parse_tweet_line("t1\tu1\tnoon\t0\ttext"));
  CHECK_FALSE(parse_tweet_line("t1\tu1\t100\t2\ttext"));
  CHECK_FALSE(parse_tweet_line("t1\tu1\t100\t0\t   "));
  CHECK_FALSE(parse_tweet_line("\tu1\t100\t0\ttext"));
  CHECK_FALSE(parse_tweet_line("t1\tu1\t100\t0\ta\tb"));
}

TEST_CASE("format_tweet_line round-trips and sanitizes") {
  Tweet t{"t9", "u2", -5, "a\tb\nc", true};
  auto line = format_tweet_line(t);
  CHECK(line == "t9\tu2\t-5\t1\ta b c");
  auto back = parse_tweet_line(line);
  REQUIRE(back);
  CHECK(back->text == "a b c");
}

TEST_CASE("ingest drops retweets") {
  auto dir = scratch("corpus");
  write_file(dir / "c.tsv", "t1\tu1\t1\t0\tone\nt2\tu2\t2\t1\tRT one\nt3\tu1\t3\t0\tthree\n");
  auto c = ingest(dir / "c.tsv", true);
  CHECK(c.tweets.size() == 2);
  CHECK(c.stats == CorpusStats{2, 1, 1, 0});
  auto kept = ingest(dir / "c.tsv", false);
  CHECK(kept.tweets.size() == 3);
  CHECK(kept.stats.user_count == 2);
}

TEST_CASE("ingest of an empty file") {
  auto dir = scratch("corpus");
  write_file(dir / "empty.tsv", "");
  auto c = ingest(dir / "empty.tsv", true);
  CHECK(c.tweets.empty());
  CHECK(c.stats == CorpusStats{});
}

TEST_CASE("ingest skips malformed lines and duplicate ids") {
  auto dir = scratch("corpus");
  write_file(dir / "c.tsv",
             "t1\tu1\t1\t0\tone\n"
             "t2\tu1\t2\t0\ttwo\n"
             "garbage line\n"
             "\n"
             "t3\tu2\t3\t0\tthree\n"
             "t4\tu2\t4\t0\tfour\n");
  auto c = ingest(dir / "c.tsv", true);
  CHECK(c.tweets.size() == 4);
  CHECK(c.stats.malformed_lines == 1);

  write_file(dir / "dup.tsv", "t1\tu1\t1\t0\tone\nt1\tu2\t2\t0\tagain\n");
  auto d = ingest(dir / "dup.tsv", true);
  CHECK(d.tweets.size() == 1);
  CHECK(d.stats.malformed_lines == 1);
}

TEST_CASE("ingest of a missing file is an I/O error") {
  CHECK_THROWS_AS(ingest("/nonexistent/corpus.tsv", true), IoError);
}

TEST_CASE("SyntheticSpec validation") {
  SyntheticSpec s;
  CHECK_NOTHROW(s.validate());
  auto bad = [](auto mutate) {
    SyntheticSpec x;
    mutate(x);
    return x;
  };
  CHECK_THROWS_AS(bad([](auto& x) { x.num_users = 0; }).validate(), std::invalid_argument);
  CHECK_THROWS_AS(bad([](auto& x) { x.true_rank = 51; }).validate(), std::invalid_argument);
  CHECK_THROWS_AS(bad([](auto& x) { x.density = 0; }).validate(), std::invalid_argument);
  CHECK_THROWS_AS(bad([](auto& x) { x.density = 1.5; }).validate(), std::invalid_argument);
  CHECK_THROWS_AS(bad([](auto& x) { x.polarity_noise = 1.0; }).validate(), std::invalid_argument);
  CHECK_THROWS_AS(bad([](auto& x) { x.statements_min = 3, x.statements_max = 2; }).validate(), std::invalid_argument);
}

TEST_CASE("full density covers every cell") {
  SyntheticSpec s;
  s.num_users = 12;
  s.num_topics = 7;
  s.true_rank = 3;
  s.density = 1.0;
  auto syn = generate_synthetic(s);
  CHECK(syn.truth.size() == 12 * 7);
  for (const auto& u : syn.users) {
    for (const auto& t : syn.topics) CHECK(syn.truth.count({u, t}) == 1);
  }
}

TEST_CASE("observed cell count stays within a 3 sigma binomial bound") {
  SyntheticSpec s;  // 500 x 50, density 0.2
  auto syn = generate_synthetic(s);
  const double n = 500.0 * 50.0;
  const double mean = n * s.density;
  const double sigma = std::sqrt(n * s.density * (1.0 - s.density));
  CHECK(std::abs(static_cast<double>(syn.truth.size()) - mean) <= 3.0 * sigma);
}

TEST_CASE("generator output is seed-deterministic") {
  SyntheticSpec s;
  s.num_users = 40;
  s.num_topics = 10;
  auto dir = scratch("synth");
  write_corpus(dir / "a.tsv", generate_synthetic(s).tweets);
  write_corpus(dir / "b.tsv", generate_synthetic(s).tweets);
  CHECK(testsupport::read_file(dir / "a.tsv") == testsupport::read_file(dir / "b.tsv"));
  s.seed = 2;
  write_corpus(dir / "c.tsv", generate_synthetic(s).tweets);
  CHECK(testsupport::read_file(dir / "a.tsv") != testsupport::read_file(dir / "c.tsv"));
}

TEST_CASE("generated records are well formed with unique ids") {
  SyntheticSpec s;
  s.num_users = 30;
  s.num_topics = 8;
  s.retweet_rate = 0.5;
  auto syn = generate_synthetic(s);
  std::set<std::string> ids;
  std::size_t retweets = 0;
  for (const auto& t : syn.tweets) {
    CHECK(ids.insert(t.tweet_id).second);
    auto back = parse_tweet_line(format_tweet_line(t));
    REQUIRE(back);
    CHECK(*back == t);
    retweets += t.is_retweet;
  }
  CHECK(retweets > 0);
}

TEST_CASE("ground truth file round-trip") {
  SyntheticSpec s;
  s.num_users = 20;
  s.num_topics = 5;
  s.true_rank = 2;
  auto syn = generate_synthetic(s);
  auto dir = scratch("truth");
  write_ground_truth(dir / "truth.tsv", syn.truth);
  CHECK(read_ground_truth(dir / "truth.tsv") == syn.truth);
  write_file(dir / "bad.tsv", "u\tt\t0\n");
  CHECK_THROWS_AS(read_ground_truth(dir / "bad.tsv"), FormatError);
}
