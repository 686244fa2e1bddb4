#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "topicpref/corpus.hpp"
#include "topicpref/errors.hpp"
#include "topicpref/evaluation.hpp"
#include "topicpref/extraction.hpp"
#include "topicpref/factorization.hpp"
#include "topicpref/patterns.hpp"
#include "topicpref/pipeline.hpp"
#include "topicpref/topic_space.hpp"

namespace py = pybind11;
using namespace topicpref;

namespace {

// k x n view of a column-major factor block, copied out.
py::array_t<double> factor_array(const std::vector<double>& data, std::size_t k, std::size_t n) {
  py::array_t<double> out({k, n});
  auto view = out.mutable_unchecked<2>();
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t d = 0; d < k; ++d) view(d, j) = data[j * k + d];
  }
  return out;
}

py::array_t<double> vector_array(std::span<const double> v) {
  py::array_t<double> out(v.size());
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

std::size_t ordinal(const Index& idx, const std::string& id, const char* what) {
  auto o = idx.find(id);
  if (!o) throw LookupError(std::string("unknown ") + what + " '" + id + "'");
  return *o;
}

py::dict counts_to_dict(const InstanceCounts& counts) {
  py::dict d;
  for (const auto& [key, c] : counts) d[py::make_tuple(key.first, key.second)] = py::make_tuple(c.pro, c.con);
  return d;
}

InstanceCounts dict_to_counts(const py::dict& d) {
  InstanceCounts counts;
  for (auto item : d) {
    auto key = item.first.cast<std::pair<std::string, std::string>>();
    auto val = item.second.cast<std::pair<std::size_t, std::size_t>>();
    counts[key] = PairCounts{val.first, val.second};
  }
  return counts;
}

std::vector<PreferenceInstance> to_instances(const std::vector<std::tuple<std::string, std::string, int>>& rows) {
  std::vector<PreferenceInstance> out;
  out.reserve(rows.size());
  for (const auto& [u, t, p] : rows) {
    if (p != 1 && p != -1) throw std::invalid_argument("polarity must be +1 or -1");
    out.push_back({u, t, p});
  }
  return out;
}

py::list report_rows(const ThresholdReport& report) {
  py::list rows;
  for (const auto& r : report) {
    py::dict row;
    row["theta"] = r.theta;
    row["model_accuracy"] = r.model_accuracy ? py::cast(*r.model_accuracy) : py::none();
    row["baseline_accuracy"] = r.baseline_accuracy ? py::cast(*r.baseline_accuracy) : py::none();
    row["users_evaluated"] = r.users_evaluated;
    row["cells_evaluated"] = r.cells_evaluated;
    rows.append(row);
  }
  return rows;
}

std::vector<HeldOutCell> to_cells(const std::vector<std::tuple<std::size_t, std::size_t, double>>& rows) {
  std::vector<HeldOutCell> out;
  for (const auto& [r, c, v] : rows) out.push_back({r, c, v});
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Stance mining and user-topic preference factorization";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<IoError>(m, "IoError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<FormatError>(m, "FormatError", base.ptr());
  py::register_exception<LookupError>(m, "LookupError", base.ptr());
  py::register_exception<MetricError>(m, "MetricError", base.ptr());
  py::register_exception<DivergenceError>(m, "DivergenceError", base.ptr());
  py::register_exception<DegenerateVectorError>(m, "DegenerateVectorError", base.ptr());
  py::register_exception<StageError>(m, "StageError", base.ptr());

  // --- corpus ---
  py::class_<Tweet>(m, "Tweet")
      .def(py::init<>())
      .def(py::init([](std::string id, std::string user, std::int64_t ts, std::string text, bool rt) {
             return Tweet{std::move(id), std::move(user), ts, std::move(text), rt};
           }),
           py::arg("tweet_id"), py::arg("user_id"), py::arg("timestamp"), py::arg("text"), py::arg("is_retweet") = false)
      .def_readwrite("tweet_id", &Tweet::tweet_id)
      .def_readwrite("user_id", &Tweet::user_id)
      .def_readwrite("timestamp", &Tweet::timestamp)
      .def_readwrite("text", &Tweet::text)
      .def_readwrite("is_retweet", &Tweet::is_retweet)
      .def("__eq__", [](const Tweet& a, const Tweet& b) { return a == b; })
      .def("__repr__", [](const Tweet& t) { return "Tweet(" + t.tweet_id + ", " + t.user_id + ", '" + t.text + "')"; });

  m.def(
      "ingest",
      [](const std::filesystem::path& path, bool drop_retweets) {
        auto c = ingest(path, drop_retweets);
        py::dict stats;
        stats["tweet_count"] = c.stats.tweet_count;
        stats["user_count"] = c.stats.user_count;
        stats["retweets_removed"] = c.stats.retweets_removed;
        stats["malformed_lines"] = c.stats.malformed_lines;
        return py::make_tuple(c.tweets, stats);
      },
      py::arg("path"), py::arg("drop_retweets") = true, "Read a corpus file; returns (tweets, stats).");
  m.def("write_corpus", &write_corpus, py::arg("path"), py::arg("tweets"));

  py::class_<SyntheticSpec>(m, "SyntheticSpec")
      .def(py::init<>())
      .def_readwrite("num_users", &SyntheticSpec::num_users)
      .def_readwrite("num_topics", &SyntheticSpec::num_topics)
      .def_readwrite("true_rank", &SyntheticSpec::true_rank)
      .def_readwrite("density", &SyntheticSpec::density)
      .def_readwrite("polarity_noise", &SyntheticSpec::polarity_noise)
      .def_readwrite("statements_min", &SyntheticSpec::statements_min)
      .def_readwrite("statements_max", &SyntheticSpec::statements_max)
      .def_readwrite("hashtag_rate", &SyntheticSpec::hashtag_rate)
      .def_readwrite("retweet_rate", &SyntheticSpec::retweet_rate)
      .def_readwrite("factor_decay", &SyntheticSpec::factor_decay)
      .def_readwrite("seed", &SyntheticSpec::seed);

  py::class_<SyntheticCorpus>(m, "SyntheticCorpus")
      .def_readonly("tweets", &SyntheticCorpus::tweets)
      .def_readonly("truth", &SyntheticCorpus::truth)
      .def_readonly("users", &SyntheticCorpus::users)
      .def_readonly("topics", &SyntheticCorpus::topics);
  m.def("generate_synthetic", &generate_synthetic, py::arg("spec"));
  m.def("synthetic_templates", [] {
    return py::make_tuple(synthetic_pro_templates(), synthetic_con_templates());
  });
  m.attr("SYNTHETIC_PRO_RULE") = std::string(kSyntheticProRule);
  m.attr("SYNTHETIC_CON_RULE") = std::string(kSyntheticConRule);

  // --- patterns ---
  py::enum_<Polarity>(m, "Polarity").value("PRO", Polarity::kPro).value("CON", Polarity::kCon);

  py::class_<HashtagRule>(m, "HashtagRule")
      .def(py::init<Polarity, std::string>(), py::arg("polarity"), py::arg("pattern"))
      .def_property_readonly("polarity", &HashtagRule::polarity)
      .def_property_readonly("pattern", &HashtagRule::pattern);
  m.def("load_rules", &load_rules, py::arg("path"));
  m.def(
      "find_hashtag_occurrences",
      [](const std::vector<Tweet>& tweets, const std::vector<HashtagRule>& rules) {
        py::list out;
        for (const auto& o : find_hashtag_occurrences(tweets, rules)) {
          out.append(py::make_tuple(o.user_id, o.topic, o.polarity, o.tweet_id));
        }
        return out;
      },
      py::arg("tweets"), py::arg("rules"), "Returns (user_id, topic, polarity, tweet_id) tuples.");

  py::class_<StancePattern>(m, "StancePattern")
      .def(py::init<Polarity, std::string>(), py::arg("polarity"), py::arg("template"))
      .def_property_readonly("polarity", &StancePattern::polarity)
      .def_property_readonly("template", &StancePattern::templ)
      .def("fill", &StancePattern::fill)
      .def("__repr__", [](const StancePattern& p) {
        return "StancePattern(" + std::string(to_string(p.polarity())) + ", '" + p.templ() + "')";
      });

  py::class_<CuratedPatterns>(m, "CuratedPatterns")
      .def(py::init<>())
      .def(py::init([](std::vector<std::string> pro, std::vector<std::string> con) {
             CuratedPatterns cp;
             for (auto& t : pro) cp.pro.emplace_back(Polarity::kPro, std::move(t));
             for (auto& t : con) cp.con.emplace_back(Polarity::kCon, std::move(t));
             return cp;
           }),
           py::arg("pro"), py::arg("con"))
      .def_readwrite("pro", &CuratedPatterns::pro)
      .def_readwrite("con", &CuratedPatterns::con);
  m.def("load_curated", &load_curated, py::arg("path"));
  m.def("write_curated", &write_curated, py::arg("path"), py::arg("patterns"));

  m.def(
      "harvest_candidates",
      [](const std::vector<Tweet>& tweets, const std::vector<HashtagRule>& rules, std::size_t window) {
        auto occurrences = find_hashtag_occurrences(tweets, rules);
        py::list out;
        for (const auto& c : harvest_candidates(tweets, occurrences, HarvestConfig{window})) {
          out.append(py::make_tuple(c.pattern.polarity(), c.pattern.templ(), c.distinct_user_count, c.occurrence_count));
        }
        return out;
      },
      py::arg("tweets"), py::arg("rules"), py::arg("window") = 3,
      "Ranked (polarity, template, distinct_users, occurrences) tuples.");

  // --- extraction ---
  m.def(
      "extract_instances",
      [](const std::vector<Tweet>& tweets, const CuratedPatterns& patterns, const std::vector<std::string>& topics) {
        std::vector<std::tuple<std::string, std::string, int>> out;
        for (auto& i : extract_instances(tweets, patterns, TopicVocabulary(topics))) {
          out.emplace_back(std::move(i.user_id), std::move(i.topic), i.polarity);
        }
        return out;
      },
      py::arg("tweets"), py::arg("patterns"), py::arg("topics"), "Returns (user_id, topic, +1|-1) tuples.");
  m.def(
      "filter_instances",
      [](const std::vector<std::tuple<std::string, std::string, int>>& rows, std::size_t min_occurrences,
         std::set<std::string> stop_topics, bool until_stable) {
        FilterConfig cfg{min_occurrences, std::move(stop_topics), until_stable};
        return counts_to_dict(filter_instances(to_instances(rows), cfg));
      },
      py::arg("instances"), py::arg("min_occurrences") = 5, py::arg("stop_topics") = std::set<std::string>{},
      py::arg("until_stable") = false, "Returns {(user, topic): (pro, con)}.");
  m.def("preference_value", [](std::size_t pro, std::size_t con) { return preference_value({pro, con}); });

  py::class_<SparseMatrix>(m, "SparseMatrix")
      .def(py::init([](std::vector<std::string> users, std::vector<std::string> topics,
                       const std::vector<std::tuple<std::size_t, std::size_t, double>>& cells) {
             std::vector<Cell> cs;
             for (const auto& [r, c, v] : cells) cs.push_back({r, c, v});
             return SparseMatrix(Index(std::move(users)), Index(std::move(topics)), std::move(cs));
           }),
           py::arg("users"), py::arg("topics"), py::arg("cells"))
      .def_property_readonly("users", [](const SparseMatrix& s) { return s.users().ids(); })
      .def_property_readonly("topics", [](const SparseMatrix& s) { return s.topics().ids(); })
      .def_property_readonly("nnz", &SparseMatrix::nnz)
      .def_property_readonly("shape", [](const SparseMatrix& s) { return py::make_tuple(s.rows(), s.cols()); })
      .def_property_readonly("cells",
                             [](const SparseMatrix& s) {
                               std::vector<std::tuple<std::size_t, std::size_t, double>> out;
                               for (const auto& c : s.cells()) out.emplace_back(c.row, c.col, c.value);
                               return out;
                             })
      .def("get",
           [](const SparseMatrix& s, const std::string& user, const std::string& topic) -> py::object {
             auto v = s.at(ordinal(s.users(), user, "user"), ordinal(s.topics(), topic, "topic"));
             return v ? py::cast(*v) : py::none();
           })
      .def("__eq__", [](const SparseMatrix& a, const SparseMatrix& b) { return a == b; });
  m.def(
      "build_matrix", [](const py::dict& counts) { return build_matrix(dict_to_counts(counts)); }, py::arg("counts"));
  m.def("write_matrix_dir", &write_matrix_dir, py::arg("dir"), py::arg("matrix"));
  m.def("read_matrix_dir", &read_matrix_dir, py::arg("dir"));

  // --- factorization ---
  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init([](std::size_t k, double lambda_p, double lambda_q, double learning_rate, std::size_t epochs,
                       std::uint64_t seed, std::size_t workers) {
             TrainConfig c{k, lambda_p, lambda_q, learning_rate, epochs, seed, workers};
             c.validate();
             return c;
           }),
           py::arg("k") = 100, py::arg("lambda_p") = 0.1, py::arg("lambda_q") = 0.1, py::arg("learning_rate") = 0.05,
           py::arg("epochs") = 50, py::arg("seed") = 1, py::arg("workers") = 1)
      .def_readwrite("k", &TrainConfig::k)
      .def_readwrite("lambda_p", &TrainConfig::lambda_p)
      .def_readwrite("lambda_q", &TrainConfig::lambda_q)
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_readwrite("epochs", &TrainConfig::epochs)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("workers", &TrainConfig::workers);

  py::class_<FactorModel>(m, "FactorModel")
      .def_property_readonly("k", &FactorModel::k)
      .def_property_readonly("users", [](const FactorModel& f) { return f.users().ids(); })
      .def_property_readonly("topics", [](const FactorModel& f) { return f.topics().ids(); })
      .def_property_readonly("P", [](const FactorModel& f) { return factor_array(f.p(), f.k(), f.users().size()); },
                             "k x |U| user factors (copy).")
      .def_property_readonly("Q", [](const FactorModel& f) { return factor_array(f.q(), f.k(), f.topics().size()); },
                             "k x |T| topic factors (copy).")
      .def("predict", py::overload_cast<std::string_view, std::string_view>(&FactorModel::predict, py::const_),
           py::arg("user"), py::arg("topic"))
      .def("user_vector",
           [](const FactorModel& f, const std::string& u) {
             return vector_array(f.user_vector(ordinal(f.users(), u, "user")));
           })
      .def("topic_vector",
           [](const FactorModel& f, const std::string& t) {
             return vector_array(f.topic_vector(ordinal(f.topics(), t, "topic")));
           })
      .def("__eq__", [](const FactorModel& a, const FactorModel& b) { return a == b; });

  m.def(
      "factorize",
      [](const SparseMatrix& r, const TrainConfig& cfg) {
        TrainResult res;
        {
          py::gil_scoped_release release;
          res = factorize(r, cfg);
        }
        return py::make_tuple(std::move(res.model), res.rmse_per_epoch);
      },
      py::arg("matrix"), py::arg("config") = TrainConfig{}, "Returns (model, rmse_per_epoch).");
  m.def("rmse", &rmse, py::arg("model"), py::arg("matrix"));
  m.def("save_model", &save_model, py::arg("model"), py::arg("path"));
  m.def("load_model", &load_model, py::arg("path"));

  // --- evaluation ---
  py::class_<HoldoutSplit>(m, "HoldoutSplit")
      .def_readonly("train", &HoldoutSplit::train)
      .def_property_readonly("test",
                             [](const HoldoutSplit& s) {
                               std::vector<std::tuple<std::size_t, std::size_t, double>> out;
                               for (const auto& c : s.test) out.emplace_back(c.row, c.col, c.value);
                               return out;
                             })
      .def_readonly("fraction", &HoldoutSplit::fraction)
      .def_readonly("seed", &HoldoutSplit::seed);
  m.def("split", &split, py::arg("matrix"), py::arg("fraction") = 0.05, py::arg("seed") = 1);
  m.def(
      "sign_accuracy",
      [](const FactorModel& model, const std::vector<std::tuple<std::size_t, std::size_t, double>>& test,
         std::size_t theta, const SparseMatrix& train) {
        auto r = sign_accuracy(model, to_cells(test), theta, train);
        return py::make_tuple(r.accuracy, r.cells_evaluated);
      },
      py::arg("model"), py::arg("test"), py::arg("theta"), py::arg("train"), "Returns (accuracy, cells_evaluated).");
  m.def(
      "majority_baseline",
      [](const SparseMatrix& train, const std::vector<std::tuple<std::size_t, std::size_t, double>>& test,
         std::size_t theta) {
        auto r = majority_baseline(train, to_cells(test), theta);
        return py::make_tuple(r.accuracy, r.cells_evaluated);
      },
      py::arg("train"), py::arg("test"), py::arg("theta"));
  m.def(
      "threshold_sweep",
      [](const FactorModel& model, const HoldoutSplit& s, const std::vector<std::size_t>& thetas) {
        return report_rows(threshold_sweep(model, s, thetas));
      },
      py::arg("model"), py::arg("split"), py::arg("thetas"));
  m.def("mean_variance", &mean_variance, py::arg("matrix"), py::arg("theta"));
  m.def(
      "spearman",
      [](const std::vector<double>& xs, const std::vector<double>& ys) { return spearman(xs, ys); }, py::arg("xs"),
      py::arg("ys"));

  // --- topic space ---
  m.def(
      "cosine", [](const FactorModel& f, std::string_view a, std::string_view b) { return cosine(f, a, b); },
      py::arg("model"), py::arg("a"), py::arg("b"));
  m.def(
      "nearest_topics",
      [](const FactorModel& f, std::string_view topic, std::size_t n) {
        std::vector<std::pair<std::string, double>> out;
        for (auto& t : nearest_topics(f, topic, n)) out.emplace_back(std::move(t.topic), t.cosine);
        return out;
      },
      py::arg("model"), py::arg("topic"), py::arg("n") = 10);
  m.def(
      "user_report",
      [](const FactorModel& f, const SparseMatrix& r, std::string_view user, std::size_t top_n) {
        auto rep = user_report(f, r, user, top_n);
        auto scored = [](const std::vector<ScoredTopic>& v) {
          std::vector<std::pair<std::string, double>> out;
          for (const auto& s : v) out.emplace_back(s.topic, s.predicted);
          return out;
        };
        py::dict d;
        d["user_id"] = rep.user_id;
        d["declared_pro"] = rep.declared_pro;
        d["declared_con"] = rep.declared_con;
        d["predicted_pro"] = scored(rep.predicted_pro);
        d["predicted_con"] = scored(rep.predicted_con);
        return d;
      },
      py::arg("model"), py::arg("matrix"), py::arg("user"), py::arg("top_n") = 10);
  m.def(
      "stratified_pair_sample",
      [](const FactorModel& f, const std::string& bands, std::size_t per_band, std::uint64_t seed) {
        std::vector<std::tuple<std::size_t, std::string, std::string, double>> out;
        for (auto& p : stratified_pair_sample(f, parse_bands(bands), per_band, seed)) {
          out.emplace_back(p.band, std::move(p.a), std::move(p.b), p.cosine);
        }
        return out;
      },
      py::arg("model"), py::arg("bands") = "-1:-0.6,-0.6:0.6,0.6:1", py::arg("per_band") = 150, py::arg("seed") = 1,
      "Returns (band_index, topic_a, topic_b, cosine) tuples.");

  // --- pipeline ---
  m.def(
      "run_pipeline",
      [](const std::filesystem::path& corpus, const std::filesystem::path& patterns, const std::filesystem::path& out,
         std::optional<std::filesystem::path> rules, std::optional<std::filesystem::path> topics,
         std::size_t min_count, const TrainConfig& train, double fraction, std::uint64_t split_seed,
         std::vector<std::size_t> thetas) {
        PipelineConfig cfg;
        cfg.corpus = corpus;
        cfg.patterns = patterns;
        cfg.out_dir = out;
        cfg.rules = std::move(rules);
        cfg.topics = std::move(topics);
        cfg.filter.min_occurrences = min_count;
        cfg.train = train;
        cfg.holdout_fraction = fraction;
        cfg.split_seed = split_seed;
        cfg.thetas = std::move(thetas);
        PipelineSummary s;
        {
          py::gil_scoped_release release;
          s = run_pipeline(cfg, nullptr);
        }
        py::dict d;
        d["users"] = s.users;
        d["topics"] = s.topics;
        d["nnz"] = s.nnz;
        d["raw_instances"] = s.raw_instances;
        d["final_rmse"] = s.final_rmse;
        d["report"] = report_rows(s.report);
        return d;
      },
      py::arg("corpus"), py::arg("patterns"), py::arg("out"), py::arg("rules") = py::none(),
      py::arg("topics") = py::none(), py::arg("min_count") = 5, py::arg("train") = TrainConfig{},
      py::arg("fraction") = 0.05, py::arg("split_seed") = 1,
      py::arg("thetas") = std::vector<std::size_t>{0, 5, 10, 30, 100});
}
