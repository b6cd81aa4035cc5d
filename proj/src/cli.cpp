#include "topicstream/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>

#include "topicstream/clustering.hpp"
#include "topicstream/corpus.hpp"
#include "topicstream/embeddings.hpp"
#include "topicstream/error.hpp"
#include "topicstream/external_ranker.hpp"
#include "topicstream/harness.hpp"
#include "topicstream/metrics.hpp"
#include "topicstream/parallel.hpp"
#include "topicstream/ranker.hpp"
#include "topicstream/retrieval.hpp"
#include "topicstream/streams.hpp"
#include "topicstream/synthetic.hpp"

namespace topicstream {
namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

struct Globals {
  std::uint64_t seed = 13;
  std::string corpus_dir;
  std::string out_dir;
  unsigned threads = 0;
  std::string log_level = "info";
};

struct CorpusFlags {
  std::string queries, collection, qrels;
};

struct SynthFlags {
  std::size_t topics = 3;
  std::size_t queries_per_topic = 120;
  std::size_t vocab = 400;
  std::size_t filler = 8;
  std::size_t distractors = 4;
  std::vector<int> polarity;
  double noise = 0.05;
};

struct TopicsFlags {
  std::string vectors;
  double t1 = 0.7;
  std::size_t s = 40;
  double t2 = 0.5;
  std::size_t sample_size = 50000;
  SplitSizes splits;
  std::string embedding_model;
};

struct RandomFlags {
  std::string reference;
};

struct SimilarityFlags {
  std::string sequence;
  std::size_t pool_size = 250;
  std::size_t depth = 1000;
};

struct ScenarioFlags {
  std::string kind;
  std::string sequence;
  std::string vectors;
  std::size_t k = 5;
  std::size_t topics = 3;
  double plus_fraction = 0.75;
  double min_frac = 0.25;
  std::size_t eval_cap = 20;
  std::string embedding_model;
};

struct RunFlags {
  std::string sequence;
  std::string scenario;
  std::string ranker = "bm25";
  std::string ranker_cmd;
  std::string mode = "sequential";
  int epochs = 1;
  std::size_t depth = 1000;
  std::size_t negatives_depth = 100;
  double margin = 1.0;
  double lr = 0.1;
  std::size_t negatives = 4;
  int timeout = 300;
};

struct ReportFlags {
  std::string run;
  std::string matrix;
  std::string metric = "mrr10";
};

fs::path resolve(const std::string& flag, const std::string& flag_name, const Globals& g,
                 const char* default_name) {
  if (!flag.empty()) return flag;
  if (!g.corpus_dir.empty()) return fs::path(g.corpus_dir) / default_name;
  throw InputError("--" + flag_name + " or --corpus-dir is required");
}

fs::path out_dir(const Globals& g) {
  if (g.out_dir.empty()) throw InputError("--out-dir is required");
  fs::create_directories(g.out_dir);
  return g.out_dir;
}

ojson manifest(const std::string& command, const Globals& g) {
  ojson m;
  m["tool"] = "topicstream";
  m["version"] = std::string(kToolVersion);
  m["command"] = command;
  m["seed"] = g.seed;
  m["corpus_dir"] = g.corpus_dir;
  return m;
}

void write_manifest(const ojson& m, const fs::path& dir) {
  std::ofstream out(dir / "manifest.json");
  if (!out) throw InputError("cannot write " + (dir / "manifest.json").string());
  out << m.dump(2) << '\n';
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
}

std::string fixed(double v, int decimals) { return format_fixed(v, decimals); }

void log_findings(const ValidationReport& report) {
  if (report.ok()) return;
  spdlog::warn("{} qrels reference unknown queries, {} unknown documents; they are ignored",
               report.count(ValidationFinding::Kind::kDanglingQuery),
               report.count(ValidationFinding::Kind::kDanglingDoc));
}

// Queries and qrels only; document checks are skipped.
Corpus load_query_side(const CorpusFlags& f, const Globals& g, ojson& inputs) {
  const auto qpath = resolve(f.queries, "queries", g, "queries.tsv");
  const auto rpath = resolve(f.qrels, "qrels", g, "qrels.txt");
  inputs["queries"] = qpath.string();
  inputs["qrels"] = rpath.string();
  Corpus c;
  c.queries = load_queries(qpath);
  c.qrels = load_qrels(rpath);
  return c;
}

Corpus load_full(const CorpusFlags& f, const Globals& g, ojson& inputs) {
  Corpus c = load_query_side(f, g, inputs);
  const auto dpath = resolve(f.collection, "collection", g, "collection.tsv");
  inputs["collection"] = dpath.string();
  c.docs = load_documents(dpath);
  log_findings(validate_corpus(c));
  return c;
}

ojson scenario_params_json(const ScenarioParams& p) {
  ojson j;
  j["init_tasks"] = p.init_tasks;
  j["topics"] = p.topics;
  j["plus_fraction"] = p.plus_fraction;
  j["min_frac"] = p.min_frac;
  j["max_iter"] = p.max_iter;
  j["eval_cap"] = p.eval_cap;
  j["min_items"] = p.min_items;
  return j;
}

int cmd_synth(const Globals& g, const SynthFlags& f, std::ostream& out) {
  const auto dir = out_dir(g);
  SyntheticConfig c;
  c.topics = f.topics;
  c.queries_per_topic = f.queries_per_topic;
  c.vocab_per_topic = f.vocab;
  c.filler_words = f.filler;
  c.distractors = f.distractors;
  c.polarity = f.polarity;
  c.noise = f.noise;
  c.seed = g.seed;
  if (c.topics == 0 || c.queries_per_topic == 0 || c.vocab_per_topic < 2) {
    throw InputError("synth needs at least 1 topic, 1 query per topic and a vocabulary of 2");
  }
  for (int p : c.polarity) {
    if (p < -1 || p > 1) throw InputError("--polarity values must be -1, 0 or 1");
  }
  const auto synth = make_synthetic_corpus(c);
  write_synthetic_corpus(synth, dir);

  auto m = manifest("synth", g);
  m["flags"] = {{"topics", f.topics},     {"queries_per_topic", f.queries_per_topic},
                {"vocab", f.vocab},       {"filler", f.filler},
                {"distractors", f.distractors},
                {"polarity", f.polarity}, {"noise", f.noise}};
  write_manifest(m, dir);
  out << "queries: " << synth.corpus.queries.size() << "\n"
      << "documents: " << synth.corpus.docs.size() << "\n";
  return 0;
}

int cmd_build_topics(const Globals& g, const CorpusFlags& cf, const TopicsFlags& f,
                     std::ostream& out) {
  ClusterParams params{f.t1, f.t2, f.s, f.sample_size, g.seed};
  params.check();
  if (f.splits.tracked == 0) throw InputError("--tracked must be positive");
  const auto dir = out_dir(g);

  auto m = manifest("build-topics", g);
  ojson inputs;
  Corpus corpus = load_query_side(cf, g, inputs);
  const auto vpath = resolve(f.vectors, "vectors", g, "query_vectors.txt");
  inputs["vectors"] = vpath.string();
  const auto table = load_vectors(vpath);

  std::vector<std::string> eligible;
  std::size_t missing = 0;
  for (const auto& q : judged_queries(corpus)) {
    if (table.contains(q)) {
      eligible.push_back(q);
    } else {
      ++missing;
    }
  }
  if (missing > 0) spdlog::warn("{} judged queries have no vector and are left out", missing);
  if (eligible.empty()) throw InputError("no judged query has a vector");

  const auto clusters = cluster_queries(eligible, table, params);
  if (clusters.empty()) {
    throw InputError("no community reached the minimum size " + std::to_string(f.s));
  }
  write_clusters(clusters, dir / "clusters.jsonl");

  const auto seq = build_topic_sequence(clusters, corpus, g.seed, f.splits);
  write_sequence(seq, corpus.queries, dir);

  double mean = 0.0;
  for (const auto& c : clusters) mean += static_cast<double>(c.size());
  mean /= static_cast<double>(clusters.size());
  double var = 0.0;
  for (const auto& c : clusters) {
    const double d = static_cast<double>(c.size()) - mean;
    var += d * d;
  }
  const double sd = std::sqrt(var / static_cast<double>(clusters.size()));

  m["inputs"] = inputs;
  m["flags"] = {{"t1", f.t1},
                {"s", f.s},
                {"t2", f.t2},
                {"sample_size", f.sample_size},
                {"val", f.splits.val},
                {"test", f.splits.test},
                {"tracked", f.splits.tracked},
                {"embedding_model", f.embedding_model}};
  m["results"] = {{"clusters", clusters.size()},
                  {"tasks", seq.tasks.size()},
                  {"queries_without_vector", missing}};
  m["notes"] = {
      "population compares each query with centroids computed from seed members only",
      "clustering samples judged queries only"};
  write_manifest(m, dir);

  out << "clusters: " << clusters.size() << " (size " << fixed(mean, 1) << " +- "
      << fixed(sd, 1) << ")\n"
      << "tasks: " << seq.tasks.size() << "\n";
  return 0;
}

int cmd_build_random(const Globals& g, const CorpusFlags& cf, const RandomFlags& f,
                     std::ostream& out) {
  if (f.reference.empty()) throw InputError("--reference-sequence is required");
  const fs::path ref(f.reference);
  if (!fs::exists(ref / "sequence.json")) {
    throw InputError("no sequence.json under " + ref.string());
  }
  const auto reference = read_sequence(ref);
  const auto dir = out_dir(g);
  auto m = manifest("build-random", g);
  ojson inputs;
  Corpus corpus = load_query_side(cf, g, inputs);
  inputs["reference_sequence"] = ref.string();

  const auto seq = build_random_sequence(reference, corpus, g.seed);
  write_sequence(seq, corpus.queries, dir);
  m["inputs"] = inputs;
  write_manifest(m, dir);
  out << "tasks: " << seq.tasks.size() << "\n";
  return 0;
}

int cmd_similarity(const Globals& g, const CorpusFlags& cf, const SimilarityFlags& f,
                   std::ostream& out) {
  if (f.sequence.empty()) throw InputError("--sequence is required");
  if (f.pool_size == 0 || f.depth == 0) throw InputError("--pool-size and --depth must be positive");
  const auto seq = read_sequence(f.sequence);
  const auto dir = out_dir(g);
  auto m = manifest("similarity", g);
  ojson inputs;
  Corpus corpus = load_full(cf, g, inputs);
  inputs["sequence"] = f.sequence;
  const auto index = InvertedIndex::build(corpus.docs);

  CScoreParams params;
  params.pool_size = f.pool_size;
  params.depth = f.depth;
  params.seed = g.seed;
  const auto matrix = similarity_matrix(seq.tasks, corpus.queries, index, params);
  {
    std::ofstream csv(dir / "matrix.csv");
    if (!csv) throw InputError("cannot write " + (dir / "matrix.csv").string());
    write_matrix_csv(matrix, csv);
  }
  m["inputs"] = inputs;
  m["flags"] = {{"pool_size", f.pool_size}, {"depth", f.depth}};
  m["results"] = {{"intra_mean", matrix.intra_mean()}, {"inter_mean", matrix.inter_mean()}};
  write_manifest(m, dir);
  out << "intra: " << fixed(100.0 * matrix.intra_mean(), 1) << "%\n"
      << "inter: " << fixed(100.0 * matrix.inter_mean(), 1) << "%\n";
  return 0;
}

int cmd_build_scenario(const Globals& g, const CorpusFlags& cf, const ScenarioFlags& f,
                       std::ostream& out) {
  if (f.sequence.empty()) throw InputError("--sequence is required");
  const auto kind = scenario_kind_from_string(f.kind);
  const auto seq = read_sequence(f.sequence);
  const auto dir = out_dir(g);
  auto m = manifest("build-scenario", g);
  ojson inputs;
  Corpus corpus = load_query_side(cf, g, inputs);
  inputs["sequence"] = f.sequence;

  ScenarioParams params;
  params.init_tasks = f.k;
  params.topics = f.topics;
  params.plus_fraction = f.plus_fraction;
  params.min_frac = f.min_frac;
  params.eval_cap = f.eval_cap;

  std::vector<Scenario> scenarios;
  switch (kind) {
    case ScenarioKind::kDirectTransfer:
      scenarios = build_direct_transfer(seq, g.seed, params);
      break;
    case ScenarioKind::kInformationUpdate: {
      const auto vpath = resolve(f.vectors, "vectors", g, "doc_vectors.txt");
      inputs["vectors"] = vpath.string();
      scenarios = build_information_update(seq, load_vectors(vpath), g.seed, params);
      break;
    }
    case ScenarioKind::kLanguageDrift: {
      const auto vpath = resolve(f.vectors, "vectors", g, "query_vectors.txt");
      inputs["vectors"] = vpath.string();
      scenarios = build_language_drift(seq, load_vectors(vpath), g.seed, params);
      break;
    }
  }

  ojson index = ojson::array();
  for (const auto& sc : scenarios) {
    write_scenario(sc, corpus.queries, dir / sc.id);
    index.push_back({{"id", sc.id},
                     {"kind", std::string(to_string(sc.kind))},
                     {"reversed", sc.reversed},
                     {"topic", sc.topic}});
    out << sc.id << ": " << sc.tasks.size() << " tasks";
    if (sc.roles.collisions > 0) out << ", " << sc.roles.collisions << " mapping collisions";
    out << "\n";
  }
  write_text(dir / "scenarios.json", index.dump(2) + "\n");

  m["inputs"] = inputs;
  m["flags"] = {{"kind", f.kind},
                {"embedding_model", f.embedding_model},
                {"params", scenario_params_json(params)}};
  m["notes"] = {"queries with several judged documents keep one, sampled with the run seed"};
  write_manifest(m, dir);
  return 0;
}

std::unique_ptr<Ranker> make_ranker(const RunFlags& f, const InvertedIndex& index) {
  if (f.ranker == "bm25") return std::make_unique<Bm25Ranker>();
  if (f.ranker == "termweight") {
    TermWeightConfig c;
    c.margin = f.margin;
    c.learning_rate = f.lr;
    c.negatives_per_pair = f.negatives;
    return std::make_unique<TermWeightRanker>(index, c);
  }
  if (f.ranker == "external") {
    if (f.ranker_cmd.empty()) throw InputError("--ranker external needs --ranker-cmd");
    return std::make_unique<ExternalRanker>(f.ranker_cmd, std::chrono::seconds(f.timeout));
  }
  throw InputError("unknown ranker '" + f.ranker + "' (bm25|termweight|external)");
}

ojson ranker_json(const RunFlags& f) {
  ojson j;
  j["name"] = f.ranker;
  if (f.ranker == "termweight") {
    j["margin"] = f.margin;
    j["learning_rate"] = f.lr;
    j["negatives_per_pair"] = f.negatives;
    j["note"] = "toy ranker hyperparameters are toolkit choices, not taken from the literature";
  }
  if (f.ranker == "external") {
    j["command"] = f.ranker_cmd;
    j["timeout_seconds"] = f.timeout;
  }
  return j;
}

void print_table(const RunHistory& h, const std::string& title, std::ostream& out) {
  const std::size_t last = h.sequence_length();
  if (!title.empty()) out << title << "\n";
  out << "task\tmrr@10\tmrr@100\n";
  double s10 = 0.0, s100 = 0.0;
  for (std::size_t i = 0; i < h.labels().size(); ++i) {
    const auto& r = h.at(i, last);
    s10 += r.mrr10;
    s100 += r.mrr100;
    out << h.labels()[i] << "\t" << fixed(100.0 * r.mrr10, 1) << "\t"
        << fixed(100.0 * r.mrr100, 1) << "\n";
  }
  const double n = static_cast<double>(h.labels().size());
  out << "mean\t" << fixed(100.0 * s10 / n, 1) << "\t" << fixed(100.0 * s100 / n, 1) << "\n";
}

int cmd_run(const Globals& g, const CorpusFlags& cf, const RunFlags& f, std::ostream& out) {
  if (f.sequence.empty() == f.scenario.empty()) {
    throw InputError("exactly one of --sequence and --scenario is required");
  }
  if (f.timeout <= 0) throw InputError("--timeout must be positive");
  RunConfig config;
  config.seed = g.seed;
  config.candidates_depth = f.depth;
  config.epochs_per_task = f.epochs;
  config.mode = run_mode_from_string(f.mode);
  config.negatives_depth = f.negatives_depth;
  config.check();
  if (f.ranker != "bm25" && f.ranker != "termweight" && f.ranker != "external") {
    throw InputError("unknown ranker '" + f.ranker + "' (bm25|termweight|external)");
  }

  // Resolve the run targets before loading the corpus so that bad paths
  // fail fast.
  std::optional<TopicSequence> seq;
  std::vector<fs::path> scenario_dirs;
  if (!f.sequence.empty()) {
    seq = read_sequence(f.sequence);
  } else {
    const fs::path root(f.scenario);
    if (fs::exists(root / "scenario.json")) {
      scenario_dirs.push_back(root);
    } else if (fs::exists(root / "scenarios.json")) {
      std::ifstream in(root / "scenarios.json");
      ojson list;
      try {
        list = ojson::parse(in);
        for (const auto& e : list) scenario_dirs.push_back(root / e.at("id").get<std::string>());
      } catch (const nlohmann::json::exception& e) {
        throw InputError((root / "scenarios.json").string() + ": " + e.what());
      }
    } else {
      throw InputError("no scenario.json or scenarios.json under " + root.string());
    }
  }

  const auto dir = out_dir(g);
  auto m = manifest("run", g);
  ojson inputs;
  Corpus corpus = load_full(cf, g, inputs);
  const auto index = InvertedIndex::build(corpus.docs);

  ojson results = ojson::array();
  if (seq) {
    inputs["sequence"] = f.sequence;
    auto ranker = make_ranker(f, index);
    config.out_dir = dir;
    const auto h = run_sequence(*seq, *ranker, config, corpus, index);
    print_table(h, "", out);
  } else {
    inputs["scenario"] = f.scenario;
    for (const auto& sdir : scenario_dirs) {
      const auto sc = read_scenario(sdir);
      auto ranker = make_ranker(f, index);
      config.out_dir = scenario_dirs.size() == 1 ? dir : dir / sc.id;
      const auto h = run_scenario(sc, *ranker, config, corpus, index);
      print_table(h, sc.id, out);
      results.push_back(sc.id);
    }
  }

  m["inputs"] = inputs;
  m["ranker"] = ranker_json(f);
  m["config"] = {{"mode", std::string(to_string(config.mode))},
                 {"epochs_per_task", config.epochs_per_task},
                 {"candidates_depth", config.candidates_depth},
                 {"negatives_depth", config.negatives_depth},
                 {"bm25", {{"k1", config.bm25.k1}, {"b", config.bm25.b}}}};
  if (!results.empty() && scenario_dirs.size() > 1) m["scenarios"] = results;
  write_manifest(m, dir);
  return 0;
}

int cmd_report(const Globals& g, const ReportFlags& f, std::ostream& out) {
  if (f.run.empty() || f.matrix.empty()) throw InputError("--run and --matrix are required");
  const auto metric = metric_from_string(f.metric);
  const fs::path hpath = fs::path(f.run) / "history.csv";
  const auto history = read_history_csv(hpath);
  fs::path mpath = f.matrix;
  if (fs::is_directory(mpath)) mpath /= "matrix.csv";
  const auto matrix = read_matrix_csv(mpath);
  const auto rows = quartile_forgetting(history, matrix, metric);
  const auto dir = out_dir(g);
  {
    std::ofstream csv(dir / "quartiles.csv");
    if (!csv) throw InputError("cannot write " + (dir / "quartiles.csv").string());
    write_quartile_csv(rows, csv);
  }

  std::string summary = "task\tbest_step\tbest\tfinal\tmax_mf\n";
  for (std::size_t i = 0; i < history.labels().size(); ++i) {
    const std::size_t best = history.best_step(i, metric);
    double max_mf = 0.0;
    for (std::size_t j = 0; j < history.steps(); ++j) {
      max_mf = std::max(max_mf, mf_score(history, i, j, metric));
    }
    summary += history.labels()[i] + "\t" + std::to_string(best) + "\t" +
               fixed(history.score(i, best, metric), 6) + "\t" +
               fixed(history.score(i, history.sequence_length(), metric), 6) + "\t" +
               fixed(max_mf, 6) + "\n";
  }
  summary += "\nquartile\tmean_similarity\tmean_mf\tpairs\n";
  for (const auto& r : rows) {
    if (r.tracked_task != "pooled") continue;
    summary += "Q" + std::to_string(r.quartile) + "\t" +
               (r.count ? fixed(r.mean_similarity, 6) : "nan") + "\t" +
               (r.count ? fixed(r.mean_mf, 6) : "nan") + "\t" + std::to_string(r.count) + "\n";
  }
  write_text(dir / "summary.txt", summary);

  auto m = manifest("report", g);
  m["inputs"] = {{"history", hpath.string()}, {"matrix", f.matrix}};
  m["flags"] = {{"metric", f.metric}};
  write_manifest(m, dir);
  out << summary;
  return 0;
}

void configure_logging(const std::string& level) {
  auto logger = spdlog::get("topicstream");
  if (!logger) logger = spdlog::stderr_color_mt("topicstream");
  spdlog::set_default_logger(logger);
  const auto lvl = spdlog::level::from_str(level);
  if (lvl == spdlog::level::off && level != "off") {
    throw InputError("unknown log level '" + level + "'");
  }
  spdlog::set_level(lvl);
}

void add_corpus_flags(CLI::App* sub, CorpusFlags& cf, bool collection) {
  sub->add_option("--queries", cf.queries, "Query file (id<TAB>text); default <corpus-dir>/queries.tsv");
  sub->add_option("--qrels", cf.qrels, "TREC qrels; default <corpus-dir>/qrels.txt");
  if (collection) {
    sub->add_option("--collection", cf.collection,
                    "Passage file (id<TAB>text); default <corpus-dir>/collection.tsv");
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Topic-based continual retrieval benchmark toolkit", "topicstream"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Run seed")->capture_default_str();
  app.add_option("--corpus-dir", g.corpus_dir,
                 "Directory holding queries.tsv, collection.tsv, qrels.txt, "
                 "query_vectors.txt, doc_vectors.txt");
  app.add_option("--out-dir", g.out_dir, "Output directory");
  app.add_option("--threads", g.threads, "Worker threads (0: logical cores)")
      ->capture_default_str();
  app.add_option("--log-level", g.log_level, "trace|debug|info|warn|error|off")
      ->capture_default_str();

  CorpusFlags cf;

  SynthFlags sf;
  auto* synth = app.add_subcommand("synth", "Write a planted-topic synthetic corpus");
  synth->add_option("--topics", sf.topics, "Topic count")->capture_default_str();
  synth->add_option("--queries-per-topic", sf.queries_per_topic)->capture_default_str();
  synth->add_option("--vocab", sf.vocab, "Words per topic vocabulary")->capture_default_str();
  synth->add_option("--filler", sf.filler, "Filler words per document")->capture_default_str();
  synth->add_option("--distractors", sf.distractors, "Distractor documents per query")
      ->capture_default_str();
  synth->add_option("--polarity", sf.polarity,
                    "Per-topic role of the shared word: 1 marks relevant documents, -1 "
                    "distractors, 0 absent (e.g. --polarity=-1,1,0)")
      ->delimiter(',');
  synth->add_option("--noise", sf.noise, "Embedding noise scale")->capture_default_str();

  TopicsFlags tf;
  auto* topics = app.add_subcommand("build-topics", "Cluster queries into topic tasks");
  add_corpus_flags(topics, cf, false);
  topics->add_option("--vectors", tf.vectors, "Query vectors; default <corpus-dir>/query_vectors.txt");
  topics->add_option("--t1", tf.t1, "Seed threshold (member-to-anchor cosine)")->capture_default_str();
  topics->add_option("--s", tf.s, "Minimum community size")->capture_default_str();
  topics->add_option("--t2", tf.t2, "Population threshold (query-to-centroid cosine)")
      ->capture_default_str();
  topics->add_option("--sample-size", tf.sample_size, "Queries sampled for seeding")
      ->capture_default_str();
  topics->add_option("--val", tf.splits.val, "Maximum validation queries per task")
      ->capture_default_str();
  topics->add_option("--test", tf.splits.test, "Maximum test queries per task")
      ->capture_default_str();
  topics->add_option("--tracked", tf.splits.tracked, "Tracked task positions")
      ->capture_default_str();
  topics->add_option("--embedding-model", tf.embedding_model,
                     "Name of the model behind the vectors (recorded only)");

  RandomFlags rf;
  auto* random = app.add_subcommand("build-random", "Size-matched random task sequence");
  add_corpus_flags(random, cf, false);
  random->add_option("--reference-sequence", rf.reference, "Topic sequence directory");

  SimilarityFlags simf;
  auto* sim = app.add_subcommand("similarity", "Pairwise task similarity matrix");
  add_corpus_flags(sim, cf, true);
  sim->add_option("--sequence", simf.sequence, "Sequence directory");
  sim->add_option("--pool-size", simf.pool_size, "Queries per pool")->capture_default_str();
  sim->add_option("--depth", simf.depth, "BM25 retrieval depth")->capture_default_str();

  ScenarioFlags scf;
  auto* scen = app.add_subcommand("build-scenario", "Controlled-shift scenarios");
  add_corpus_flags(scen, cf, false);
  scen->add_option("--kind", scf.kind, "dt|iu|ld")->required();
  scen->add_option("--sequence", scf.sequence, "Topic sequence directory");
  scen->add_option("--vectors", scf.vectors,
                   "Document vectors (iu) or query vectors (ld); defaults from --corpus-dir");
  scen->add_option("--k", scf.k, "Tasks merged into the init task")->capture_default_str();
  scen->add_option("--topics", scf.topics, "Topics per iu/ld construction")->capture_default_str();
  scen->add_option("--plus-fraction", scf.plus_fraction, "Share of the topic kept for dt training")
      ->capture_default_str();
  scen->add_option("--min-frac", scf.min_frac, "Minimum side share in 2-means")
      ->capture_default_str();
  scen->add_option("--eval-cap", scf.eval_cap, "Maximum evaluation queries per side")
      ->capture_default_str();
  scen->add_option("--embedding-model", scf.embedding_model,
                   "Name of the model behind the vectors (recorded only)");

  RunFlags runf;
  auto* run = app.add_subcommand("run", "Train and evaluate a ranker over a stream");
  add_corpus_flags(run, cf, true);
  run->add_option("--sequence", runf.sequence, "Sequence directory");
  run->add_option("--scenario", runf.scenario,
                  "Scenario directory, or a build-scenario output directory");
  run->add_option("--ranker", runf.ranker, "bm25|termweight|external")->capture_default_str();
  run->add_option("--ranker-cmd", runf.ranker_cmd, "Shell command of the external ranker");
  run->add_option("--mode", runf.mode, "sequential|joint|frozen")->capture_default_str();
  run->add_option("--epochs", runf.epochs, "Epochs per task")->capture_default_str();
  run->add_option("--depth", runf.depth, "BM25 candidates re-ranked per query")
      ->capture_default_str();
  run->add_option("--negatives-depth", runf.negatives_depth, "BM25 depth for negative sampling")
      ->capture_default_str();
  run->add_option("--margin", runf.margin, "Hinge margin (termweight)")->capture_default_str();
  run->add_option("--lr", runf.lr, "Learning rate (termweight)")->capture_default_str();
  run->add_option("--negatives", runf.negatives, "Negatives per positive (termweight)")
      ->capture_default_str();
  run->add_option("--timeout", runf.timeout, "External ranker reply timeout, seconds")
      ->capture_default_str();

  ReportFlags repf;
  auto* report = app.add_subcommand("report", "Forgetting by similarity quartile");
  report->add_option("--run", repf.run, "Run directory holding history.csv");
  report->add_option("--matrix", repf.matrix, "Similarity matrix CSV, or the directory holding matrix.csv");
  report->add_option("--metric", repf.metric, "mrr10|mrr100")->capture_default_str();

  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.push_back("topicstream");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    configure_logging(g.log_level);
    set_max_threads(g.threads);
    if (*synth) return cmd_synth(g, sf, out);
    if (*topics) return cmd_build_topics(g, cf, tf, out);
    if (*random) return cmd_build_random(g, cf, rf, out);
    if (*sim) return cmd_similarity(g, cf, simf, out);
    if (*scen) return cmd_build_scenario(g, cf, scf, out);
    if (*run) return cmd_run(g, cf, runf, out);
    if (*report) return cmd_report(g, repf, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const RuntimeFailure& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}

}  // namespace topicstream
