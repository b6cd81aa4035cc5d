#include <doctest.h>

#include "support.hpp"
#include "topicstream/error.hpp"
#include "topicstream/harness.hpp"

using namespace topicstream;

namespace {

// Records what it was trained on; scores candidates by BM25.
class Recorder final : public Ranker {
 public:
  std::string name() const override { return "recorder"; }
  bool trainable() const override { return true; }
  double train(std::span<const TrainingExample> examples, TrainContext& ctx) override {
    batches.push_back(examples.size());
    epochs.push_back(ctx.epoch);
    if (fail_on_batch && batches.size() == fail_on_batch) throw std::runtime_error("boom");
    return 0.0;
  }
  std::vector<double> rescore(const RescoreRequest& r) override {
    std::vector<double> out;
    for (const auto& c : r.candidates) out.push_back(c.first_stage_score);
    return out;
  }
  std::vector<std::size_t> batches;
  std::vector<int> epochs;
  std::size_t fail_on_batch = 0;
};

struct Setup {
  testing::SyntheticStream stream;
  InvertedIndex index;
};

Setup setup(std::size_t topics, std::vector<int> polarity = {}) {
  SyntheticConfig cfg;
  cfg.topics = topics;
  cfg.queries_per_topic = 90;
  cfg.polarity = std::move(polarity);
  auto stream = testing::synthetic_stream(cfg);
  auto index = InvertedIndex::build(stream.synth.corpus.docs);
  return {std::move(stream), std::move(index)};
}

}  // namespace

TEST_CASE("frozen BM25 gives a flat, complete history") {
  auto s = setup(19);
  const auto& seq = s.stream.seq;
  REQUIRE(seq.tasks.size() == 19);
  Bm25Ranker bm25;
  RunConfig config;
  config.mode = RunMode::kFrozen;
  const auto h = run_sequence(seq, bm25, config, s.stream.synth.corpus, s.index);
  CHECK(h.complete());
  CHECK(h.steps() == 20);
  CHECK(h.labels().size() == 5);
  for (std::size_t i = 0; i < h.labels().size(); ++i) {
    for (std::size_t j = 0; j < h.steps(); ++j) {
      CHECK(h.at(i, j) == EvalRecord{i, j, h.at(i, 0).mrr10, h.at(i, 0).mrr100});
      CHECK(mf_score(h, i, j) == 0.0);
    }
  }
}

TEST_CASE("sequential training visits every task in order") {
  auto s = setup(4);
  Recorder rec;
  RunConfig config;
  config.epochs_per_task = 2;
  const auto h = run_sequence(s.stream.seq, rec, config, s.stream.synth.corpus, s.index);
  REQUIRE(rec.batches.size() == 8);
  for (std::size_t j = 0; j < 4; ++j) {
    CHECK(rec.batches[2 * j] == s.stream.seq.tasks[j].train.size());
    CHECK(rec.epochs[2 * j] == 1);
    CHECK(rec.epochs[2 * j + 1] == 2);
  }
  CHECK(h.complete());
}

TEST_CASE("joint mode trains once and repeats the evaluation") {
  auto s = setup(4);
  Recorder rec;
  RunConfig config;
  config.mode = RunMode::kJoint;
  const auto h = run_sequence(s.stream.seq, rec, config, s.stream.synth.corpus, s.index);
  std::size_t total = 0;
  for (const auto& t : s.stream.seq.tasks) total += t.train.size();
  REQUIRE(rec.batches.size() == 1);
  CHECK(rec.batches[0] == total);
  for (std::size_t i = 0; i < h.labels().size(); ++i) {
    for (std::size_t j = 2; j < h.steps(); ++j) {
      CHECK(h.at(i, j).mrr10 == h.at(i, 1).mrr10);
    }
  }
}

TEST_CASE("run directory outputs") {
  auto s = setup(4, {-1, 1, 0, 0});
  testing::TempDir tmp;
  TermWeightRanker ranker(s.index);
  RunConfig config;
  config.out_dir = tmp / "run";
  const auto h = run_sequence(s.stream.seq, ranker, config, s.stream.synth.corpus, s.index);
  CHECK(read_history_csv(tmp / "run" / "history.csv") == read_history_csv(tmp / "run" / "history.csv"));
  for (int j = 0; j <= 4; ++j) {
    CHECK(std::filesystem::exists(tmp / "run" / "checkpoints" / ("step-" + std::to_string(j) + ".tsv")));
  }
  const std::string first = testing::read_file(tmp / "run" / "history.csv");

  TermWeightRanker again(s.index);
  config.out_dir = tmp / "run2";
  run_sequence(s.stream.seq, again, config, s.stream.synth.corpus, s.index);
  CHECK(testing::read_file(tmp / "run2" / "history.csv") == first);
  CHECK(testing::read_file(tmp / "run2" / "checkpoints" / "step-4.tsv") ==
        testing::read_file(tmp / "run" / "checkpoints" / "step-4.tsv"));

  Bm25Ranker bm25;
  config.out_dir = tmp / "run3";
  run_sequence(s.stream.seq, bm25, config, s.stream.synth.corpus, s.index);
  CHECK_FALSE(std::filesystem::exists(tmp / "run3" / "checkpoints" / "step-0.tsv"));
}

TEST_CASE("failures carry the step and keep the partial history") {
  auto s = setup(4);
  testing::TempDir tmp;
  Recorder rec;
  rec.fail_on_batch = 3;
  RunConfig config;
  config.out_dir = tmp.path();
  CHECK_THROWS_WITH_AS(run_sequence(s.stream.seq, rec, config, s.stream.synth.corpus, s.index),
                       doctest::Contains("step 3"), RuntimeFailure);
  const auto csv = testing::read_file(tmp / "history.csv");
  CHECK(csv.find(",2,") != std::string::npos);
  CHECK(csv.find(",3,") == std::string::npos);
}

TEST_CASE("scenario runs pre-train on the init task") {
  auto s = setup(8);
  const auto scenarios = build_direct_transfer(s.stream.seq, 13);
  const auto& sc = scenarios[0];

  Recorder rec;
  RunConfig config;
  const auto h = run_scenario(sc, rec, config, s.stream.synth.corpus, s.index);
  REQUIRE(rec.batches.size() == 4);
  CHECK(rec.batches[0] == sc.tasks[0].train.size());
  CHECK(h.sequence_length() == 3);
  CHECK(h.labels() == std::vector<std::string>{"tau_i", "tau_j"});

  Recorder frozen;
  config.mode = RunMode::kFrozen;
  run_scenario(sc, frozen, config, s.stream.synth.corpus, s.index);
  CHECK(frozen.batches.empty());
}

TEST_CASE("config checks") {
  RunConfig c;
  c.candidates_depth = 50;
  CHECK_THROWS_AS(c.check(), InputError);
  c.candidates_depth = 1000;
  c.epochs_per_task = 0;
  CHECK_THROWS_AS(c.check(), InputError);
  CHECK(run_mode_from_string("joint") == RunMode::kJoint);
  CHECK_THROWS_AS(run_mode_from_string("parallel"), InputError);
}
