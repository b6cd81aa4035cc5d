#include "topicstream/harness.hpp"

#include <fstream>

#include <spdlog/spdlog.h>

#include "topicstream/error.hpp"
#include "topicstream/random.hpp"

namespace topicstream {
namespace {

struct Target {
  std::string label;
  const std::vector<std::string>* queries;
  const QrelSet* qrels;
};

void append_examples(const Task& task, const Corpus& corpus,
                     std::vector<TrainingExample>& out) {
  for (const auto& q : task.train) {
    const auto& judged = task.qrels.judgments(q);
    const auto& query_text = corpus.queries.text(q);
    for (const auto& [doc, grade] : judged) {
      out.push_back({q, query_text, doc, corpus.docs.text(doc), &judged});
    }
  }
}

class Loop {
 public:
  Loop(Ranker& ranker, const RunConfig& config, const Corpus& corpus,
       const InvertedIndex& index, std::vector<Target> targets, std::size_t steps)
      : ranker_(ranker),
        config_(config),
        corpus_(corpus),
        targets_(std::move(targets)),
        cache_(corpus, index, config.candidates_depth, config.bm25),
        sampler_(corpus, index, config.seed, config.negatives_depth, config.bm25) {
    std::vector<std::string> labels;
    for (const auto& t : targets_) labels.push_back(t.label);
    history_ = RunHistory(labels, steps);
    if (config_.out_dir) std::filesystem::create_directories(*config_.out_dir);
  }

  bool training() const {
    return config_.mode != RunMode::kFrozen && ranker_.trainable();
  }

  void train(const std::vector<const Task*>& tasks, bool shuffle, std::uint64_t stream) {
    std::vector<TrainingExample> examples;
    for (const Task* t : tasks) append_examples(*t, corpus_, examples);
    for (int epoch = 1; epoch <= config_.epochs_per_task; ++epoch) {
      if (shuffle) {
        Rng rng(derive_seed(config_.seed, "joint-shuffle",
                            stream * 1000 + static_cast<std::uint64_t>(epoch)));
        rng.shuffle(examples);
      }
      TrainContext ctx{epoch, &sampler_};
      const double loss = ranker_.train(examples, ctx);
      spdlog::debug("trained {} examples, epoch {}, loss {:.6f}", examples.size(), epoch, loss);
    }
  }

  void evaluate(std::size_t step) {
    for (std::size_t i = 0; i < targets_.size(); ++i) {
      EvalRecord rec = evaluate_queries(ranker_, *targets_[i].queries, *targets_[i].qrels, cache_);
      rec.task = i;
      rec.step = step;
      history_.record(rec);
    }
    checkpoint(step);
    flush();
  }

  void copy_step(std::size_t from, std::size_t to) {
    for (std::size_t i = 0; i < targets_.size(); ++i) {
      EvalRecord rec = history_.at(i, from);
      rec.step = to;
      history_.record(rec);
    }
    flush();
  }

  void checkpoint(std::size_t step) {
    if (!config_.out_dir) return;
    const auto dir = *config_.out_dir / "checkpoints";
    std::filesystem::create_directories(dir);
    std::ofstream out(dir / ("step-" + std::to_string(step) + ".tsv"), std::ios::binary);
    if (!ranker_.checkpoint(out)) {
      out.close();
      std::filesystem::remove(dir / ("step-" + std::to_string(step) + ".tsv"));
    }
  }

  void flush() {
    if (!config_.out_dir) return;
    std::ofstream out(*config_.out_dir / "history.csv", std::ios::binary);
    write_history_csv(history_, out);
  }

  RunHistory& history() { return history_; }

 private:
  Ranker& ranker_;
  const RunConfig& config_;
  const Corpus& corpus_;
  std::vector<Target> targets_;
  CandidateCache cache_;
  NegativeSampler sampler_;
  RunHistory history_;
};

template <typename F>
void with_context(Loop& loop, const std::string& context, F&& f) {
  try {
    f();
  } catch (const InputError& e) {
    loop.flush();
    throw InputError(context + ": " + e.what());
  } catch (const std::exception& e) {
    loop.flush();
    throw RuntimeFailure(context + ": " + e.what());
  }
}

RunHistory run_tasks(const std::vector<const Task*>& tasks, const Task* pretrain,
                     std::vector<Target> targets, Ranker& ranker, const RunConfig& config,
                     const Corpus& corpus, const InvertedIndex& index) {
  config.check();
  Loop loop(ranker, config, corpus, index, std::move(targets), tasks.size());
  if (pretrain && loop.training()) {
    with_context(loop, "pre-training on " + pretrain->id,
                 [&] { loop.train({pretrain}, false, 0); });
  }
  with_context(loop, "step 0 evaluation", [&] { loop.evaluate(0); });

  if (config.mode == RunMode::kJoint) {
    if (loop.training()) {
      with_context(loop, "joint training", [&] { loop.train(tasks, true, 1); });
    }
    if (!tasks.empty()) {
      with_context(loop, "joint evaluation", [&] { loop.evaluate(1); });
      for (std::size_t j = 2; j <= tasks.size(); ++j) loop.copy_step(1, j);
    }
    return loop.history();
  }

  for (std::size_t j = 1; j <= tasks.size(); ++j) {
    const std::string context = "step " + std::to_string(j) + " (task " + tasks[j - 1]->id + ")";
    with_context(loop, context, [&] {
      if (loop.training()) loop.train({tasks[j - 1]}, false, j);
      loop.evaluate(j);
    });
    spdlog::info("{} done", context);
  }
  return loop.history();
}

}  // namespace

std::string_view to_string(RunMode mode) {
  switch (mode) {
    case RunMode::kSequential:
      return "sequential";
    case RunMode::kJoint:
      return "joint";
    case RunMode::kFrozen:
      return "frozen";
  }
  return "unknown";
}

RunMode run_mode_from_string(std::string_view s) {
  if (s == "sequential") return RunMode::kSequential;
  if (s == "joint") return RunMode::kJoint;
  if (s == "frozen") return RunMode::kFrozen;
  throw InputError("unknown run mode '" + std::string(s) + "' (sequential|joint|frozen)");
}

void RunConfig::check() const {
  if (candidates_depth < 100) {
    throw InputError("candidate depth must be at least 100 (the MRR@100 cutoff)");
  }
  if (epochs_per_task < 1) throw InputError("epochs per task must be at least 1");
}

RunHistory run_sequence(const TopicSequence& seq, Ranker& ranker, const RunConfig& config,
                        const Corpus& corpus, const InvertedIndex& index) {
  std::vector<const Task*> tasks;
  for (const auto& t : seq.tasks) tasks.push_back(&t);
  std::vector<Target> targets;
  for (auto p : seq.tracked) {
    if (p == 0 || p > seq.tasks.size()) throw InputError("tracked position out of range");
    const Task& t = seq.tasks[p - 1];
    targets.push_back({t.id, &t.test, &t.qrels});
  }
  return run_tasks(tasks, nullptr, std::move(targets), ranker, config, corpus, index);
}

RunHistory run_scenario(const Scenario& scenario, Ranker& ranker, const RunConfig& config,
                        const Corpus& corpus, const InvertedIndex& index) {
  if (scenario.tasks.empty()) throw InputError("scenario " + scenario.id + " has no tasks");
  std::vector<const Task*> tasks;
  for (std::size_t i = 1; i < scenario.tasks.size(); ++i) tasks.push_back(&scenario.tasks[i]);
  std::vector<Target> targets;
  for (const auto& g : scenario.eval_groups) {
    if (g.queries.empty()) {
      spdlog::warn("{}: eval group {} is empty, skipped", scenario.id, g.name);
      continue;
    }
    targets.push_back({g.name, &g.queries, &g.qrels});
  }
  return run_tasks(tasks, &scenario.tasks.front(), std::move(targets), ranker, config, corpus,
                   index);
}

}  // namespace topicstream
