#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "topicstream/corpus.hpp"
#include "topicstream/metrics.hpp"
#include "topicstream/ranker.hpp"
#include "topicstream/retrieval.hpp"
#include "topicstream/streams.hpp"

namespace topicstream {

enum class RunMode { kSequential, kJoint, kFrozen };

std::string_view to_string(RunMode mode);
RunMode run_mode_from_string(std::string_view s);

struct RunConfig {
  std::uint64_t seed = 13;
  std::size_t candidates_depth = 1000;
  int epochs_per_task = 1;
  RunMode mode = RunMode::kSequential;
  Bm25Params bm25;
  std::size_t negatives_depth = 100;
  // When set, history.csv is rewritten after every step and ranker
  // checkpoints go to checkpoints/step-<j>.tsv.
  std::optional<std::filesystem::path> out_dir;

  // Throws InputError unless depth >= 100 (the largest MRR cutoff) and
  // epochs_per_task >= 1.
  void check() const;
};

// Continual loop over a topic sequence: evaluate the tracked tasks' test
// splits at step 0, then for each task j train (per mode) and evaluate again
// at step j. Ranker state, including negative sampling, carries across tasks.
RunHistory run_sequence(const TopicSequence& seq, Ranker& ranker, const RunConfig& config,
                        const Corpus& corpus, const InvertedIndex& index);

// Same loop over a scenario. tasks[0] (the init task) is trained before the
// step-0 evaluation unless the ranker is frozen; eval groups are the tracked
// targets.
RunHistory run_scenario(const Scenario& scenario, Ranker& ranker, const RunConfig& config,
                        const Corpus& corpus, const InvertedIndex& index);

}  // namespace topicstream
