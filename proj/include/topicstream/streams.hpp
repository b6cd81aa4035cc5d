#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "topicstream/clustering.hpp"
#include "topicstream/corpus.hpp"
#include "topicstream/embeddings.hpp"

namespace topicstream {

enum class Provenance {
  kTopic,
  kRandom,
  kInit,
  kDtPlus,
  kDtMinus,
  kDtForeign,
  kIuPrime,
  kIuSecond,
  kLdStar,
  kLdStarStar,
};

std::string_view to_string(Provenance p);
Provenance provenance_from_string(std::string_view s);

struct TrainingPair {
  std::string query_id;
  std::string doc_id;
};

struct Task {
  std::string id;
  Provenance provenance = Provenance::kTopic;
  std::vector<int> source_clusters;
  std::vector<std::string> source_tasks;
  // Sorted, pairwise disjoint.
  std::vector<std::string> train;
  std::vector<std::string> val;
  std::vector<std::string> test;
  // Judgments for exactly the task's queries. May differ from the corpus
  // qrels for scenario tasks built from mapped pairs.
  QrelSet qrels;

  std::vector<std::string> all_queries() const;
  std::size_t size() const { return train.size() + val.size() + test.size(); }
  // (query, doc) for every judged doc of every train query, in id order.
  std::vector<TrainingPair> training_pairs() const;

  bool operator==(const Task&) const = default;
};

struct TopicSequence {
  std::string kind = "topics";  // "topics" or "random"
  std::vector<Task> tasks;
  // 1-based task positions, ascending.
  std::vector<std::size_t> tracked;
  std::uint64_t seed = 0;

  // Throws InputError when the id is unknown.
  std::size_t position_of(const std::string& task_id) const;

  bool operator==(const TopicSequence&) const = default;
};

struct SplitSizes {
  std::size_t val = 40;
  std::size_t test = 40;
  std::size_t tracked = 5;
};

// Queries present in the query store and holding at least one judgment.
std::vector<std::string> judged_queries(const Corpus& corpus);

// One task per surviving cluster. Val and test each take
// min(40, floor(n / 3)) queries of the cluster's n judged members; the rest
// train. Clusters with fewer than val + test + 1 judged members are dropped
// with a warning. Task order is a seeded shuffle of the cluster order.
// Throws InputError when fewer than 2 clusters survive.
TopicSequence build_topic_sequence(std::span<const TopicCluster> clusters,
                                   const Corpus& corpus, std::uint64_t seed,
                                   const SplitSizes& sizes = {});

// Same task count and per-split sizes as `reference`, filled from a uniform
// shuffle of all the reference's queries. Tracked positions are kept.
TopicSequence build_random_sequence(const TopicSequence& reference,
                                    const Corpus& corpus, std::uint64_t seed);

// Union of k randomly chosen tasks not listed in `excluded`.
Task build_init_task(const TopicSequence& seq, std::size_t k,
                     std::span<const std::string> excluded, std::uint64_t seed);

enum class ScenarioKind { kDirectTransfer, kInformationUpdate, kLanguageDrift };

std::string_view to_string(ScenarioKind kind);
ScenarioKind scenario_kind_from_string(std::string_view s);

struct EvalGroup {
  std::string name;
  std::vector<std::string> queries;
  QrelSet qrels;

  bool operator==(const EvalGroup&) const = default;
};

// How a topic was split for the Information Update / Language Drift
// constructions, always in forward orientation: side 1 is the initial
// distribution, side 2 the final one. `d1`/`d2` hold documents, `q1`/`q2`
// queries; `mapping` sends each moved item (a document for IU, a query for
// LD) to its nearest neighbour on the other side.
struct ScenarioRoles {
  std::vector<std::string> q1, q2, d1, d2;
  std::vector<std::string> q1_train, q2_train, q1_eval, q2_eval;
  std::map<std::string, std::string> single_doc;  // query -> sampled relevant doc
  std::map<std::string, std::string> mapping;
  std::size_t collisions = 0;

  bool operator==(const ScenarioRoles&) const = default;
};

struct Scenario {
  std::string id;
  ScenarioKind kind = ScenarioKind::kDirectTransfer;
  bool reversed = false;
  std::string topic;    // source task id of the scenario topic
  std::string foreign;  // direct transfer only
  std::vector<Task> tasks;  // tasks[0] is the init task
  std::vector<EvalGroup> eval_groups;
  ScenarioRoles roles;
  std::uint64_t seed = 0;

  bool operator==(const Scenario&) const = default;
};

struct ScenarioParams {
  std::size_t init_tasks = 5;
  std::size_t topics = 3;
  double plus_fraction = 0.75;
  double min_frac = 0.25;
  int max_iter = 100;
  std::size_t eval_cap = 20;
  std::size_t min_items = 8;
};

// Three draws of (init, topic+, foreign, topic-).
std::vector<Scenario> build_direct_transfer(const TopicSequence& seq,
                                            std::uint64_t seed,
                                            const ScenarioParams& params = {});
// Forward and reversed scenario per selected topic.
std::vector<Scenario> build_information_update(const TopicSequence& seq,
                                               const EmbeddingTable& doc_vectors,
                                               std::uint64_t seed,
                                               const ScenarioParams& params = {});
std::vector<Scenario> build_language_drift(const TopicSequence& seq,
                                           const EmbeddingTable& query_vectors,
                                           std::uint64_t seed,
                                           const ScenarioParams& params = {});

// Layout: sequence.json plus tasks/<task-id>/<split>/{queries.tsv,qrels.txt}.
void write_sequence(const TopicSequence& seq, const QueryStore& queries,
                    const std::filesystem::path& dir);
TopicSequence read_sequence(const std::filesystem::path& dir);

// Layout: scenario.json, tasks/<task-id>/..., eval/<group>/....
void write_scenario(const Scenario& scenario, const QueryStore& queries,
                    const std::filesystem::path& dir);
Scenario read_scenario(const std::filesystem::path& dir);

void write_task(const Task& task, const QueryStore& queries,
                const std::filesystem::path& tasks_dir);
// Reads the splits of `task_id`; provenance and sources are left default.
Task read_task(const std::filesystem::path& tasks_dir, const std::string& task_id);

}  // namespace topicstream
