#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "topicstream/corpus.hpp"
#include "topicstream/ranker.hpp"
#include "topicstream/retrieval.hpp"
#include "topicstream/streams.hpp"

namespace topicstream {

// Reciprocal rank of the first judged document within the top K, else 0.
double mrr_at_k(const Ranking& ranking, const Judgments& relevant, std::size_t k);

struct EvalRecord {
  std::size_t task = 0;  // index into RunHistory::labels()
  std::size_t step = 0;
  double mrr10 = 0.0;
  double mrr100 = 0.0;

  bool operator==(const EvalRecord&) const = default;
};

// BM25 first-stage results per query, computed once and shared across
// evaluation steps.
class CandidateCache {
 public:
  CandidateCache(const Corpus& corpus, const InvertedIndex& index, std::size_t depth,
                 Bm25Params bm25 = {});

  // Computes missing entries in parallel.
  void prefetch(std::span<const std::string> query_ids);
  // prefetch() must have covered `query_id`.
  const Ranking& get(const std::string& query_id) const;

  const Corpus& corpus() const { return corpus_; }
  std::size_t depth() const { return depth_; }

 private:
  const Corpus& corpus_;
  const InvertedIndex& index_;
  std::size_t depth_;
  Bm25Params bm25_;
  std::map<std::string, Ranking> rankings_;
};

// Re-ranks each query's BM25 candidates with `ranker` and averages MRR@10 and
// MRR@100 over `queries`. Candidates tied on the ranker score keep BM25
// order. Throws InputError for an empty query list.
EvalRecord evaluate_queries(Ranker& ranker, std::span<const std::string> queries,
                            const QrelSet& qrels, CandidateCache& cache);
// Evaluates the task's test split.
EvalRecord evaluate_task(Ranker& ranker, const Task& task, CandidateCache& cache);

enum class Metric { kMrr10, kMrr100 };

Metric metric_from_string(const std::string& s);

// Evaluation results for tracked targets at steps 0..n (step 0 precedes any
// sequence training).
class RunHistory {
 public:
  RunHistory() = default;
  RunHistory(std::vector<std::string> labels, std::size_t sequence_length);

  void record(const EvalRecord& r);
  // Throws InputError when the cell is missing.
  const EvalRecord& at(std::size_t task, std::size_t step) const;
  bool has(std::size_t task, std::size_t step) const;
  bool complete() const;

  double score(std::size_t task, std::size_t step, Metric metric) const;
  // Step with the best score; ties resolve to the earliest step.
  std::size_t best_step(std::size_t task, Metric metric) const;

  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t label_index(const std::string& label) const;
  std::size_t sequence_length() const { return sequence_length_; }
  std::size_t steps() const { return sequence_length_ + 1; }

  bool operator==(const RunHistory&) const = default;

 private:
  std::vector<std::string> labels_;
  std::size_t sequence_length_ = 0;
  std::map<std::pair<std::size_t, std::size_t>, EvalRecord> records_;
};

// max over recorded steps of score(task, k) minus score(task, step).
double mf_score(const RunHistory& history, std::size_t task, std::size_t step,
                Metric metric = Metric::kMrr10);

// `task,step,mrr10,mrr100` rows ordered by task then step.
void write_history_csv(const RunHistory& history, std::ostream& out);
RunHistory read_history_csv(const std::filesystem::path& path);

struct CScoreParams {
  std::size_t pool_size = 250;
  std::size_t depth = 1000;
  Bm25Params bm25;
  std::uint64_t seed = 13;
};

// Two disjoint pools of min(pool_size, floor(n / 2)) queries drawn from all
// of the task's queries with a sub-seed keyed by task id.
struct QueryPools {
  std::vector<std::string> a;
  std::vector<std::string> b;
};
QueryPools sample_pools(const Task& task, const CScoreParams& params);

// Sorted union of the documents retrieved at `depth` for each query.
std::vector<std::string> retrieved_docs(std::span<const std::string> queries,
                                        const QueryStore& store, const InvertedIndex& index,
                                        std::size_t depth, const Bm25Params& bm25 = {});

// |A ∩ B| / |A| over sorted unique doc sets. Throws InputError for empty A.
double c_score_sets(std::span<const std::string> docs_a, std::span<const std::string> docs_b);

// Shared-retrieval ratio between pool A of task_i and pool B of task_j.
double c_score(const Task& task_i, const Task& task_j, const QueryStore& store,
               const InvertedIndex& index, const CScoreParams& params = {});

struct SimilarityMatrix {
  std::vector<std::string> ids;
  std::vector<std::vector<double>> values;  // values[i][j] = c_score(i, j)
  std::size_t pool_size = 0;
  std::size_t depth = 0;

  std::size_t size() const { return ids.size(); }
  double intra_mean() const;
  double inter_mean() const;
  std::size_t index_of(const std::string& id) const;
};

SimilarityMatrix similarity_matrix(std::span<const Task> tasks, const QueryStore& store,
                                   const InvertedIndex& index,
                                   const CScoreParams& params = {});

// Header row and column of task ids; raw ratios.
void write_matrix_csv(const SimilarityMatrix& m, std::ostream& out);
SimilarityMatrix read_matrix_csv(const std::filesystem::path& path);

struct QuartileRow {
  std::string tracked_task;  // label, or "pooled"
  int quartile = 0;          // 1..4
  double mean_similarity = 0.0;
  double mean_mf = 0.0;
  std::size_t count = 0;
};

// 25/50/75th percentiles with linear interpolation between order statistics.
std::array<double, 3> quartile_edges(std::vector<double> values);
// 0..3; a value equal to an edge falls in the lower bucket.
int quartile_of(double value, const std::array<double, 3>& edges);

// For each tracked task i and every sequence step j whose task is not i,
// pairs (c_score(i, task_j), mf(i, j)) bucketed into similarity quartiles.
// Rows per tracked task plus a pooled block over all pairs. The matrix must
// list the sequence's tasks in training order. Throws InputError on shape
// mismatch or when a tracked task has fewer than 4 pairs.
std::vector<QuartileRow> quartile_forgetting(const RunHistory& history,
                                             const SimilarityMatrix& matrix,
                                             Metric metric = Metric::kMrr10);

// `tracked_task,quartile,mean_similarity,mean_mf`.
void write_quartile_csv(std::span<const QuartileRow> rows, std::ostream& out);

std::string format_fixed(double value, int decimals = 6);

}  // namespace topicstream
