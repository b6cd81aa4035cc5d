#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "topicstream/corpus.hpp"
#include "topicstream/random.hpp"
#include "topicstream/retrieval.hpp"

namespace topicstream {

struct CandidateView {
  std::string_view doc_id;
  std::string_view text;
  double first_stage_score;
};

struct RescoreRequest {
  std::string_view query_id;
  std::string_view query;
  std::span<const CandidateView> candidates;
};

struct TrainingExample {
  std::string_view query_id;
  std::string_view query;
  std::string_view doc_id;
  std::string_view doc;
  // Every judged doc of the query within the current task.
  const Judgments* judged = nullptr;
};

// BM25 top-`depth` documents for a query, minus its judged documents,
// sampled with a stream that persists across tasks.
class NegativeSampler {
 public:
  NegativeSampler(const Corpus& corpus, const InvertedIndex& index, std::uint64_t seed,
                  std::size_t depth = 100, Bm25Params bm25 = {});

  std::vector<std::string_view> sample(std::string_view query_id, std::string_view query,
                                       const Judgments& judged, std::size_t count);

  const Corpus& corpus() const { return corpus_; }
  const InvertedIndex& index() const { return index_; }

 private:
  const Corpus& corpus_;
  const InvertedIndex& index_;
  Rng rng_;
  std::size_t depth_;
  Bm25Params bm25_;
  std::unordered_map<std::string, std::vector<std::string>> pool_cache_;
};

struct TrainContext {
  int epoch = 0;
  NegativeSampler* negatives = nullptr;
};

// What the run harness needs from a ranker. rescore must be deterministic
// for a given ranker state and return one score per candidate, in order.
class Ranker {
 public:
  virtual ~Ranker() = default;

  virtual std::string name() const = 0;
  virtual bool trainable() const = 0;
  // Whether rescore may be called concurrently.
  virtual bool concurrent_rescore() const { return true; }

  virtual double train(std::span<const TrainingExample> examples, TrainContext& ctx) = 0;
  virtual std::vector<double> rescore(const RescoreRequest& request) = 0;

  // Writes a state snapshot; returns false when the ranker has none.
  virtual bool checkpoint(std::ostream&) const { return false; }
};

// Identity re-ranker: returns the first-stage BM25 scores.
class Bm25Ranker final : public Ranker {
 public:
  std::string name() const override { return "bm25"; }
  bool trainable() const override { return false; }
  double train(std::span<const TrainingExample>, TrainContext&) override { return 0.0; }
  std::vector<double> rescore(const RescoreRequest& request) override;
};

struct TermWeightConfig {
  double margin = 1.0;
  double learning_rate = 0.1;
  std::size_t negatives_per_pair = 4;
};

// Linear lexical ranker: s(q, d) = sum over distinct terms shared by q and d
// of w_t * idf(t), with w_t = 1 for terms never updated. Trained by SGD on
// the pairwise hinge max(0, margin - s(q, d+) + s(q, d-)).
class TermWeightRanker final : public Ranker {
 public:
  TermWeightRanker(const InvertedIndex& index, TermWeightConfig config = {});

  std::string name() const override { return "termweight"; }
  bool trainable() const override { return true; }

  // One pass over `examples` in order. Returns the mean hinge loss observed
  // before each update.
  double train(std::span<const TrainingExample> examples, TrainContext& ctx) override;
  std::vector<double> rescore(const RescoreRequest& request) override;
  bool checkpoint(std::ostream& out) const override;

  double score(std::string_view query, std::string_view doc) const;
  // Hinge update for one (positive, negative) pair; returns the loss
  // before the update.
  double update(std::string_view query, std::string_view positive, std::string_view negative);

  double weight(const std::string& term) const;
  const std::map<std::string, double>& weights() const { return weights_; }
  const TermWeightConfig& config() const { return config_; }

 private:
  std::vector<std::string> shared_terms(std::string_view query, std::string_view doc) const;

  const InvertedIndex& index_;
  TermWeightConfig config_;
  std::map<std::string, double> weights_;
};

}  // namespace topicstream
