#include "topicstream/ranker.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

namespace topicstream {

NegativeSampler::NegativeSampler(const Corpus& corpus, const InvertedIndex& index,
                                 std::uint64_t seed, std::size_t depth, Bm25Params bm25)
    : corpus_(corpus), index_(index), rng_(derive_seed(seed, "negatives")), depth_(depth),
      bm25_(bm25) {}

std::vector<std::string_view> NegativeSampler::sample(std::string_view query_id,
                                                      std::string_view query,
                                                      const Judgments& judged,
                                                      std::size_t count) {
  auto [it, inserted] = pool_cache_.try_emplace(std::string(query_id));
  if (inserted) {
    for (auto& e : search(index_, query, depth_, bm25_).entries) {
      it->second.push_back(std::move(e.doc_id));
    }
  }
  std::vector<const std::string*> pool;
  for (const auto& d : it->second) {
    if (!judged.count(d)) pool.push_back(&d);
  }
  std::vector<std::string_view> out;
  for (auto i : rng_.sample_indices(pool.size(), count)) out.push_back(*pool[i]);
  return out;
}

std::vector<double> Bm25Ranker::rescore(const RescoreRequest& request) {
  std::vector<double> scores;
  scores.reserve(request.candidates.size());
  for (const auto& c : request.candidates) scores.push_back(c.first_stage_score);
  return scores;
}

TermWeightRanker::TermWeightRanker(const InvertedIndex& index, TermWeightConfig config)
    : index_(index), config_(config) {}

double TermWeightRanker::weight(const std::string& term) const {
  auto it = weights_.find(term);
  return it == weights_.end() ? 1.0 : it->second;
}

std::vector<std::string> TermWeightRanker::shared_terms(std::string_view query,
                                                        std::string_view doc) const {
  auto q = tokenize(query);
  auto d = tokenize(doc);
  std::sort(q.begin(), q.end());
  q.erase(std::unique(q.begin(), q.end()), q.end());
  std::sort(d.begin(), d.end());
  d.erase(std::unique(d.begin(), d.end()), d.end());
  std::vector<std::string> shared;
  std::set_intersection(q.begin(), q.end(), d.begin(), d.end(), std::back_inserter(shared));
  return shared;
}

double TermWeightRanker::score(std::string_view query, std::string_view doc) const {
  double s = 0.0;
  for (const auto& t : shared_terms(query, doc)) s += weight(t) * index_.idf(t);
  return s;
}

double TermWeightRanker::update(std::string_view query, std::string_view positive,
                                std::string_view negative) {
  const auto pos_terms = shared_terms(query, positive);
  const auto neg_terms = shared_terms(query, negative);
  double pos = 0.0, neg = 0.0;
  for (const auto& t : pos_terms) pos += weight(t) * index_.idf(t);
  for (const auto& t : neg_terms) neg += weight(t) * index_.idf(t);
  const double loss = std::max(0.0, config_.margin - pos + neg);
  if (loss <= 0.0) return 0.0;
  // d loss / d w_t = -idf(t) for positive-side terms, +idf(t) for negative-side.
  for (const auto& t : pos_terms) {
    weights_.try_emplace(t, 1.0).first->second += config_.learning_rate * index_.idf(t);
  }
  for (const auto& t : neg_terms) {
    weights_.try_emplace(t, 1.0).first->second -= config_.learning_rate * index_.idf(t);
  }
  return loss;
}

double TermWeightRanker::train(std::span<const TrainingExample> examples, TrainContext& ctx) {
  static const Judgments kNone;
  double total = 0.0;
  std::size_t updates = 0;
  for (const auto& ex : examples) {
    if (!ctx.negatives) break;
    const Judgments& judged = ex.judged ? *ex.judged : kNone;
    for (auto neg : ctx.negatives->sample(ex.query_id, ex.query, judged,
                                          config_.negatives_per_pair)) {
      const auto& neg_text = ctx.negatives->corpus().docs.text(std::string(neg));
      total += update(ex.query, ex.doc, neg_text);
      ++updates;
    }
  }
  return updates ? total / static_cast<double>(updates) : 0.0;
}

std::vector<double> TermWeightRanker::rescore(const RescoreRequest& request) {
  std::vector<double> scores;
  scores.reserve(request.candidates.size());
  for (const auto& c : request.candidates) scores.push_back(score(request.query, c.text));
  return scores;
}

bool TermWeightRanker::checkpoint(std::ostream& out) const {
  char buf[64];
  for (const auto& [term, w] : weights_) {
    std::snprintf(buf, sizeof buf, "%.17g", w);
    out << term << '\t' << buf << '\n';
  }
  return true;
}

}  // namespace topicstream
