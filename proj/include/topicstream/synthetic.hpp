#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "topicstream/corpus.hpp"
#include "topicstream/embeddings.hpp"

namespace topicstream {

// Planted-topic corpus for tests, demos and the acceptance suite.
//
// Topic t owns a private vocabulary (`t<t>w<k>`); vocabularies never overlap.
// Each query draws two topic words w1, w2 and is judged against one
// relevant document holding both. Each of its distractor documents holds
// w2, plus w1 when the topic has a nonzero polarity. Polarity attaches the shared word
// `common` to the topic's queries and to either its relevant documents (+1)
// or its distractors (-1), so the weight of that one word decides which of
// the two ranks first. Polarity 0 leaves the topic fully disjoint.
// Query and document vectors sit near an orthogonal per-topic direction,
// split into two sub-directions by query parity.
struct SyntheticConfig {
  std::size_t topics = 3;
  std::size_t queries_per_topic = 120;
  std::size_t vocab_per_topic = 400;
  std::size_t filler_words = 8;
  std::size_t distractors = 4;  // per query
  std::vector<int> polarity;  // per topic; missing entries mean 0
  double noise = 0.05;
  double subtopic_weight = 0.5;
  std::uint64_t seed = 13;
};

struct SyntheticCorpus {
  Corpus corpus;
  EmbeddingTable query_vectors{1};
  EmbeddingTable doc_vectors{1};
  std::vector<std::vector<std::string>> topic_queries;
};

SyntheticCorpus make_synthetic_corpus(const SyntheticConfig& config);

// Writes the standard corpus directory layout (see CorpusPaths).
void write_synthetic_corpus(const SyntheticCorpus& synth, const std::filesystem::path& dir);

}  // namespace topicstream
