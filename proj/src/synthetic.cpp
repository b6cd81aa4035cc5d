#include "topicstream/synthetic.hpp"

#include <filesystem>

#include "topicstream/random.hpp"

namespace topicstream {
namespace {

std::string word(std::size_t topic, std::size_t k) {
  return "t" + std::to_string(topic) + "w" + std::to_string(k);
}

std::vector<double> planted(Rng& rng, std::size_t dim, std::size_t topic, std::size_t sub,
                            const SyntheticConfig& c) {
  std::vector<double> v(dim, 0.0);
  v[topic] = 1.0;
  v[c.topics + 2 * topic + sub] = c.subtopic_weight;
  for (double& x : v) x += c.noise * rng.normal();
  return v;
}

}  // namespace

SyntheticCorpus make_synthetic_corpus(const SyntheticConfig& c) {
  const std::size_t dim = 3 * c.topics;
  SyntheticCorpus out{{}, EmbeddingTable(dim), EmbeddingTable(dim), {}};
  Rng rng(derive_seed(c.seed, "synthetic"));
  for (std::size_t t = 0; t < c.topics; ++t) {
    const int polarity = t < c.polarity.size() ? c.polarity[t] : 0;
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < c.queries_per_topic; ++i) {
      const std::string tag = std::to_string(t) + "_" + std::to_string(i);
      const std::string qid = "q" + tag;
      const std::string rel = "d" + tag + "r";
      const std::size_t w1 = rng.below(c.vocab_per_topic);
      std::size_t w2 = rng.below(c.vocab_per_topic - 1);
      if (w2 >= w1) ++w2;

      std::string query = word(t, w1) + " " + word(t, w2);
      if (polarity != 0) query += " common";
      std::string rel_text = word(t, w1) + " " + word(t, w2);
      for (std::size_t f = 0; f < c.filler_words; ++f) {
        rel_text += " " + word(t, rng.below(c.vocab_per_topic));
      }
      if (polarity > 0) rel_text += " common";
      out.corpus.queries.add(qid, query);
      out.corpus.docs.add(rel, rel_text);
      out.corpus.qrels.add(qid, rel, 1);
      const std::size_t sub = i % 2;
      out.query_vectors.add(qid, planted(rng, dim, t, sub, c));
      out.doc_vectors.add(rel, planted(rng, dim, t, sub, c));

      for (std::size_t k = 0; k < c.distractors; ++k) {
        const std::string dis = "d" + tag + "n" + std::to_string(k);
        std::string text = polarity != 0 ? word(t, w1) + " " + word(t, w2) : word(t, w2);
        for (std::size_t f = 0; f < c.filler_words; ++f) {
          text += " " + word(t, rng.below(c.vocab_per_topic));
        }
        if (polarity < 0) text += " common";
        out.corpus.docs.add(dis, text);
        out.doc_vectors.add(dis, planted(rng, dim, t, 1 - sub, c));
      }
      ids.push_back(qid);
    }
    out.topic_queries.push_back(std::move(ids));
  }
  return out;
}

void write_synthetic_corpus(const SyntheticCorpus& synth, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto paths = CorpusPaths::in_directory(dir);
  write_text_store(synth.corpus.queries, paths.queries);
  write_text_store(synth.corpus.docs, paths.docs);
  write_qrels(synth.corpus.qrels, paths.qrels);
  write_vectors(synth.query_vectors, paths.query_vectors);
  write_vectors(synth.doc_vectors, paths.doc_vectors);
}

}  // namespace topicstream
