#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <map>
#include <vector>

#include "topicstream/clustering.hpp"
#include "topicstream/corpus.hpp"
#include "topicstream/retrieval.hpp"
#include "topicstream/streams.hpp"
#include "topicstream/synthetic.hpp"

namespace testing {

class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "topicstream-XXXXXX").string();
    if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Small passage collection shared by the retrieval and metrics tests.
inline topicstream::Corpus toy_corpus() {
  topicstream::Corpus c;
  c.docs.add("d1", "water shortage in the desert");
  c.docs.add("d2", "the largest freshwater source is a lake");
  c.docs.add("d3", "desert plants store water");
  c.docs.add("d4", "lake baikal holds freshwater");
  c.docs.add("d5", "shortage of housing in cities");
  c.queries.add("q1", "water shortage");
  c.queries.add("q2", "largest freshwater lake");
  c.qrels.add("q1", "d1", 1);
  c.qrels.add("q2", "d4", 1);
  return c;
}

struct SyntheticStream {
  topicstream::SyntheticCorpus synth;
  topicstream::TopicSequence seq;
};

// Planted corpus clustered with the default thresholds and split into tasks.
inline SyntheticStream synthetic_stream(const topicstream::SyntheticConfig& config,
                                        const topicstream::SplitSizes& sizes = {},
                                        std::uint64_t seed = 13) {
  SyntheticStream out{topicstream::make_synthetic_corpus(config), {}};
  topicstream::ClusterParams params;
  params.min_size = 5;
  params.seed = seed;
  const auto ids = topicstream::judged_queries(out.synth.corpus);
  const auto clusters = topicstream::cluster_queries(ids, out.synth.query_vectors, params);
  out.seq = topicstream::build_topic_sequence(clusters, out.synth.corpus, seed, sizes);
  return out;
}

// 20 passages over a 12-word vocabulary with uneven lengths, drawn from a
// fixed LCG so the fixture never depends on library code.
inline topicstream::DocStore twenty_doc_fixture() {
  static const char* vocab[] = {"river", "lake",  "water", "desert", "sand",  "city",
                                "road",  "music", "piano", "violin", "storm", "rain"};
  std::uint64_t state = 12345;
  auto next = [&state] {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return static_cast<std::uint32_t>(state >> 33);
  };
  topicstream::DocStore docs;
  for (int i = 0; i < 20; ++i) {
    const std::size_t len = 2 + next() % 14;
    std::string text;
    for (std::size_t k = 0; k < len; ++k) {
      if (!text.empty()) text += ' ';
      text += vocab[next() % 12];
    }
    if (i % 5 == 0) text += " the of and";
    docs.add("doc" + std::to_string(100 + i), text);
  }
  return docs;
}

// Direct evaluation of the BM25 formula from raw token lists.
inline std::map<std::string, double> oracle_bm25(const topicstream::DocStore& docs,
                                                 const std::vector<std::string>& query,
                                                 double k1, double b) {
  std::map<std::string, std::vector<std::string>> toks;
  double total = 0;
  for (const auto& [id, text] : docs.entries()) {
    toks[id] = topicstream::tokenize(text);
    total += static_cast<double>(toks[id].size());
  }
  const double n = static_cast<double>(toks.size());
  const double avg = total / n;
  std::map<std::string, double> out;
  for (const auto& [id, t] : toks) {
    double score = 0;
    for (const auto& term : query) {
      double df = 0;
      for (const auto& [other, ot] : toks) {
        for (const auto& w : ot) {
          if (w == term) {
            df += 1;
            break;
          }
        }
      }
      double tf = 0;
      for (const auto& w : t) tf += (w == term);
      if (tf == 0) continue;
      const double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
      score += idf * tf * (k1 + 1) /
               (tf + k1 * (1 - b + b * static_cast<double>(t.size()) / avg));
    }
    out[id] = score;
  }
  return out;
}

}  // namespace testing
