#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "topicstream/corpus.hpp"

namespace topicstream {

// Lowercases ASCII, splits on every byte that is not an ASCII letter or
// digit (bytes >= 0x80 are kept inside tokens so UTF-8 words survive), and
// drops the built-in stopwords. No stemming.
std::vector<std::string> tokenize(std::string_view text);

// The 33 built-in stopwords, sorted.
std::span<const std::string_view> stopwords();

struct Bm25Params {
  double k1 = 0.9;
  double b = 0.4;
};

struct Posting {
  std::uint32_t doc;  // position in InvertedIndex::doc_ids()
  std::uint32_t tf;
};

// Memory-resident index. Documents are numbered in ascending doc-id order,
// so postings sorted by number are sorted by doc id.
class InvertedIndex {
 public:
  static InvertedIndex build(const DocStore& docs);

  std::size_t doc_count() const { return doc_ids_.size(); }
  double avg_doc_len() const { return avg_doc_len_; }
  const std::vector<std::string>& doc_ids() const { return doc_ids_; }
  std::uint32_t doc_length(std::size_t doc) const { return doc_lengths_[doc]; }
  // Throws InputError for an unknown id.
  std::size_t doc_number(const std::string& doc_id) const;

  // Empty span for unseen terms.
  std::span<const Posting> postings(const std::string& term) const;
  std::size_t doc_freq(const std::string& term) const { return postings(term).size(); }
  std::size_t term_count() const { return postings_.size(); }

  // ln(1 + (N - df + 0.5) / (df + 0.5)).
  double idf(const std::string& term) const;

 private:
  std::vector<std::string> doc_ids_;
  std::unordered_map<std::string, std::size_t> doc_numbers_;
  std::vector<std::uint32_t> doc_lengths_;
  double avg_doc_len_ = 0.0;
  std::unordered_map<std::string, std::vector<Posting>> postings_;
};

// One query term's contribution, shared by bm25_score and search so both
// follow the same floating-point path.
double bm25_term_weight(double idf, std::uint32_t tf, std::uint32_t doc_len,
                        double avg_doc_len, const Bm25Params& params);

// Sum over query terms (repeats count) of idf * tf * (k1 + 1) /
// (tf + k1 * (1 - b + b * len / avglen)). Throws InputError for unknown ids.
double bm25_score(std::span<const std::string> query_terms,
                  const std::string& doc_id, const InvertedIndex& index,
                  const Bm25Params& params = {});

struct ScoredDoc {
  std::string doc_id;
  double score;

  bool operator==(const ScoredDoc&) const = default;
};

struct Ranking {
  std::string query_id;
  // Descending score, ties by ascending doc id.
  std::vector<ScoredDoc> entries;

  bool operator==(const Ranking&) const = default;
};

// Top-k documents containing at least one query term.
Ranking search(const InvertedIndex& index, std::string_view query, std::size_t k,
               const Bm25Params& params = {}, std::string query_id = {});
Ranking search_terms(const InvertedIndex& index,
                     std::span<const std::string> query_terms, std::size_t k,
                     const Bm25Params& params = {}, std::string query_id = {});

// TREC run rows `qid Q0 docid rank score tag`, rank from 1, 6-decimal score.
void write_run(std::span<const Ranking> rankings, std::string_view tag,
               std::ostream& out);

}  // namespace topicstream
