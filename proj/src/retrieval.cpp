#include "topicstream/retrieval.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

#include "topicstream/error.hpp"

namespace topicstream {
namespace {

// Lucene's classic English stop set with "such" swapped for "what", which is
// by far the most frequent question word in web query logs.
constexpr std::array<std::string_view, 33> kStopwords = {
    "a",     "an",   "and",   "are",  "as",   "at",   "be",    "but",  "by",
    "for",   "if",   "in",    "into", "is",   "it",   "no",    "not",  "of",
    "on",    "or",   "that",  "the",  "their", "then", "there", "these", "they",
    "this",  "to",   "was",   "what", "will", "with"};

static_assert(std::is_sorted(kStopwords.begin(), kStopwords.end()));

bool is_stopword(std::string_view token) {
  return std::binary_search(kStopwords.begin(), kStopwords.end(), token);
}

bool is_token_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c >= 0x80;
}

}  // namespace

std::span<const std::string_view> stopwords() { return kStopwords; }

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty() && !is_stopword(current)) tokens.push_back(current);
    current.clear();
  };
  for (unsigned char c : text) {
    if (is_token_byte(c)) {
      current.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a')
                                             : static_cast<char>(c));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

InvertedIndex InvertedIndex::build(const DocStore& docs) {
  if (docs.empty()) throw InputError("cannot index an empty document store");
  InvertedIndex idx;
  idx.doc_ids_.reserve(docs.size());
  idx.doc_lengths_.reserve(docs.size());
  std::uint64_t total = 0;
  std::map<std::string, std::uint32_t> tf;
  for (const auto& [id, text] : docs.entries()) {
    const auto doc = static_cast<std::uint32_t>(idx.doc_ids_.size());
    idx.doc_numbers_.emplace(id, doc);
    idx.doc_ids_.push_back(id);
    tf.clear();
    auto tokens = tokenize(text);
    for (auto& t : tokens) ++tf[t];
    idx.doc_lengths_.push_back(static_cast<std::uint32_t>(tokens.size()));
    total += tokens.size();
    for (const auto& [term, count] : tf) idx.postings_[term].push_back({doc, count});
  }
  idx.avg_doc_len_ = static_cast<double>(total) / static_cast<double>(docs.size());
  return idx;
}

std::size_t InvertedIndex::doc_number(const std::string& doc_id) const {
  auto it = doc_numbers_.find(doc_id);
  if (it == doc_numbers_.end()) throw InputError("unknown document id " + doc_id);
  return it->second;
}

std::span<const Posting> InvertedIndex::postings(const std::string& term) const {
  auto it = postings_.find(term);
  if (it == postings_.end()) return {};
  return it->second;
}

double InvertedIndex::idf(const std::string& term) const {
  const double n = static_cast<double>(doc_count());
  const double df = static_cast<double>(doc_freq(term));
  return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
}

double bm25_term_weight(double idf, std::uint32_t tf, std::uint32_t doc_len,
                        double avg_doc_len, const Bm25Params& params) {
  const double ratio = avg_doc_len > 0.0 ? doc_len / avg_doc_len : 0.0;
  const double norm = params.k1 * (1.0 - params.b + params.b * ratio);
  return idf * (tf * (params.k1 + 1.0)) / (tf + norm);
}

double bm25_score(std::span<const std::string> query_terms,
                  const std::string& doc_id, const InvertedIndex& index,
                  const Bm25Params& params) {
  const auto doc = static_cast<std::uint32_t>(index.doc_number(doc_id));
  double score = 0.0;
  for (const auto& term : query_terms) {
    auto plist = index.postings(term);
    auto it = std::lower_bound(plist.begin(), plist.end(), doc,
                               [](const Posting& p, std::uint32_t d) { return p.doc < d; });
    if (it == plist.end() || it->doc != doc) continue;
    score += bm25_term_weight(index.idf(term), it->tf, index.doc_length(doc),
                              index.avg_doc_len(), params);
  }
  return score;
}

Ranking search_terms(const InvertedIndex& index,
                     std::span<const std::string> query_terms, std::size_t k,
                     const Bm25Params& params, std::string query_id) {
  Ranking ranking{std::move(query_id), {}};
  if (k == 0) return ranking;
  // Term-at-a-time accumulation in query-term order, matching bm25_score.
  std::unordered_map<std::uint32_t, double> acc;
  for (const auto& term : query_terms) {
    auto plist = index.postings(term);
    if (plist.empty()) continue;
    const double idf = index.idf(term);
    for (const auto& p : plist) {
      acc[p.doc] += bm25_term_weight(idf, p.tf, index.doc_length(p.doc),
                                     index.avg_doc_len(), params);
    }
  }
  std::vector<std::pair<std::uint32_t, double>> hits(acc.begin(), acc.end());
  // Doc numbers follow doc-id order, so comparing numbers breaks ties by id.
  auto better = [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  };
  const std::size_t keep = std::min(k, hits.size());
  std::partial_sort(hits.begin(), hits.begin() + keep, hits.end(), better);
  ranking.entries.reserve(keep);
  for (std::size_t r = 0; r < keep; ++r) {
    ranking.entries.push_back({index.doc_ids()[hits[r].first], hits[r].second});
  }
  return ranking;
}

Ranking search(const InvertedIndex& index, std::string_view query, std::size_t k,
               const Bm25Params& params, std::string query_id) {
  return search_terms(index, tokenize(query), k, params, std::move(query_id));
}

void write_run(std::span<const Ranking> rankings, std::string_view tag,
               std::ostream& out) {
  char score[64];
  for (const auto& r : rankings) {
    for (std::size_t i = 0; i < r.entries.size(); ++i) {
      std::snprintf(score, sizeof score, "%.6f", r.entries[i].score);
      out << r.query_id << " Q0 " << r.entries[i].doc_id << ' ' << i + 1 << ' '
          << score << ' ' << tag << '\n';
    }
  }
}

}  // namespace topicstream
