#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace topicstream {

// Immutable id -> text store for queries or passages. Ordered by id so that
// iteration (and everything derived from it) is deterministic.
class TextStore {
 public:
  TextStore() = default;

  // Throws InputError on duplicate ids or empty text.
  void add(std::string id, std::string text);

  bool contains(const std::string& id) const { return entries_.count(id) != 0; }
  // Throws InputError when missing.
  const std::string& text(const std::string& id) const;
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  const std::map<std::string, std::string>& entries() const { return entries_; }

  bool operator==(const TextStore&) const = default;

 private:
  std::map<std::string, std::string> entries_;
};

using QueryStore = TextStore;
using DocStore = TextStore;

// Relevance grade per document, per query. Grades are >= 1.
using Judgments = std::map<std::string, int>;

class QrelSet {
 public:
  // Grades <= 0 are ignored; repeated (query, doc) keeps the max grade.
  void add(const std::string& query_id, const std::string& doc_id, int grade);

  // Empty map when the query has no judgments.
  const Judgments& judgments(const std::string& query_id) const;
  bool has_judgments(const std::string& query_id) const;
  std::size_t query_count() const { return pairs_.size(); }
  std::size_t pair_count() const;

  const std::map<std::string, Judgments>& pairs() const { return pairs_; }

  bool operator==(const QrelSet&) const = default;

 private:
  std::map<std::string, Judgments> pairs_;
};

struct Corpus {
  QueryStore queries;
  DocStore docs;
  QrelSet qrels;
};

// `id<TAB>text` records. Blank lines are skipped; a trailing CR is stripped.
QueryStore load_queries(const std::filesystem::path& path);
DocStore load_documents(const std::filesystem::path& path);
// TREC qrels: `qid 0 did grade`.
QrelSet load_qrels(const std::filesystem::path& path);

void write_text_store(const TextStore& store, const std::filesystem::path& path);
void write_qrels(const QrelSet& qrels, const std::filesystem::path& path);

struct ValidationFinding {
  enum class Kind { kDanglingQuery, kDanglingDoc };
  Kind kind;
  std::string query_id;
  std::string doc_id;

  std::string describe() const;
};

struct ValidationReport {
  std::vector<ValidationFinding> findings;

  bool ok() const { return findings.empty(); }
  std::size_t count(ValidationFinding::Kind kind) const;
};

// Lists qrels referencing unknown queries or documents. In strict mode any
// finding raises InputError.
ValidationReport validate_corpus(const Corpus& corpus, bool strict = false);

// Standard file names inside a corpus directory.
struct CorpusPaths {
  std::filesystem::path queries;
  std::filesystem::path docs;
  std::filesystem::path qrels;
  std::filesystem::path query_vectors;
  std::filesystem::path doc_vectors;

  static CorpusPaths in_directory(const std::filesystem::path& dir);
};

Corpus load_corpus(const CorpusPaths& paths);

}  // namespace topicstream
