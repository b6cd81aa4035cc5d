#include "topicstream/corpus.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "topicstream/error.hpp"

namespace topicstream {
namespace {

bool is_blank(std::string_view s) {
  return s.find_first_not_of(" \t\r\n\v\f") == std::string_view::npos;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n\v\f");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n\v\f");
  return s.substr(first, last - first + 1);
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  return in;
}

std::string location(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line);
}

TextStore load_text_store(const std::filesystem::path& path) {
  auto in = open_input(path);
  TextStore store;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_blank(line)) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw InputError(location(path, line_no) + ": missing TAB separator");
    }
    std::string id(trim(std::string_view(line).substr(0, tab)));
    std::string text = line.substr(tab + 1);
    if (id.empty()) throw InputError(location(path, line_no) + ": empty id");
    if (is_blank(text)) {
      throw InputError(location(path, line_no) + ": empty text for id " + id);
    }
    if (store.contains(id)) {
      throw InputError(location(path, line_no) + ": duplicate id " + id);
    }
    store.add(std::move(id), std::move(text));
  }
  return store;
}

}  // namespace

void TextStore::add(std::string id, std::string text) {
  if (is_blank(text)) throw InputError("empty text for id " + id);
  auto [it, inserted] = entries_.emplace(std::move(id), std::move(text));
  if (!inserted) throw InputError("duplicate id " + it->first);
}

const std::string& TextStore::text(const std::string& id) const {
  auto it = entries_.find(id);
  if (it == entries_.end()) throw InputError("unknown id " + id);
  return it->second;
}

void QrelSet::add(const std::string& query_id, const std::string& doc_id,
                  int grade) {
  if (grade <= 0) return;
  auto& grades = pairs_[query_id];
  auto [it, inserted] = grades.emplace(doc_id, grade);
  if (!inserted && grade > it->second) it->second = grade;
}

const Judgments& QrelSet::judgments(const std::string& query_id) const {
  static const Judgments kEmpty;
  auto it = pairs_.find(query_id);
  return it == pairs_.end() ? kEmpty : it->second;
}

bool QrelSet::has_judgments(const std::string& query_id) const {
  return pairs_.count(query_id) != 0;
}

std::size_t QrelSet::pair_count() const {
  std::size_t n = 0;
  for (const auto& [q, docs] : pairs_) n += docs.size();
  return n;
}

QueryStore load_queries(const std::filesystem::path& path) {
  return load_text_store(path);
}

DocStore load_documents(const std::filesystem::path& path) {
  return load_text_store(path);
}

QrelSet load_qrels(const std::filesystem::path& path) {
  auto in = open_input(path);
  QrelSet qrels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    std::istringstream fields(line);
    std::string qid, iter, did, grade_text, extra;
    if (!(fields >> qid >> iter >> did >> grade_text) || (fields >> extra)) {
      throw InputError(location(path, line_no) +
                       ": expected 4 fields `qid 0 did grade`");
    }
    int grade = 0;
    const char* end = grade_text.data() + grade_text.size();
    auto [ptr, ec] = std::from_chars(grade_text.data(), end, grade);
    if (ec != std::errc() || ptr != end) {
      throw InputError(location(path, line_no) + ": non-integer grade '" +
                       grade_text + "'");
    }
    qrels.add(qid, did, grade);
  }
  return qrels;
}

void write_text_store(const TextStore& store,
                      const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  for (const auto& [id, text] : store.entries()) out << id << '\t' << text << '\n';
}

void write_qrels(const QrelSet& qrels, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  for (const auto& [qid, docs] : qrels.pairs()) {
    for (const auto& [did, grade] : docs) {
      out << qid << " 0 " << did << ' ' << grade << '\n';
    }
  }
}

std::string ValidationFinding::describe() const {
  if (kind == Kind::kDanglingQuery) {
    return "qrel (" + query_id + ", " + doc_id + ") references unknown query";
  }
  return "qrel (" + query_id + ", " + doc_id + ") references unknown document";
}

std::size_t ValidationReport::count(ValidationFinding::Kind kind) const {
  std::size_t n = 0;
  for (const auto& f : findings) n += f.kind == kind;
  return n;
}

ValidationReport validate_corpus(const Corpus& corpus, bool strict) {
  ValidationReport report;
  for (const auto& [qid, docs] : corpus.qrels.pairs()) {
    const bool known_query = corpus.queries.contains(qid);
    for (const auto& [did, grade] : docs) {
      if (!known_query) {
        report.findings.push_back(
            {ValidationFinding::Kind::kDanglingQuery, qid, did});
      }
      if (!corpus.docs.contains(did)) {
        report.findings.push_back(
            {ValidationFinding::Kind::kDanglingDoc, qid, did});
      }
    }
  }
  if (strict && !report.ok()) {
    throw InputError("corpus validation failed: " +
                     std::to_string(report.findings.size()) +
                     " finding(s), first: " + report.findings.front().describe());
  }
  return report;
}

CorpusPaths CorpusPaths::in_directory(const std::filesystem::path& dir) {
  return {dir / "queries.tsv", dir / "collection.tsv", dir / "qrels.txt",
          dir / "query_vectors.txt", dir / "doc_vectors.txt"};
}

Corpus load_corpus(const CorpusPaths& paths) {
  Corpus c;
  c.queries = load_queries(paths.queries);
  c.docs = load_documents(paths.docs);
  c.qrels = load_qrels(paths.qrels);
  return c;
}

}  // namespace topicstream
