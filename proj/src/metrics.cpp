#include "topicstream/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "topicstream/error.hpp"
#include "topicstream/parallel.hpp"
#include "topicstream/random.hpp"

namespace topicstream {

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

double mrr_at_k(const Ranking& ranking, const Judgments& relevant, std::size_t k) {
  const std::size_t limit = std::min(k, ranking.entries.size());
  for (std::size_t r = 0; r < limit; ++r) {
    if (relevant.count(ranking.entries[r].doc_id)) return 1.0 / static_cast<double>(r + 1);
  }
  return 0.0;
}

CandidateCache::CandidateCache(const Corpus& corpus, const InvertedIndex& index,
                               std::size_t depth, Bm25Params bm25)
    : corpus_(corpus), index_(index), depth_(depth), bm25_(bm25) {}

void CandidateCache::prefetch(std::span<const std::string> query_ids) {
  std::vector<std::string> missing;
  for (const auto& q : query_ids) {
    if (!rankings_.count(q)) missing.push_back(q);
  }
  std::sort(missing.begin(), missing.end());
  missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
  std::vector<Ranking> results(missing.size());
  parallel_for(missing.size(), [&](std::size_t i) {
    results[i] = search(index_, corpus_.queries.text(missing[i]), depth_, bm25_, missing[i]);
  });
  for (std::size_t i = 0; i < missing.size(); ++i) {
    rankings_.emplace(missing[i], std::move(results[i]));
  }
}

const Ranking& CandidateCache::get(const std::string& query_id) const {
  auto it = rankings_.find(query_id);
  if (it == rankings_.end()) throw InputError("no candidates cached for " + query_id);
  return it->second;
}

EvalRecord evaluate_queries(Ranker& ranker, std::span<const std::string> queries,
                            const QrelSet& qrels, CandidateCache& cache) {
  if (queries.empty()) throw InputError("evaluation over an empty query set");
  cache.prefetch(queries);
  const auto& corpus = cache.corpus();
  std::vector<double> rr10(queries.size()), rr100(queries.size());

  auto one = [&](std::size_t i) {
    const auto& qid = queries[i];
    const Ranking& first = cache.get(qid);
    std::vector<CandidateView> views;
    views.reserve(first.entries.size());
    for (const auto& e : first.entries) {
      views.push_back({e.doc_id, corpus.docs.text(e.doc_id), e.score});
    }
    const auto scores = ranker.rescore({qid, corpus.queries.text(qid), views});
    if (scores.size() != views.size()) {
      throw RuntimeFailure(ranker.name() + " returned " + std::to_string(scores.size()) +
                           " scores for " + std::to_string(views.size()) +
                           " candidates (query " + qid + ")");
    }
    for (double s : scores) {
      if (!std::isfinite(s)) {
        throw RuntimeFailure(ranker.name() + " returned a non-finite score (query " + qid + ")");
      }
    }
    std::vector<std::size_t> order(views.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    Ranking reranked{qid, {}};
    reranked.entries.reserve(order.size());
    for (auto o : order) reranked.entries.push_back({first.entries[o].doc_id, scores[o]});
    const auto& judged = qrels.judgments(qid);
    rr10[i] = mrr_at_k(reranked, judged, 10);
    rr100[i] = mrr_at_k(reranked, judged, 100);
  };
  if (ranker.concurrent_rescore()) {
    parallel_for(queries.size(), one);
  } else {
    for (std::size_t i = 0; i < queries.size(); ++i) one(i);
  }

  EvalRecord rec;
  const double n = static_cast<double>(queries.size());
  rec.mrr10 = std::accumulate(rr10.begin(), rr10.end(), 0.0) / n;
  rec.mrr100 = std::accumulate(rr100.begin(), rr100.end(), 0.0) / n;
  return rec;
}

EvalRecord evaluate_task(Ranker& ranker, const Task& task, CandidateCache& cache) {
  return evaluate_queries(ranker, task.test, task.qrels, cache);
}

Metric metric_from_string(const std::string& s) {
  if (s == "mrr10") return Metric::kMrr10;
  if (s == "mrr100") return Metric::kMrr100;
  throw InputError("unknown metric '" + s + "' (mrr10|mrr100)");
}

RunHistory::RunHistory(std::vector<std::string> labels, std::size_t sequence_length)
    : labels_(std::move(labels)), sequence_length_(sequence_length) {}

void RunHistory::record(const EvalRecord& r) {
  if (r.task >= labels_.size() || r.step > sequence_length_) {
    throw InputError("history cell (" + std::to_string(r.task) + ", " +
                     std::to_string(r.step) + ") out of range");
  }
  records_[{r.task, r.step}] = r;
}

bool RunHistory::has(std::size_t task, std::size_t step) const {
  return records_.count({task, step}) != 0;
}

const EvalRecord& RunHistory::at(std::size_t task, std::size_t step) const {
  auto it = records_.find({task, step});
  if (it == records_.end()) {
    throw InputError("history has no record for task " + std::to_string(task) + " at step " +
                     std::to_string(step));
  }
  return it->second;
}

bool RunHistory::complete() const {
  return records_.size() == labels_.size() * steps();
}

double RunHistory::score(std::size_t task, std::size_t step, Metric metric) const {
  const auto& r = at(task, step);
  return metric == Metric::kMrr10 ? r.mrr10 : r.mrr100;
}

std::size_t RunHistory::best_step(std::size_t task, Metric metric) const {
  std::size_t best = 0;
  for (std::size_t j = 1; j < steps(); ++j) {
    if (score(task, j, metric) > score(task, best, metric)) best = j;
  }
  return best;
}

std::size_t RunHistory::label_index(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw InputError("history has no task " + label);
  return static_cast<std::size_t>(it - labels_.begin());
}

double mf_score(const RunHistory& history, std::size_t task, std::size_t step, Metric metric) {
  double best = history.score(task, 0, metric);
  for (std::size_t k = 1; k < history.steps(); ++k) {
    best = std::max(best, history.score(task, k, metric));
  }
  return best - history.score(task, step, metric);
}

void write_history_csv(const RunHistory& history, std::ostream& out) {
  out << "task,step,mrr10,mrr100\n";
  for (std::size_t i = 0; i < history.labels().size(); ++i) {
    for (std::size_t j = 0; j < history.steps(); ++j) {
      if (!history.has(i, j)) continue;
      const auto& r = history.at(i, j);
      out << history.labels()[i] << ',' << j << ',' << format_fixed(r.mrr10) << ','
          << format_fixed(r.mrr100) << '\n';
    }
  }
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_double(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InputError(where + ": bad number '" + s + "'");
  }
}

std::ifstream open_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  return in;
}

}  // namespace

RunHistory read_history_csv(const std::filesystem::path& path) {
  auto in = open_csv(path);
  std::string line;
  if (!std::getline(in, line) || line != "task,step,mrr10,mrr100") {
    throw InputError(path.string() + ": expected header task,step,mrr10,mrr100");
  }
  std::vector<std::string> labels;
  std::vector<EvalRecord> records;
  std::size_t max_step = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    auto cells = split_csv(line);
    if (cells.size() != 4) throw InputError(where + ": expected 4 columns");
    auto it = std::find(labels.begin(), labels.end(), cells[0]);
    if (it == labels.end()) {
      labels.push_back(cells[0]);
      it = labels.end() - 1;
    }
    EvalRecord r;
    r.task = static_cast<std::size_t>(it - labels.begin());
    r.step = static_cast<std::size_t>(parse_double(cells[1], where));
    r.mrr10 = parse_double(cells[2], where);
    r.mrr100 = parse_double(cells[3], where);
    max_step = std::max(max_step, r.step);
    records.push_back(r);
  }
  RunHistory history(labels, max_step);
  for (const auto& r : records) history.record(r);
  if (!history.complete()) throw InputError(path.string() + ": history is incomplete");
  return history;
}

QueryPools sample_pools(const Task& task, const CScoreParams& params) {
  auto all = task.all_queries();
  Rng rng(derive_seed(params.seed, "cscore-pool", task.id));
  rng.shuffle(all);
  const std::size_t m = std::min(params.pool_size, all.size() / 2);
  QueryPools pools;
  pools.a.assign(all.begin(), all.begin() + m);
  pools.b.assign(all.begin() + m, all.begin() + 2 * m);
  std::sort(pools.a.begin(), pools.a.end());
  std::sort(pools.b.begin(), pools.b.end());
  return pools;
}

std::vector<std::string> retrieved_docs(std::span<const std::string> queries,
                                        const QueryStore& store, const InvertedIndex& index,
                                        std::size_t depth, const Bm25Params& bm25) {
  std::vector<Ranking> rankings(queries.size());
  parallel_for(queries.size(), [&](std::size_t i) {
    rankings[i] = search(index, store.text(queries[i]), depth, bm25);
  });
  std::vector<std::string> docs;
  for (const auto& r : rankings) {
    for (const auto& e : r.entries) docs.push_back(e.doc_id);
  }
  std::sort(docs.begin(), docs.end());
  docs.erase(std::unique(docs.begin(), docs.end()), docs.end());
  return docs;
}

double c_score_sets(std::span<const std::string> docs_a, std::span<const std::string> docs_b) {
  if (docs_a.empty()) throw InputError("c-score undefined: first pool retrieved no documents");
  std::size_t common = 0;
  auto a = docs_a.begin();
  auto b = docs_b.begin();
  while (a != docs_a.end() && b != docs_b.end()) {
    if (*a < *b) {
      ++a;
    } else if (*b < *a) {
      ++b;
    } else {
      ++common;
      ++a;
      ++b;
    }
  }
  return static_cast<double>(common) / static_cast<double>(docs_a.size());
}

double c_score(const Task& task_i, const Task& task_j, const QueryStore& store,
               const InvertedIndex& index, const CScoreParams& params) {
  const auto pools_i = sample_pools(task_i, params);
  const auto pools_j = sample_pools(task_j, params);
  const auto docs_a = retrieved_docs(pools_i.a, store, index, params.depth, params.bm25);
  const auto docs_b = retrieved_docs(pools_j.b, store, index, params.depth, params.bm25);
  return c_score_sets(docs_a, docs_b);
}

double SimilarityMatrix::intra_mean() const {
  if (ids.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < size(); ++i) s += values[i][i];
  return s / static_cast<double>(size());
}

double SimilarityMatrix::inter_mean() const {
  if (size() < 2) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t j = 0; j < size(); ++j) {
      if (i != j) s += values[i][j];
    }
  }
  return s / static_cast<double>(size() * (size() - 1));
}

std::size_t SimilarityMatrix::index_of(const std::string& id) const {
  auto it = std::find(ids.begin(), ids.end(), id);
  if (it == ids.end()) throw InputError("similarity matrix has no task " + id);
  return static_cast<std::size_t>(it - ids.begin());
}

SimilarityMatrix similarity_matrix(std::span<const Task> tasks, const QueryStore& store,
                                   const InvertedIndex& index, const CScoreParams& params) {
  SimilarityMatrix m;
  m.pool_size = params.pool_size;
  m.depth = params.depth;
  std::vector<std::vector<std::string>> docs_a, docs_b;
  for (const auto& t : tasks) {
    m.ids.push_back(t.id);
    const auto pools = sample_pools(t, params);
    docs_a.push_back(retrieved_docs(pools.a, store, index, params.depth, params.bm25));
    docs_b.push_back(retrieved_docs(pools.b, store, index, params.depth, params.bm25));
  }
  m.values.assign(tasks.size(), std::vector<double>(tasks.size(), 0.0));
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    for (std::size_t j = 0; j < tasks.size(); ++j) {
      m.values[i][j] = c_score_sets(docs_a[i], docs_b[j]);
    }
  }
  return m;
}

void write_matrix_csv(const SimilarityMatrix& m, std::ostream& out) {
  out << "task";
  for (const auto& id : m.ids) out << ',' << id;
  out << '\n';
  for (std::size_t i = 0; i < m.size(); ++i) {
    out << m.ids[i];
    for (double v : m.values[i]) out << ',' << format_fixed(v);
    out << '\n';
  }
}

SimilarityMatrix read_matrix_csv(const std::filesystem::path& path) {
  auto in = open_csv(path);
  std::string line;
  if (!std::getline(in, line)) throw InputError(path.string() + ": empty matrix file");
  auto header = split_csv(line);
  if (header.empty() || header[0] != "task") {
    throw InputError(path.string() + ": expected header starting with 'task'");
  }
  SimilarityMatrix m;
  m.ids.assign(header.begin() + 1, header.end());
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    auto cells = split_csv(line);
    if (cells.size() != m.ids.size() + 1) throw InputError(where + ": wrong column count");
    if (m.values.size() >= m.ids.size() || cells[0] != m.ids[m.values.size()]) {
      throw InputError(where + ": row label does not match header order");
    }
    std::vector<double> row;
    for (std::size_t c = 1; c < cells.size(); ++c) row.push_back(parse_double(cells[c], where));
    m.values.push_back(std::move(row));
  }
  if (m.values.size() != m.ids.size()) throw InputError(path.string() + ": matrix is not square");
  return m;
}

std::array<double, 3> quartile_edges(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  std::array<double, 3> edges{};
  const double last = static_cast<double>(values.size() - 1);
  for (int q = 0; q < 3; ++q) {
    const double pos = 0.25 * (q + 1) * last;
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    edges[q] = values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
  }
  return edges;
}

int quartile_of(double value, const std::array<double, 3>& edges) {
  for (int q = 0; q < 3; ++q) {
    if (value <= edges[q]) return q;
  }
  return 3;
}

namespace {

struct SimMf {
  double similarity;
  double mf;
};

void bucket_rows(const std::string& label, const std::vector<SimMf>& pairs,
                 std::vector<QuartileRow>& rows) {
  std::vector<double> sims;
  for (const auto& p : pairs) sims.push_back(p.similarity);
  const auto edges = quartile_edges(sims);
  std::array<QuartileRow, 4> block;
  for (int q = 0; q < 4; ++q) {
    block[q].tracked_task = label;
    block[q].quartile = q + 1;
  }
  for (const auto& p : pairs) {
    auto& row = block[quartile_of(p.similarity, edges)];
    row.mean_similarity += p.similarity;
    row.mean_mf += p.mf;
    ++row.count;
  }
  for (auto& row : block) {
    if (row.count == 0) {
      row.mean_similarity = row.mean_mf = std::nan("");
    } else {
      row.mean_similarity /= static_cast<double>(row.count);
      row.mean_mf /= static_cast<double>(row.count);
    }
    rows.push_back(row);
  }
}

}  // namespace

std::vector<QuartileRow> quartile_forgetting(const RunHistory& history,
                                             const SimilarityMatrix& matrix, Metric metric) {
  if (matrix.size() != history.sequence_length()) {
    throw InputError("similarity matrix covers " + std::to_string(matrix.size()) +
                     " tasks but the history has " + std::to_string(history.sequence_length()) +
                     " steps");
  }
  std::vector<QuartileRow> rows;
  std::vector<SimMf> pooled;
  for (std::size_t i = 0; i < history.labels().size(); ++i) {
    const auto& label = history.labels()[i];
    const std::size_t row = matrix.index_of(label);
    std::vector<SimMf> pairs;
    for (std::size_t j = 1; j <= history.sequence_length(); ++j) {
      if (j - 1 == row) continue;
      pairs.push_back({matrix.values[row][j - 1], mf_score(history, i, j, metric)});
    }
    if (pairs.size() < 4) {
      throw InputError("tracked task " + label + " has " + std::to_string(pairs.size()) +
                       " similarity/forgetting pairs; quartiles need at least 4");
    }
    bucket_rows(label, pairs, rows);
    pooled.insert(pooled.end(), pairs.begin(), pairs.end());
  }
  if (pooled.size() >= 4) bucket_rows("pooled", pooled, rows);
  return rows;
}

void write_quartile_csv(std::span<const QuartileRow> rows, std::ostream& out) {
  out << "tracked_task,quartile,mean_similarity,mean_mf\n";
  for (const auto& r : rows) {
    out << r.tracked_task << ',' << r.quartile << ','
        << (r.count ? format_fixed(r.mean_similarity) : "nan") << ','
        << (r.count ? format_fixed(r.mean_mf) : "nan") << '\n';
  }
}

}  // namespace topicstream
