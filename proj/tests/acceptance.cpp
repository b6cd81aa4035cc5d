// Acceptance gate: one PASS/FAIL/SKIP line per criterion, nonzero exit on
// any FAIL. Dataset checks need MSMARCO_DIR (see README).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <map>
#include <set>
#include <spdlog/spdlog.h>
#include <sstream>

#include "oracles.hpp"
#include "support.hpp"
#include "topicstream/clustering.hpp"
#include "topicstream/harness.hpp"
#include "topicstream/random.hpp"

using namespace topicstream;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  enum Kind { kPass, kFail, kSkip } kind = kPass;
  std::string detail;
};

// Collects failed sub-checks of one criterion.
class Verdict {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    if (!ok) ++failed_;
  }
  void note(const std::string& s) { notes_.push_back(s); }
  Outcome outcome() const {
    std::string d;
    for (const auto& n : notes_) d += (d.empty() ? "" : "; ") + n;
    if (failed_ == 0) return {Outcome::kPass, d};
    std::string f = std::to_string(failed_) + " failed check(s): ";
    for (std::size_t i = 0; i < failures_.size(); ++i) f += (i ? " | " : "") + failures_[i];
    return {Outcome::kFail, f + (d.empty() ? "" : " [" + d + "]")};
  }

 private:
  std::vector<std::string> failures_, notes_;
  std::size_t failed_ = 0;
};

std::string pct(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * x);
  return buf;
}

std::string num(double x, int decimals = 3) { return format_fixed(x, decimals); }

// ---- metric oracles

Outcome metric_oracles() {
  Verdict v;
  Rng rng(2024);
  const char* vocab[] = {"alpha", "beta", "gamma", "delta", "omega", "river", "stone", "cloud",
                         "amber", "maple", "cedar", "frost", "ember", "grove", "ridge"};
  for (int inst = 0; inst < 200; ++inst) {
    // mrr
    std::vector<std::string> pool;
    for (int d = 0; d < 40; ++d) pool.push_back("d" + std::to_string(d));
    rng.shuffle(pool);
    Ranking r;
    const std::size_t n = rng.below(31);
    std::vector<std::string> ranked(pool.begin(), pool.begin() + static_cast<long>(n));
    for (std::size_t i = 0; i < n; ++i) r.entries.push_back({ranked[i], static_cast<double>(n - i)});
    Judgments rel;
    const std::size_t nrel = rng.below(4);
    for (auto i : rng.sample_indices(40, nrel)) rel["d" + std::to_string(i)] = 1 + static_cast<int>(rng.below(3));
    for (std::size_t k : {1, 3, 10, 100}) {
      const double got = mrr_at_k(r, rel, k);
      const double want = oracle::mrr(ranked, rel, k);
      v.expect(std::abs(got - want) <= 1e-9, "mrr instance " + std::to_string(inst));
    }

    // mf
    const std::size_t tasks = 1 + rng.below(4), len = 1 + rng.below(8);
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < tasks; ++i) labels.push_back("t" + std::to_string(i));
    RunHistory h(labels, len);
    std::vector<std::vector<double>> s10(tasks), s100(tasks);
    for (std::size_t i = 0; i < tasks; ++i) {
      for (std::size_t j = 0; j <= len; ++j) {
        const double a = rng.uniform(), b = rng.uniform();
        s10[i].push_back(a);
        s100[i].push_back(b);
        h.record({i, j, a, b});
      }
    }
    for (std::size_t i = 0; i < tasks; ++i) {
      for (std::size_t j = 0; j <= len; ++j) {
        v.expect(mf_score(h, i, j) == oracle::mf(s10[i], j), "mf instance " + std::to_string(inst));
        v.expect(mf_score(h, i, j, Metric::kMrr100) == oracle::mf(s100[i], j),
                 "mf@100 instance " + std::to_string(inst));
      }
    }

    // c-score
    Corpus c;
    const std::size_t ndocs = 10 + rng.below(30);
    for (std::size_t d = 0; d < ndocs; ++d) {
      std::string text;
      const std::size_t words = 1 + rng.below(8);
      for (std::size_t w = 0; w < words; ++w) text += std::string(text.empty() ? "" : " ") + vocab[rng.below(15)];
      c.docs.add("doc" + std::to_string(d), text);
    }
    Task ti, tj;
    ti.id = "ti";
    tj.id = "tj";
    for (int q = 0; q < 12; ++q) {
      const auto id = "q" + std::to_string(q);
      c.queries.add(id, std::string(vocab[rng.below(15)]) + " " + vocab[rng.below(15)]);
      (q < 6 ? ti : tj).train.push_back(id);
    }
    std::sort(ti.train.begin(), ti.train.end());
    std::sort(tj.train.begin(), tj.train.end());
    const auto index = InvertedIndex::build(c.docs);
    CScoreParams p;
    p.pool_size = 1 + rng.below(3);
    p.depth = std::vector<std::size_t>{1, 3, 5, 1000}[rng.below(4)];
    p.seed = rng.next();
    const auto pa = sample_pools(ti, p).a;
    const auto pb = sample_pools(tj, p).b;
    // Pools whose queries all miss the collection have no defined score.
    bool any = false;
    for (const auto& q : pa) any |= !oracle::top_docs(c.queries.text(q), index, p.depth).empty();
    if (!any) continue;
    const double got = c_score(ti, tj, c.queries, index, p);
    const double want = oracle::c_score(pa, pb, c.queries, index, p.depth);
    v.expect(std::abs(got - want) <= 1e-9, "c-score instance " + std::to_string(inst));
  }
  v.note("200 instances");
  return v.outcome();
}

// ---- BM25

Outcome bm25_correctness() {
  Verdict v;
  const auto docs = testing::twenty_doc_fixture();
  const auto index = InvertedIndex::build(docs);
  const std::vector<std::string> queries = {"river", "lake rain piano", "river water storm",
                                            "sand desert road city", "music the violin",
                                            "storm storm rain"};
  std::size_t compared = 0;
  for (const auto& q : queries) {
    const auto terms = tokenize(q);
    for (const auto& [id, want] : testing::oracle_bm25(docs, terms, 0.9, 0.4)) {
      v.expect(std::abs(bm25_score(terms, id, index) - want) <= 1e-9, "score " + id + " for '" + q + "'");
      ++compared;
    }
    const auto full = search(index, q, 1000);
    for (std::size_t k : {1, 5, 10, 100}) {
      const auto r = search(index, q, k);
      const std::size_t n = std::min(k, full.entries.size());
      v.expect(r.entries.size() == n &&
                   std::equal(r.entries.begin(), r.entries.end(), full.entries.begin()),
               "prefix k=" + std::to_string(k) + " for '" + q + "'");
    }
  }
  v.note(std::to_string(compared) + " scores compared");
  return v.outcome();
}

// ---- clustering

struct Cloud {
  EmbeddingTable table{1};
  std::vector<std::string> ids;
  oracle::Points points;
};

Cloud make_cloud(const oracle::Points& pts) {
  Cloud c{EmbeddingTable(pts[0].size()), {}, pts};
  for (std::size_t i = 0; i < pts.size(); ++i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "p%04zu", i);
    c.ids.push_back(buf);
    c.table.add(c.ids.back(), pts[i]);
  }
  return c;
}

Outcome clustering_invariants() {
  Verdict v;
  {
    Rng rng(7);
    oracle::Points pts;
    std::vector<int> group;
    for (int i = 0; i < 1000; ++i) {
      const int g = i % 10;
      std::vector<double> x(64);
      for (double& e : x) e = 0.03 * rng.normal();
      x[static_cast<std::size_t>(g)] += 1.0;
      pts.push_back(x);
      group.push_back(g);
    }
    const auto cloud = make_cloud(pts);
    ClusterParams p;
    p.t1 = 0.8;
    p.t2 = 0.6;
    p.min_size = 5;
    const auto clusters = cluster_queries(cloud.ids, cloud.table, p);
    v.expect(clusters.size() == 10, "expected 10 clusters, got " + std::to_string(clusters.size()));
    std::size_t pure = 0, assigned = 0;
    for (const auto& c : clusters) {
      std::map<int, std::size_t> votes;
      for (const auto& id : c.members()) ++votes[group[std::stoul(id.substr(1))]];
      std::size_t best = 0, total = 0;
      for (const auto& [g, n] : votes) {
        best = std::max(best, n);
        total += n;
      }
      pure += best;
      assigned += total;
    }
    // Purity over all 1000 points: unassigned points count as impure.
    const double purity = static_cast<double>(pure) / 1000.0;
    v.expect(purity >= 0.99, "purity " + pct(purity));
    v.note(std::to_string(clusters.size()) + " clusters, purity " + pct(purity) + ", assigned " +
           std::to_string(assigned));
  }
  {
    Rng rng(11);
    for (int inst = 0; inst < 500; ++inst) {
      const std::size_t n = 4 + rng.below(57);
      const double frac = std::vector<double>{0.05, 0.1, 0.25, 0.4, 0.5}[rng.below(5)];
      oracle::Points pts;
      for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> x(6);
        for (double& e : x) e = rng.normal();
        pts.push_back(x);
      }
      const auto cloud = make_cloud(pts);
      const auto r = constrained_2means(cloud.ids, cloud.table, frac, 100, rng.next());
      // ceil(frac * n) cannot hold on both sides for odd n at frac 0.5
      const auto floor = std::min<std::size_t>(
          static_cast<std::size_t>(std::ceil(frac * static_cast<double>(n) - 1e-9)), n / 2);
      v.expect(size_floor(n, frac) == floor, "size_floor(" + std::to_string(n) + ")");
      std::set<std::string> all(r.first.begin(), r.first.end());
      all.insert(r.second.begin(), r.second.end());
      v.expect(r.first.size() >= floor && r.second.size() >= floor && all.size() == n &&
                   r.first.size() + r.second.size() == n,
               "size floor instance " + std::to_string(inst) + " (n=" + std::to_string(n) +
                   ", floor " + std::to_string(floor) + ", sides " + std::to_string(r.first.size()) +
                   "/" + std::to_string(r.second.size()) + ")");
    }
  }
  {
    Rng rng(23);
    double worst_margin = 1e9;
    for (int inst = 0; inst < 20; ++inst) {
      const std::size_t n = 12 + rng.below(49);
      oracle::Points pts;
      for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> x(8);
        for (double& e : x) e = rng.normal();
        pts.push_back(x);
      }
      const auto cloud = make_cloud(pts);
      const auto r = constrained_2means(cloud.ids, cloud.table, 0.25, 100, rng.next());
      std::vector<int> side(n, 1);
      for (const auto& id : r.first) side[std::stoul(id.substr(1))] = 0;
      const double mine = oracle::two_side_objective(pts, side);
      const std::size_t floor = size_floor(n, 0.25);
      double best_random = -1e9;
      for (int t = 0; t < 1000; ++t) {
        const std::size_t k = floor + rng.below(n - 2 * floor + 1);
        std::vector<int> rs(n, 1);
        for (auto i : rng.sample_indices(n, k)) rs[i] = 0;
        best_random = std::max(best_random, oracle::two_side_objective(pts, rs));
      }
      // The table stores floats, so allow rounding noise.
      v.expect(mine >= best_random - 1e-6, "2-means instance " + std::to_string(inst) + ": " +
                                               num(mine, 6) + " < random " + num(best_random, 6));
      worst_margin = std::min(worst_margin, mine - best_random);
    }
    v.note("2-means over best random, smallest margin " + num(worst_margin, 6));
  }
  return v.outcome();
}

// ---- Table 1 structure

Outcome table1_structure() {
  Verdict v;
  SyntheticConfig cfg;
  cfg.topics = 6;
  cfg.queries_per_topic = 120;
  cfg.polarity = {-1, 1, 0, 0, 0, 0};
  const auto stream = testing::synthetic_stream(cfg);
  const auto& corpus = stream.synth.corpus;
  const auto index = InvertedIndex::build(corpus.docs);
  const auto topics = similarity_matrix(stream.seq.tasks, corpus.queries, index);
  const auto random_seq = build_random_sequence(stream.seq, corpus, 13);
  const auto random = similarity_matrix(random_seq.tasks, corpus.queries, index);
  v.expect(stream.seq.tasks.size() == 6, "expected 6 topic tasks");
  v.expect(topics.intra_mean() > 10.0 * topics.inter_mean(),
           "topic intra " + pct(topics.intra_mean()) + " <= 10x inter " + pct(topics.inter_mean()));
  v.expect(std::abs(random.intra_mean() - random.inter_mean()) < 0.05,
           "random |intra - inter| >= 0.05");
  v.note("topics intra " + pct(topics.intra_mean()) + " inter " + pct(topics.inter_mean()) +
         "; random intra " + pct(random.intra_mean()) + " inter " + pct(random.inter_mean()));
  return v.outcome();
}

// ---- forgetting

// Synthetic topic of a task by majority of its query ids (q<topic>_<i>).
int planted_topic(const Task& t) {
  std::map<int, int> votes;
  for (const auto& q : t.all_queries()) ++votes[std::stoi(q.substr(1, q.find('_') - 1))];
  return std::max_element(votes.begin(), votes.end(), [](auto& a, auto& b) {
           return a.second < b.second;
         })->first;
}

double max_mf(const RunHistory& h) {
  double best = 0;
  for (std::size_t i = 0; i < h.labels().size(); ++i) {
    for (std::size_t j = 0; j < h.steps(); ++j) best = std::max(best, mf_score(h, i, j));
  }
  return best;
}

Outcome forgetting() {
  Verdict v;
  SyntheticConfig cfg;
  cfg.topics = 3;
  cfg.queries_per_topic = 120;
  cfg.polarity = {-1, 1, 0};
  auto stream = testing::synthetic_stream(cfg);
  auto& seq = stream.seq;
  if (seq.tasks.size() != 3) {
    v.expect(false, "expected 3 tasks, got " + std::to_string(seq.tasks.size()));
    return v.outcome();
  }
  std::sort(seq.tasks.begin(), seq.tasks.end(),
            [](const Task& a, const Task& b) { return planted_topic(a) < planted_topic(b); });
  seq.tracked = {1, 2, 3};
  const auto index = InvertedIndex::build(stream.synth.corpus.docs);

  // One pass over 40 queries leaves the shared word's weight positive.
  RunConfig config;
  config.epochs_per_task = 2;
  TermWeightRanker seq_ranker(index);
  const auto sequential = run_sequence(seq, seq_ranker, config, stream.synth.corpus, index);
  config.mode = RunMode::kJoint;
  TermWeightRanker joint_ranker(index);
  const auto joint = run_sequence(seq, joint_ranker, config, stream.synth.corpus, index);

  const double after_next = mf_score(sequential, 0, 2);
  const double own = mf_score(sequential, 0, 1);
  v.expect(after_next > 0.0, "mf(topic 1, step 2) = " + num(after_next));
  v.expect(own == 0.0, "mf(topic 1, step 1) = " + num(own));
  v.expect(max_mf(joint) <= max_mf(sequential), "joint max mf above sequential");
  v.note("topic 1 mrr@10 by step: " + num(sequential.at(0, 0).mrr10) + " " +
         num(sequential.at(0, 1).mrr10) + " " + num(sequential.at(0, 2).mrr10) + " " +
         num(sequential.at(0, 3).mrr10));
  v.note("2 epochs per task");
  v.note("max mf sequential " + num(max_mf(sequential)) + ", joint " + num(max_mf(joint)));
  return v.outcome();
}

// ---- scenarios

bool subset(const std::vector<std::string>& xs, const std::vector<std::string>& sorted) {
  return std::all_of(xs.begin(), xs.end(), [&](const std::string& x) {
    return std::binary_search(sorted.begin(), sorted.end(), x);
  });
}

std::vector<std::string> qrel_docs(const Task& t) {
  std::vector<std::string> out;
  for (const auto& q : t.all_queries()) {
    for (const auto& [d, g] : t.qrels.judgments(q)) out.push_back(d);
  }
  return out;
}

std::vector<std::string> sorted_union(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  return a;
}

const Task& by_id(const TopicSequence& seq, const std::string& id) {
  return *std::find_if(seq.tasks.begin(), seq.tasks.end(),
                       [&](const Task& t) { return t.id == id; });
}

Outcome scenario_invariants() {
  Verdict v;
  SyntheticConfig cfg;
  cfg.topics = 8;
  cfg.queries_per_topic = 100;
  const auto stream = testing::synthetic_stream(cfg);
  const auto& seq = stream.seq;

  const auto iu = build_information_update(seq, stream.synth.doc_vectors, 13);
  v.expect(!iu.empty() && iu.size() % 2 == 0, "iu scenarios come in pairs");
  for (std::size_t k = 0; k + 1 < iu.size(); k += 2) {
    const auto& fwd = iu[k];
    const auto& rev = iu[k + 1];
    const auto& r = fwd.roles;
    v.expect(subset(qrel_docs(fwd.tasks[1]), r.d1), fwd.id + ": tau' qrels outside D1");
    v.expect(fwd.tasks[2].train == r.q2_train && sorted_union(r.q2_train, r.q2_eval) == r.q2,
             fwd.id + ": tau'' queries differ from Q2");
    v.expect(rev.reversed && rev.roles.q1 == r.q1 && rev.roles.q2 == r.q2 &&
                 rev.roles.d1 == r.d1 && rev.roles.d2 == r.d2,
             rev.id + ": roles differ");
    v.expect(subset(qrel_docs(rev.tasks[1]), r.d2), rev.id + ": tau' qrels outside D2");
    v.expect(rev.tasks[2].train == r.q1_train, rev.id + ": tau'' is not Q1's training part");
    v.expect(fwd.eval_groups == rev.eval_groups && fwd.tasks[0] == rev.tasks[0],
             rev.id + ": evaluation or init differs");
  }

  const auto ld = build_language_drift(seq, stream.synth.query_vectors, 13);
  v.expect(!ld.empty() && ld.size() % 2 == 0, "ld scenarios come in pairs");
  std::size_t mapped = 0;
  for (std::size_t k = 0; k + 1 < ld.size(); k += 2) {
    const auto& fwd = ld[k];
    const auto& rev = ld[k + 1];
    const auto& r = fwd.roles;
    std::set<std::string> targets;
    for (const auto& [q2, q1] : r.mapping) targets.insert(q1);
    for (const auto& q1 : targets) {
      bool in_d1 = false, in_d2 = false;
      for (const auto& [d, g] : fwd.tasks[1].qrels.judgments(q1)) {
        in_d1 |= std::binary_search(r.d1.begin(), r.d1.end(), d);
        in_d2 |= std::binary_search(r.d2.begin(), r.d2.end(), d);
      }
      v.expect(in_d1 && in_d2, fwd.id + ": " + q1 + " lacks a D1 or D2 qrel");
      ++mapped;
    }
    v.expect(rev.roles.q1 == r.q1 && rev.tasks[1].train == r.q2_train &&
                 rev.tasks[2].train == r.q1_train && fwd.eval_groups == rev.eval_groups,
             rev.id + ": not the mirror of " + fwd.id);
  }

  const auto dt = build_direct_transfer(seq, 13);
  for (const auto& sc : dt) {
    const auto& topic = by_id(seq, sc.topic);
    const double n = static_cast<double>(topic.train.size());
    v.expect(std::abs(static_cast<double>(sc.tasks[1].train.size()) - 0.75 * n) <= 1.0,
             sc.id + ": plus split off 75%");
    v.expect(sorted_union(sc.tasks[1].train, sc.tasks[3].train) == topic.train,
             sc.id + ": plus and minus do not partition the topic");
  }
  v.note(std::to_string(iu.size()) + " iu, " + std::to_string(ld.size()) + " ld (" +
         std::to_string(mapped) + " mapped q1), " + std::to_string(dt.size()) + " dt scenarios");
  return v.outcome();
}

// ---- determinism through the command-line tool

int sh(const std::string& cmd) { return std::system(cmd.c_str()); }

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = testing::read_file(e.path());
  }
  return files;
}

Outcome determinism() {
  Verdict v;
  testing::TempDir tmp;
  const std::vector<std::string> steps = {
      "--out-dir corpus synth --topics 8 --queries-per-topic 60 --polarity=-1,1,0,0,0,0,0,0",
      "--corpus-dir corpus --out-dir topics build-topics --val 10 --test 10 --tracked 4",
      "--corpus-dir corpus --out-dir random build-random --reference-sequence topics",
      "--corpus-dir corpus --out-dir sim similarity --sequence topics",
      "--corpus-dir corpus --out-dir dt build-scenario --kind dt --sequence topics --k 2",
      "--corpus-dir corpus --out-dir iu build-scenario --kind iu --sequence topics --k 2 --topics 2",
      "--corpus-dir corpus --out-dir ld build-scenario --kind ld --sequence topics --k 2 --topics 2",
      "--corpus-dir corpus --out-dir run run --sequence topics --ranker termweight",
      "--corpus-dir corpus --out-dir joint run --sequence random --ranker termweight --mode joint",
      "--corpus-dir corpus --out-dir ldrun run --scenario ld --ranker termweight",
      "--out-dir report report --run run --matrix sim",
  };
  for (const char* name : {"a", "b"}) {
    fs::create_directories(tmp / name);
    for (const auto& s : steps) {
      const std::string cmd = "cd '" + (tmp / name).string() + "' && '" TOPICSTREAM_BIN
                              "' --log-level off " + s + " > /dev/null";
      const int rc = sh(cmd);
      v.expect(rc == 0, "'" + s + "' exited " + std::to_string(rc));
      if (rc != 0) return v.outcome();
    }
  }
  const auto a = snapshot(tmp / "a"), b = snapshot(tmp / "b");
  v.expect(a.size() == b.size(), "file sets differ");
  std::size_t same = 0;
  for (const auto& [path, content] : a) {
    const auto it = b.find(path);
    const bool ok = it != b.end() && it->second == content;
    v.expect(ok, path + " differs");
    same += ok;
  }
  for (const auto* must : {"topics/sequence.json", "run/history.csv", "sim/matrix.csv",
                           "joint/history.csv", "report/quartiles.csv"}) {
    v.expect(a.count(must) == 1, std::string(must) + " missing");
  }
  v.note(std::to_string(same) + " files byte-identical over " + std::to_string(steps.size()) +
         " subcommand runs");
  return v.outcome();
}

// ---- dataset-gated checks

Outcome msmarco() {
  const char* env = std::getenv("MSMARCO_DIR");
  if (env == nullptr || *env == '\0') return {Outcome::kSkip, "MSMARCO_DIR not set"};
  const fs::path dir = env;
  for (const auto* f : {"queries.tsv", "collection.tsv", "qrels.txt", "query_vectors.txt"}) {
    if (!fs::exists(dir / f)) return {Outcome::kSkip, (dir / f).string() + " missing"};
  }
  Verdict v;
  testing::TempDir tmp;
  const std::string base = std::string("'") + TOPICSTREAM_BIN + "' --log-level warn --corpus-dir '" +
                           dir.string() + "' --out-dir '";
  const auto out = [&](const char* name) { return (tmp / name).string() + "' "; };
  const std::vector<std::string> cmds = {
      base + out("topics") + "build-topics --t1 0.7 --s 40 --t2 0.5",
      base + out("random") + "build-random --reference-sequence '" + (tmp / "topics").string() + "'",
      base + out("sim") + "similarity --sequence '" + (tmp / "topics").string() + "'",
      base + out("rsim") + "similarity --sequence '" + (tmp / "random").string() + "'",
      base + out("run") + "run --ranker bm25 --mode frozen --sequence '" +
          (tmp / "topics").string() + "'",
  };
  for (const auto& c : cmds) {
    const int rc = sh(c + " > /dev/null");
    v.expect(rc == 0, c + " exited " + std::to_string(rc));
    if (rc != 0) return v.outcome();
  }
  const auto read_json = [&](const char* name) {
    return nlohmann::json::parse(testing::read_file(tmp / name / "manifest.json"));
  };
  const std::size_t clusters = read_json("topics")["results"]["clusters"];
  v.expect(clusters >= 15 && clusters <= 25, "cluster count " + std::to_string(clusters));

  const auto h = read_history_csv(tmp / "run" / "history.csv");
  double m10 = 0, m100 = 0;
  const std::size_t last = h.steps() - 1;
  for (std::size_t i = 0; i < h.labels().size(); ++i) {
    m10 += h.at(i, last).mrr10;
    m100 += h.at(i, last).mrr100;
  }
  m10 = 100 * m10 / static_cast<double>(h.labels().size());
  m100 = 100 * m100 / static_cast<double>(h.labels().size());
  v.expect(std::abs(m10 - 10.8) <= 2.0, "bm25 MRR@10 " + num(m10, 1));
  v.expect(std::abs(m100 - 11.7) <= 2.0, "bm25 MRR@100 " + num(m100, 1));

  const auto ts = read_json("sim")["results"], rs = read_json("rsim")["results"];
  const double ti = 100.0 * ts["intra_mean"].get<double>(), te = 100.0 * ts["inter_mean"].get<double>();
  const double ri = 100.0 * rs["intra_mean"].get<double>(), re = 100.0 * rs["inter_mean"].get<double>();
  v.expect(std::abs(ti - 31.4) <= 5 && std::abs(te - 3.8) <= 5, "topic c-scores " + num(ti, 1) + "/" + num(te, 1));
  v.expect(std::abs(ri - 10.2) <= 5 && std::abs(re - 10.3) <= 5, "random c-scores " + num(ri, 1) + "/" + num(re, 1));
  v.note(std::to_string(clusters) + " clusters; bm25 " + num(m10, 1) + "/" + num(m100, 1) +
         "; topic intra/inter " + num(ti, 1) + "/" + num(te, 1) + "; random " + num(ri, 1) + "/" +
         num(re, 1));
  return v.outcome();
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"metric oracles", 10, metric_oracles},
      {"bm25 correctness", 5, bm25_correctness},
      {"clustering invariants", 60, clustering_invariants},
      {"similarity structure on synthetic data", 120, table1_structure},
      {"forgetting end-to-end", 120, forgetting},
      {"scenario invariants", 30, scenario_invariants},
      {"determinism", 0, determinism},
      {"msmarco reference values", 0, msmarco},
  };
  spdlog::set_level(spdlog::level::warn);
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {Outcome::kFail, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (o.kind == Outcome::kPass && c.budget_s > 0 && secs > c.budget_s) {
      o = {Outcome::kFail, "took " + num(secs, 1) + " s, budget " + num(c.budget_s, 0) + " s; " + o.detail};
    }
    const char* tag = o.kind == Outcome::kPass ? "PASS" : o.kind == Outcome::kFail ? "FAIL" : "SKIP";
    failed += o.kind == Outcome::kFail;
    std::cout << tag << "  " << c.name << " (" << num(secs, 2) << " s)";
    if (!o.detail.empty()) std::cout << ": " << o.detail;
    std::cout << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
