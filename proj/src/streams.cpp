#include "topicstream/streams.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "topicstream/error.hpp"
#include "topicstream/random.hpp"

namespace topicstream {
namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::array<std::pair<Provenance, std::string_view>, 10> kProvenanceNames = {{
    {Provenance::kTopic, "topic"},
    {Provenance::kRandom, "random"},
    {Provenance::kInit, "init"},
    {Provenance::kDtPlus, "dt_plus"},
    {Provenance::kDtMinus, "dt_minus"},
    {Provenance::kDtForeign, "dt_foreign"},
    {Provenance::kIuPrime, "iu_prime"},
    {Provenance::kIuSecond, "iu_second"},
    {Provenance::kLdStar, "ld_star"},
    {Provenance::kLdStarStar, "ld_starstar"},
}};

constexpr std::array<std::pair<ScenarioKind, std::string_view>, 3> kKindNames = {{
    {ScenarioKind::kDirectTransfer, "dt"},
    {ScenarioKind::kInformationUpdate, "iu"},
    {ScenarioKind::kLanguageDrift, "ld"},
}};

constexpr std::array<std::string_view, 3> kSplitNames = {"train", "val", "test"};

void sort_unique(std::vector<std::string>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

std::vector<std::string> concat(std::initializer_list<const std::vector<std::string>*> parts) {
  std::vector<std::string> out;
  for (const auto* p : parts) out.insert(out.end(), p->begin(), p->end());
  sort_unique(out);
  return out;
}

QrelSet restrict_qrels(const QrelSet& source, const std::vector<std::string>& queries) {
  QrelSet out;
  for (const auto& q : queries) {
    for (const auto& [doc, grade] : source.judgments(q)) out.add(q, doc, grade);
  }
  return out;
}

void merge_qrels(QrelSet& into, const QrelSet& from) {
  for (const auto& [q, docs] : from.pairs()) {
    for (const auto& [d, g] : docs) into.add(q, d, g);
  }
}

std::vector<std::string> take(const std::vector<std::string>& v, std::size_t from,
                              std::size_t count) {
  std::vector<std::string> out(v.begin() + from, v.begin() + from + count);
  std::sort(out.begin(), out.end());
  return out;
}

bool contains_sorted(const std::vector<std::string>& v, const std::string& x) {
  return std::binary_search(v.begin(), v.end(), x);
}

}  // namespace

std::string_view to_string(Provenance p) {
  for (const auto& [value, name] : kProvenanceNames) {
    if (value == p) return name;
  }
  return "unknown";
}

Provenance provenance_from_string(std::string_view s) {
  for (const auto& [value, name] : kProvenanceNames) {
    if (name == s) return value;
  }
  throw InputError("unknown task provenance '" + std::string(s) + "'");
}

std::string_view to_string(ScenarioKind kind) {
  for (const auto& [value, name] : kKindNames) {
    if (value == kind) return name;
  }
  return "unknown";
}

ScenarioKind scenario_kind_from_string(std::string_view s) {
  for (const auto& [value, name] : kKindNames) {
    if (name == s) return value;
  }
  throw InputError("unknown scenario kind '" + std::string(s) + "' (dt|iu|ld)");
}

std::vector<std::string> Task::all_queries() const {
  return concat({&train, &val, &test});
}

std::vector<TrainingPair> Task::training_pairs() const {
  std::vector<TrainingPair> pairs;
  for (const auto& q : train) {
    for (const auto& [doc, grade] : qrels.judgments(q)) pairs.push_back({q, doc});
  }
  return pairs;
}

std::size_t TopicSequence::position_of(const std::string& task_id) const {
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (tasks[i].id == task_id) return i + 1;
  }
  throw InputError("task " + task_id + " is not part of the sequence");
}

std::vector<std::string> judged_queries(const Corpus& corpus) {
  std::vector<std::string> out;
  for (const auto& [qid, docs] : corpus.qrels.pairs()) {
    if (corpus.queries.contains(qid)) out.push_back(qid);
  }
  return out;
}

TopicSequence build_topic_sequence(std::span<const TopicCluster> clusters,
                                   const Corpus& corpus, std::uint64_t seed,
                                   const SplitSizes& sizes) {
  TopicSequence seq;
  seq.kind = "topics";
  seq.seed = seed;
  std::set<std::string> seen;
  for (const auto& cluster : clusters) {
    std::vector<std::string> members;
    for (const auto& q : cluster.members()) {
      if (!seen.insert(q).second) {
        throw InputError("query " + q + " belongs to more than one cluster");
      }
      if (corpus.queries.contains(q) && corpus.qrels.has_judgments(q)) {
        members.push_back(q);
      }
    }
    const std::size_t n = members.size();
    if (n < sizes.val + sizes.test + 1) {
      spdlog::warn("dropping cluster {}: {} judged queries, need at least {}",
                   cluster.cluster_id, n, sizes.val + sizes.test + 1);
      continue;
    }
    const std::size_t nv = std::min(sizes.val, n / 3);
    const std::size_t nt = std::min(sizes.test, n / 3);
    Rng rng(derive_seed(seed, "split", static_cast<std::uint64_t>(cluster.cluster_id)));
    rng.shuffle(members);

    Task task;
    task.id = "topic-" + std::to_string(cluster.cluster_id);
    task.provenance = Provenance::kTopic;
    task.source_clusters = {cluster.cluster_id};
    task.val = take(members, 0, nv);
    task.test = take(members, nv, nt);
    task.train = take(members, nv + nt, n - nv - nt);
    task.qrels = restrict_qrels(corpus.qrels, task.all_queries());
    seq.tasks.push_back(std::move(task));
  }
  if (seq.tasks.size() < 2) {
    throw InputError("only " + std::to_string(seq.tasks.size()) +
                     " cluster(s) large enough for a task; need at least 2");
  }
  Rng order(derive_seed(seed, "order"));
  order.shuffle(seq.tasks);

  Rng tracked(derive_seed(seed, "tracked"));
  for (auto i : tracked.sample_indices(seq.tasks.size(), sizes.tracked)) {
    seq.tracked.push_back(i + 1);
  }
  std::sort(seq.tracked.begin(), seq.tracked.end());
  return seq;
}

TopicSequence build_random_sequence(const TopicSequence& reference,
                                    const Corpus& corpus, std::uint64_t seed) {
  std::vector<std::string> pool;
  for (const auto& t : reference.tasks) {
    auto all = t.all_queries();
    pool.insert(pool.end(), all.begin(), all.end());
  }
  std::sort(pool.begin(), pool.end());
  Rng rng(derive_seed(seed, "random-sequence"));
  rng.shuffle(pool);

  TopicSequence seq;
  seq.kind = "random";
  seq.seed = seed;
  seq.tracked = reference.tracked;
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < reference.tasks.size(); ++i) {
    const auto& ref = reference.tasks[i];
    Task task;
    task.id = "random-" + std::to_string(i + 1);
    task.provenance = Provenance::kRandom;
    task.train = take(pool, cursor, ref.train.size());
    cursor += ref.train.size();
    task.val = take(pool, cursor, ref.val.size());
    cursor += ref.val.size();
    task.test = take(pool, cursor, ref.test.size());
    cursor += ref.test.size();
    task.qrels = restrict_qrels(corpus.qrels, task.all_queries());
    seq.tasks.push_back(std::move(task));
  }
  return seq;
}

Task build_init_task(const TopicSequence& seq, std::size_t k,
                     std::span<const std::string> excluded, std::uint64_t seed) {
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < seq.tasks.size(); ++i) {
    if (std::find(excluded.begin(), excluded.end(), seq.tasks[i].id) == excluded.end()) {
      eligible.push_back(i);
    }
  }
  if (k == 0 || eligible.size() < k) {
    throw InputError("init task needs " + std::to_string(k) + " source tasks, only " +
                     std::to_string(eligible.size()) + " available");
  }
  Rng rng(seed);
  auto picks = rng.sample_indices(eligible.size(), k);
  std::vector<std::size_t> chosen;
  for (auto p : picks) chosen.push_back(eligible[p]);
  std::sort(chosen.begin(), chosen.end());

  Task init;
  init.id = "init";
  init.provenance = Provenance::kInit;
  for (auto i : chosen) {
    const auto& t = seq.tasks[i];
    init.source_tasks.push_back(t.id);
    init.source_clusters.insert(init.source_clusters.end(), t.source_clusters.begin(),
                                t.source_clusters.end());
    init.train.insert(init.train.end(), t.train.begin(), t.train.end());
    init.val.insert(init.val.end(), t.val.begin(), t.val.end());
    init.test.insert(init.test.end(), t.test.begin(), t.test.end());
    merge_qrels(init.qrels, t.qrels);
  }
  sort_unique(init.train);
  sort_unique(init.val);
  sort_unique(init.test);
  return init;
}

std::vector<Scenario> build_direct_transfer(const TopicSequence& seq,
                                            std::uint64_t seed,
                                            const ScenarioParams& params) {
  const std::size_t n = seq.tasks.size();
  if (n < params.init_tasks + 2) {
    throw InputError("direct transfer needs at least " +
                     std::to_string(params.init_tasks + 2) + " tasks, sequence has " +
                     std::to_string(n));
  }
  Rng topic_rng(derive_seed(seed, "dt-topics"));
  auto topics = topic_rng.sample_indices(n, std::min(params.topics, n));

  std::vector<Scenario> out;
  for (std::size_t draw = 0; draw < topics.size(); ++draw) {
    const Task& topic = seq.tasks[topics[draw]];
    Rng foreign_rng(derive_seed(seed, "dt-foreign", draw));
    std::size_t j = static_cast<std::size_t>(foreign_rng.below(n - 1));
    if (j >= topics[draw]) ++j;
    const Task& foreign = seq.tasks[j];

    const std::vector<std::string> excluded = {topic.id, foreign.id};
    Scenario sc;
    sc.id = "dt-" + std::to_string(draw + 1);
    sc.kind = ScenarioKind::kDirectTransfer;
    sc.topic = topic.id;
    sc.foreign = foreign.id;
    sc.seed = seed;
    sc.tasks.push_back(build_init_task(seq, params.init_tasks, excluded,
                                       derive_seed(seed, "dt-init", draw)));

    std::vector<std::string> train = topic.train;
    Rng split_rng(derive_seed(seed, "dt-split", draw));
    split_rng.shuffle(train);
    const auto plus_n = static_cast<std::size_t>(
        std::llround(params.plus_fraction * static_cast<double>(train.size())));

    auto part = [&](Provenance prov, std::string suffix, std::vector<std::string> queries) {
      Task t;
      t.id = topic.id + suffix;
      t.provenance = prov;
      t.source_clusters = topic.source_clusters;
      t.source_tasks = {topic.id};
      t.train = std::move(queries);
      t.val = topic.val;
      t.test = topic.test;
      t.qrels = restrict_qrels(topic.qrels, t.all_queries());
      return t;
    };
    sc.tasks.push_back(part(Provenance::kDtPlus, "-plus", take(train, 0, plus_n)));
    Task foreign_task = foreign;
    foreign_task.provenance = Provenance::kDtForeign;
    foreign_task.source_tasks = {foreign.id};
    sc.tasks.push_back(std::move(foreign_task));
    sc.tasks.push_back(part(Provenance::kDtMinus, "-minus",
                            take(train, plus_n, train.size() - plus_n)));

    sc.eval_groups.push_back({"tau_i", topic.test, restrict_qrels(topic.qrels, topic.test)});
    sc.eval_groups.push_back(
        {"tau_j", foreign.test, restrict_qrels(foreign.qrels, foreign.test)});
    out.push_back(std::move(sc));
  }
  return out;
}

namespace {

struct TopicSplit {
  ScenarioRoles roles;
  QrelSet original;  // single sampled judgment per topic query
};

std::size_t eval_count(std::size_t n, std::size_t cap) {
  if (n < 2) return 0;
  return std::max<std::size_t>(1, std::min(cap, n / 3));
}

void carve_eval(const std::vector<std::string>& group, Rng& rng, std::size_t cap,
                std::vector<std::string>& train, std::vector<std::string>& eval) {
  std::vector<std::string> shuffled = group;
  rng.shuffle(shuffled);
  const std::size_t e = eval_count(group.size(), cap);
  eval = take(shuffled, 0, e);
  train = take(shuffled, e, shuffled.size() - e);
}

std::map<std::string, std::string> map_nearest(const std::vector<std::string>& sources,
                                               const std::vector<std::string>& targets,
                                               const EmbeddingTable& table,
                                               std::size_t& collisions) {
  std::map<std::string, std::string> mapping;
  std::set<std::string> hit;
  for (const auto& s : sources) {
    auto nn = nearest(s, targets, table);
    hit.insert(nn.id);
    mapping.emplace(s, std::move(nn.id));
  }
  collisions = mapping.size() - hit.size();
  return mapping;
}

EvalGroup make_group(std::string name, const std::vector<std::string>& queries,
                     const QrelSet& qrels) {
  return {std::move(name), queries, restrict_qrels(qrels, queries)};
}

std::vector<EvalGroup> split_eval_groups(const TopicSplit& split) {
  const auto& r = split.roles;
  return {make_group("Q1D1", r.q1_eval, split.original),
          make_group("Q2D2", r.q2_eval, split.original),
          make_group("union", concat({&r.q1_eval, &r.q2_eval}), split.original)};
}

Task scenario_task(const Task& topic, std::string suffix, Provenance prov,
                   std::vector<std::string> train, QrelSet qrels) {
  Task t;
  t.id = topic.id + std::move(suffix);
  t.provenance = prov;
  t.source_clusters = topic.source_clusters;
  t.source_tasks = {topic.id};
  t.train = std::move(train);
  t.qrels = std::move(qrels);
  return t;
}

// IU: documents move. `stay` queries keep their judgment, `moved` queries are
// judged against the mapped document.
QrelSet mapped_doc_qrels(const TopicSplit& split, const std::vector<std::string>& stay,
                         const std::vector<std::string>& moved,
                         const std::map<std::string, std::string>& mapping) {
  QrelSet out = restrict_qrels(split.original, stay);
  for (const auto& q : moved) out.add(q, mapping.at(split.roles.single_doc.at(q)), 1);
  return out;
}

// LD: queries move. Every `stay` query keeps its judgment and additionally
// inherits the judgment of each moved query mapped onto it.
QrelSet mapped_query_qrels(const TopicSplit& split, const std::vector<std::string>& stay,
                           const std::vector<std::string>& moved,
                           const std::map<std::string, std::string>& mapping) {
  QrelSet out = restrict_qrels(split.original, stay);
  for (const auto& q : moved) {
    for (const auto& [doc, grade] : split.original.judgments(q)) {
      out.add(mapping.at(q), doc, grade);
    }
  }
  return out;
}

std::vector<Scenario> build_split_scenarios(ScenarioKind kind, const TopicSequence& seq,
                                            const EmbeddingTable& table,
                                            std::uint64_t seed,
                                            const ScenarioParams& params) {
  const std::string name(to_string(kind));
  const bool iu = kind == ScenarioKind::kInformationUpdate;
  const std::size_t n = seq.tasks.size();
  if (n < params.init_tasks + 1) {
    throw InputError(name + " needs at least " + std::to_string(params.init_tasks + 1) +
                     " tasks, sequence has " + std::to_string(n));
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng topic_rng(derive_seed(seed, name + "-topics"));
  topic_rng.shuffle(order);

  std::vector<Scenario> out;
  std::size_t selected = 0;
  for (std::size_t pos : order) {
    if (selected == params.topics) break;
    const Task& topic = seq.tasks[pos];
    const auto queries = topic.all_queries();

    TopicSplit split;
    auto& roles = split.roles;
    for (const auto& q : queries) {
      const auto& judged = topic.qrels.judgments(q);
      if (judged.empty()) continue;
      Rng pick(derive_seed(seed, "single-doc", q));
      auto it = judged.begin();
      std::advance(it, static_cast<std::ptrdiff_t>(pick.below(judged.size())));
      roles.single_doc.emplace(q, it->first);
      split.original.add(q, it->first, it->second);
    }
    std::vector<std::string> items;
    if (iu) {
      for (const auto& [q, d] : roles.single_doc) items.push_back(d);
      sort_unique(items);
    } else {
      for (const auto& [q, d] : roles.single_doc) items.push_back(q);
    }
    if (items.size() < params.min_items) {
      spdlog::warn("{}: skipping {} with {} distinct {} (need {})", name, topic.id,
                   items.size(), iu ? "documents" : "queries", params.min_items);
      continue;
    }
    for (const auto& item : items) {
      if (!table.contains(item)) {
        throw InputError(name + ": no embedding for " + item + " (topic " + topic.id + ")");
      }
    }

    auto halves = constrained_2means(items, table, params.min_frac, params.max_iter,
                                     derive_seed(seed, name + "-2means", topic.id));
    if (iu) {
      roles.d1 = halves.first;
      roles.d2 = halves.second;
      sort_unique(roles.d1);
      sort_unique(roles.d2);
      for (const auto& [q, d] : roles.single_doc) {
        (contains_sorted(roles.d1, d) ? roles.q1 : roles.q2).push_back(q);
      }
    } else {
      roles.q1 = halves.first;
      roles.q2 = halves.second;
      sort_unique(roles.q1);
      sort_unique(roles.q2);
      for (const auto& q : roles.q1) roles.d1.push_back(roles.single_doc.at(q));
      for (const auto& q : roles.q2) roles.d2.push_back(roles.single_doc.at(q));
      sort_unique(roles.d1);
      sort_unique(roles.d2);
    }
    Rng eval_rng(derive_seed(seed, name + "-eval", topic.id));
    carve_eval(roles.q1, eval_rng, params.eval_cap, roles.q1_train, roles.q1_eval);
    carve_eval(roles.q2, eval_rng, params.eval_cap, roles.q2_train, roles.q2_eval);

    const Task init = build_init_task(seq, params.init_tasks, std::vector{topic.id},
                                      derive_seed(seed, name + "-init", topic.id));
    const auto all_train = concat({&roles.q1_train, &roles.q2_train});

    for (bool reversed : {false, true}) {
      Scenario sc;
      sc.id = name + "-" + topic.id + (reversed ? "-reversed" : "-forward");
      sc.kind = kind;
      sc.reversed = reversed;
      sc.topic = topic.id;
      sc.seed = seed;
      sc.roles = roles;
      sc.eval_groups = split_eval_groups(split);
      sc.tasks.push_back(init);

      // "from" is the side whose items get mapped onto the other side.
      const auto& stay_train = reversed ? roles.q2_train : roles.q1_train;
      const auto& moved_train = reversed ? roles.q1_train : roles.q2_train;
      if (iu) {
        const auto& from = reversed ? roles.d1 : roles.d2;
        const auto& onto = reversed ? roles.d2 : roles.d1;
        sc.roles.mapping = map_nearest(from, onto, table, sc.roles.collisions);
        sc.tasks.push_back(scenario_task(
            topic, "-iu-prime", Provenance::kIuPrime, all_train,
            mapped_doc_qrels(split, stay_train, moved_train, sc.roles.mapping)));
        sc.tasks.push_back(scenario_task(topic, "-iu-second", Provenance::kIuSecond,
                                         moved_train,
                                         restrict_qrels(split.original, moved_train)));
      } else {
        sc.roles.mapping = map_nearest(moved_train, stay_train, table, sc.roles.collisions);
        sc.tasks.push_back(scenario_task(
            topic, "-ld-star", Provenance::kLdStar, stay_train,
            mapped_query_qrels(split, stay_train, moved_train, sc.roles.mapping)));
        sc.tasks.push_back(scenario_task(topic, "-ld-starstar", Provenance::kLdStarStar,
                                         moved_train,
                                         restrict_qrels(split.original, moved_train)));
      }
      if (sc.roles.collisions > 0) {
        spdlog::info("{}: {} nearest-neighbour collisions", sc.id, sc.roles.collisions);
      }
      out.push_back(std::move(sc));
    }
    ++selected;
  }
  if (out.empty()) {
    throw InputError(name + ": no topic has at least " + std::to_string(params.min_items) +
                     (iu ? " distinct relevant documents" : " judged queries"));
  }
  return out;
}

// --- serialization --------------------------------------------------------

ordered_json task_json(const Task& t) {
  ordered_json j;
  j["id"] = t.id;
  j["provenance"] = to_string(t.provenance);
  j["source_clusters"] = t.source_clusters;
  j["source_tasks"] = t.source_tasks;
  j["sizes"] = {{"train", t.train.size()}, {"val", t.val.size()}, {"test", t.test.size()}};
  return j;
}

void apply_task_json(Task& t, const nlohmann::json& j) {
  t.provenance = provenance_from_string(j.at("provenance").get<std::string>());
  t.source_clusters = j.at("source_clusters").get<std::vector<int>>();
  t.source_tasks = j.at("source_tasks").get<std::vector<std::string>>();
}

void write_query_split(const std::vector<std::string>& ids, const QrelSet& qrels,
                       const QueryStore& queries, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  TextStore subset;
  QrelSet sub_qrels;
  for (const auto& q : ids) {
    subset.add(q, queries.text(q));
    for (const auto& [d, g] : qrels.judgments(q)) sub_qrels.add(q, d, g);
  }
  write_text_store(subset, dir / "queries.tsv");
  write_qrels(sub_qrels, dir / "qrels.txt");
}

std::vector<std::string> read_query_split(const std::filesystem::path& dir, QrelSet& qrels) {
  std::vector<std::string> ids;
  const auto store = load_queries(dir / "queries.tsv");
  for (const auto& [id, text] : store.entries()) ids.push_back(id);
  merge_qrels(qrels, load_qrels(dir / "qrels.txt"));
  return ids;
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_json(const ordered_json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace

std::vector<Scenario> build_information_update(const TopicSequence& seq,
                                               const EmbeddingTable& doc_vectors,
                                               std::uint64_t seed,
                                               const ScenarioParams& params) {
  return build_split_scenarios(ScenarioKind::kInformationUpdate, seq, doc_vectors, seed,
                               params);
}

std::vector<Scenario> build_language_drift(const TopicSequence& seq,
                                           const EmbeddingTable& query_vectors,
                                           std::uint64_t seed,
                                           const ScenarioParams& params) {
  return build_split_scenarios(ScenarioKind::kLanguageDrift, seq, query_vectors, seed,
                               params);
}

void write_task(const Task& task, const QueryStore& queries,
                const std::filesystem::path& tasks_dir) {
  const auto dir = tasks_dir / task.id;
  const std::vector<std::string>* splits[] = {&task.train, &task.val, &task.test};
  for (std::size_t s = 0; s < kSplitNames.size(); ++s) {
    write_query_split(*splits[s], task.qrels, queries, dir / kSplitNames[s]);
  }
}

Task read_task(const std::filesystem::path& tasks_dir, const std::string& task_id) {
  Task task;
  task.id = task_id;
  const auto dir = tasks_dir / task_id;
  std::vector<std::string>* splits[] = {&task.train, &task.val, &task.test};
  for (std::size_t s = 0; s < kSplitNames.size(); ++s) {
    *splits[s] = read_query_split(dir / kSplitNames[s], task.qrels);
  }
  return task;
}

void write_sequence(const TopicSequence& seq, const QueryStore& queries,
                    const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "tasks");
  ordered_json j;
  j["kind"] = seq.kind;
  j["seed"] = seq.seed;
  j["tracked"] = seq.tracked;
  j["tasks"] = ordered_json::array();
  for (const auto& t : seq.tasks) {
    j["tasks"].push_back(task_json(t));
    write_task(t, queries, dir / "tasks");
  }
  write_json(j, dir / "sequence.json");
}

TopicSequence read_sequence(const std::filesystem::path& dir) {
  const auto j = read_json(dir / "sequence.json");
  TopicSequence seq;
  try {
    seq.kind = j.at("kind").get<std::string>();
    seq.seed = j.at("seed").get<std::uint64_t>();
    seq.tracked = j.at("tracked").get<std::vector<std::size_t>>();
    for (const auto& tj : j.at("tasks")) {
      Task t = read_task(dir / "tasks", tj.at("id").get<std::string>());
      apply_task_json(t, tj);
      seq.tasks.push_back(std::move(t));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError((dir / "sequence.json").string() + ": " + e.what());
  }
  for (auto p : seq.tracked) {
    if (p == 0 || p > seq.tasks.size()) {
      throw InputError("tracked position " + std::to_string(p) + " out of range");
    }
  }
  return seq;
}

void write_scenario(const Scenario& sc, const QueryStore& queries,
                    const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "tasks");
  ordered_json j;
  j["id"] = sc.id;
  j["kind"] = to_string(sc.kind);
  j["reversed"] = sc.reversed;
  j["topic"] = sc.topic;
  j["foreign"] = sc.foreign;
  j["seed"] = sc.seed;
  j["tasks"] = ordered_json::array();
  for (const auto& t : sc.tasks) {
    j["tasks"].push_back(task_json(t));
    write_task(t, queries, dir / "tasks");
  }
  j["eval_groups"] = ordered_json::array();
  for (const auto& g : sc.eval_groups) {
    j["eval_groups"].push_back(g.name);
    write_query_split(g.queries, g.qrels, queries, dir / "eval" / g.name);
  }
  const auto& r = sc.roles;
  ordered_json roles;
  roles["q1"] = r.q1;
  roles["q2"] = r.q2;
  roles["d1"] = r.d1;
  roles["d2"] = r.d2;
  roles["q1_train"] = r.q1_train;
  roles["q2_train"] = r.q2_train;
  roles["q1_eval"] = r.q1_eval;
  roles["q2_eval"] = r.q2_eval;
  roles["single_doc"] = r.single_doc;
  roles["mapping"] = r.mapping;
  roles["collisions"] = r.collisions;
  j["roles"] = roles;
  write_json(j, dir / "scenario.json");
}

Scenario read_scenario(const std::filesystem::path& dir) {
  const auto j = read_json(dir / "scenario.json");
  Scenario sc;
  try {
    sc.id = j.at("id").get<std::string>();
    sc.kind = scenario_kind_from_string(j.at("kind").get<std::string>());
    sc.reversed = j.at("reversed").get<bool>();
    sc.topic = j.at("topic").get<std::string>();
    sc.foreign = j.at("foreign").get<std::string>();
    sc.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& tj : j.at("tasks")) {
      Task t = read_task(dir / "tasks", tj.at("id").get<std::string>());
      apply_task_json(t, tj);
      sc.tasks.push_back(std::move(t));
    }
    for (const auto& g : j.at("eval_groups")) {
      EvalGroup group;
      group.name = g.get<std::string>();
      group.queries = read_query_split(dir / "eval" / group.name, group.qrels);
      sc.eval_groups.push_back(std::move(group));
    }
    const auto& r = j.at("roles");
    auto& roles = sc.roles;
    roles.q1 = r.at("q1").get<std::vector<std::string>>();
    roles.q2 = r.at("q2").get<std::vector<std::string>>();
    roles.d1 = r.at("d1").get<std::vector<std::string>>();
    roles.d2 = r.at("d2").get<std::vector<std::string>>();
    roles.q1_train = r.at("q1_train").get<std::vector<std::string>>();
    roles.q2_train = r.at("q2_train").get<std::vector<std::string>>();
    roles.q1_eval = r.at("q1_eval").get<std::vector<std::string>>();
    roles.q2_eval = r.at("q2_eval").get<std::vector<std::string>>();
    roles.single_doc = r.at("single_doc").get<std::map<std::string, std::string>>();
    roles.mapping = r.at("mapping").get<std::map<std::string, std::string>>();
    roles.collisions = r.at("collisions").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError((dir / "scenario.json").string() + ": " + e.what());
  }
  if (sc.tasks.empty()) throw InputError(sc.id + ": scenario without tasks");
  return sc;
}

}  // namespace topicstream
