#include "topicstream/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "topicstream/error.hpp"
#include "topicstream/parallel.hpp"
#include "topicstream/random.hpp"

namespace topicstream {
namespace {

std::vector<std::string> sorted_union(const std::vector<std::string>& a,
                                      const std::vector<std::string>& b) {
  std::vector<std::string> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace

void ClusterParams::check() const {
  if (!(t1 > 0.0 && t1 < 1.0) || !(t2 > 0.0 && t2 < 1.0)) {
    throw InputError("cluster thresholds must lie in (0, 1)");
  }
  if (!(t2 < t1)) throw InputError("population threshold t2 must be below t1");
  if (min_size == 0) throw InputError("minimum cluster size must be positive");
}

std::vector<std::string> TopicCluster::members() const {
  return sorted_union(seed_members, populated_members);
}

std::vector<std::string> sample_for_clustering(std::span<const std::string> ids,
                                               const ClusterParams& params) {
  Rng rng(derive_seed(params.seed, "cluster-sample"));
  auto picks = rng.sample_indices(ids.size(), std::min(params.sample_size, ids.size()));
  std::vector<std::string> out;
  out.reserve(picks.size());
  for (auto i : picks) out.push_back(ids[i]);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<TopicCluster> seed_clusters(std::span<const std::string> sample,
                                        const EmbeddingTable& table,
                                        const ClusterParams& params) {
  params.check();
  const std::size_t n = sample.size();
  const std::size_t dim = table.dim();
  std::vector<float> rows(n * dim);
  for (std::size_t i = 0; i < n; ++i) {
    auto v = table.vector(sample[i]);
    std::copy(v.begin(), v.end(), rows.begin() + i * dim);
  }
  auto row = [&](std::size_t i) {
    return std::span<const float>(rows.data() + i * dim, dim);
  };

  std::vector<std::vector<std::uint32_t>> neighborhoods(n);
  parallel_for(n, [&](std::size_t i) {
    auto& hood = neighborhoods[i];
    auto vi = row(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || dot(vi, row(j)) >= params.t1) {
        hood.push_back(static_cast<std::uint32_t>(j));
      }
    }
  });

  std::vector<std::size_t> anchors;
  for (std::size_t i = 0; i < n; ++i) {
    if (neighborhoods[i].size() >= params.min_size) anchors.push_back(i);
  }
  std::sort(anchors.begin(), anchors.end(), [&](std::size_t a, std::size_t b) {
    if (neighborhoods[a].size() != neighborhoods[b].size()) {
      return neighborhoods[a].size() > neighborhoods[b].size();
    }
    return sample[a] < sample[b];
  });

  std::vector<char> taken(n, 0);
  std::vector<TopicCluster> clusters;
  for (std::size_t a : anchors) {
    std::vector<std::uint32_t> free;
    for (auto j : neighborhoods[a]) {
      if (!taken[j]) free.push_back(j);
    }
    if (free.size() < params.min_size) continue;
    TopicCluster c;
    c.anchor = sample[a];
    for (auto j : free) {
      taken[j] = 1;
      c.seed_members.push_back(sample[j]);
    }
    std::sort(c.seed_members.begin(), c.seed_members.end());
    clusters.push_back(std::move(c));
  }

  std::stable_sort(clusters.begin(), clusters.end(),
                   [](const TopicCluster& a, const TopicCluster& b) {
                     if (a.seed_members.size() != b.seed_members.size()) {
                       return a.seed_members.size() > b.seed_members.size();
                     }
                     return a.anchor < b.anchor;
                   });
  for (std::size_t k = 0; k < clusters.size(); ++k) {
    clusters[k].cluster_id = static_cast<int>(k);
    clusters[k].centroid = centroid(clusters[k].seed_members, table);
  }
  return clusters;
}

std::vector<TopicCluster> populate_clusters(std::vector<TopicCluster> clusters,
                                            std::span<const std::string> pool,
                                            const EmbeddingTable& table,
                                            const ClusterParams& params) {
  if (clusters.empty()) return clusters;
  std::vector<int> choice(pool.size(), -1);
  parallel_for(pool.size(), [&](std::size_t i) {
    auto v = table.vector(pool[i]);
    int best = -1;
    double best_sim = 0.0;
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      const double sim = dot(v, clusters[c].centroid);
      if (best < 0 || sim > best_sim) {
        best = static_cast<int>(c);
        best_sim = sim;
      }
    }
    if (best_sim >= params.t2) choice[i] = best;
  });

  std::vector<std::vector<std::string>> added(clusters.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (choice[i] >= 0) added[choice[i]].push_back(pool[i]);
  }
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    auto& extra = added[c];
    std::sort(extra.begin(), extra.end());
    clusters[c].populated_members = sorted_union(clusters[c].populated_members, extra);
    clusters[c].centroid = centroid(clusters[c].members(), table);
  }
  return clusters;
}

std::vector<TopicCluster> cluster_queries(std::span<const std::string> ids,
                                          const EmbeddingTable& table,
                                          const ClusterParams& params) {
  const auto sample = sample_for_clustering(ids, params);
  auto clusters = seed_clusters(sample, table, params);
  if (clusters.empty()) return clusters;
  std::vector<std::string> taken;
  for (const auto& c : clusters) {
    taken.insert(taken.end(), c.seed_members.begin(), c.seed_members.end());
  }
  std::sort(taken.begin(), taken.end());
  std::vector<std::string> sorted(ids.begin(), ids.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::string> pool;
  std::set_difference(sorted.begin(), sorted.end(), taken.begin(), taken.end(),
                      std::back_inserter(pool));
  return populate_clusters(std::move(clusters), pool, table, params);
}

std::size_t size_floor(std::size_t n, double min_frac) {
  const auto f = static_cast<std::size_t>(std::ceil(min_frac * static_cast<double>(n) - 1e-9));
  return std::min(f, n / 2);
}

namespace {

using Points = std::vector<std::span<const float>>;

struct Sides {
  std::vector<int> side;
  std::vector<double> trace;
  int iterations = 0;
};

std::vector<double> side_sum(const Points& points, const std::vector<int>& side, int s,
                             std::size_t dim) {
  std::vector<double> sum(dim, 0.0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (side[i] != s) continue;
    for (std::size_t k = 0; k < dim; ++k) sum[k] += points[i][k];
  }
  return sum;
}

double norm_of(const std::vector<double>& v) {
  double n2 = 0.0;
  for (double x : v) n2 += x * x;
  return std::sqrt(n2);
}

// For unit points, sum of cosines to the side's mean direction = |side sum|.
double objective_of(const Points& points, const std::vector<int>& side, std::size_t dim) {
  return norm_of(side_sum(points, side, 0, dim)) + norm_of(side_sum(points, side, 1, dim));
}

// Lloyd iterations where the assignment step takes the top-k points by
// margin, k = #positive margins clamped to [floor, n - floor].
Sides lloyd(const Points& points, std::size_t a, std::size_t b, std::size_t floor_size,
            int max_iter, std::size_t dim) {
  const std::size_t n = points.size();
  std::vector<Vector> centers = {Vector(points[a].begin(), points[a].end()),
                                 Vector(points[b].begin(), points[b].end())};
  Sides out;
  out.side.assign(n, -1);
  std::vector<double> margin(n);
  std::vector<std::size_t> order(n);
  for (int iter = 0; iter < max_iter; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      margin[i] = dot(points[i], centers[0]) - dot(points[i], centers[1]);
    }
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return margin[x] > margin[y]; });
    const auto positive = static_cast<std::size_t>(
        std::count_if(margin.begin(), margin.end(), [](double m) { return m > 0.0; }));
    const std::size_t take = std::clamp(positive, floor_size, n - floor_size);
    std::vector<int> next(n, 1);
    for (std::size_t r = 0; r < take; ++r) next[order[r]] = 0;

    const bool stable = next == out.side;
    out.side = std::move(next);
    for (int s = 0; s < 2; ++s) {
      const auto sum = side_sum(points, out.side, s, dim);
      const double norm = norm_of(sum);
      // A cancelling side has zero objective for any center; keep the old one.
      if (norm >= 1e-9) {
        for (std::size_t k = 0; k < dim; ++k) centers[s][k] = static_cast<float>(sum[k] / norm);
      }
    }
    out.trace.push_back(objective_of(points, out.side, dim));
    out.iterations = iter + 1;
    if (stable) break;
  }
  return out;
}

double norm_shifted(const std::vector<double>& sum, std::span<const float> minus,
                    std::span<const float> plus) {
  double n2 = 0.0;
  for (std::size_t k = 0; k < sum.size(); ++k) {
    double v = sum[k];
    if (!minus.empty()) v -= minus[k];
    if (!plus.empty()) v += plus[k];
    n2 += v * v;
  }
  return std::sqrt(n2);
}

// First-improvement search over single moves and, for small inputs, pair
// swaps. Returns true when anything changed.
bool refine(const Points& points, std::vector<int>& side, std::size_t floor_size,
            std::size_t dim) {
  constexpr double kEps = 1e-12;
  constexpr std::size_t kSwapLimit = 400;
  const std::size_t n = points.size();
  std::vector<std::vector<double>> sums = {side_sum(points, side, 0, dim),
                                           side_sum(points, side, 1, dim)};
  std::size_t count[2] = {0, 0};
  for (int s : side) ++count[s];
  auto apply = [&](std::size_t i, int to) {
    const int from = side[i];
    for (std::size_t k = 0; k < dim; ++k) {
      sums[from][k] -= points[i][k];
      sums[to][k] += points[i][k];
    }
    --count[from];
    ++count[to];
    side[i] = to;
  };

  bool changed = false;
  for (int pass = 0; pass < 1000; ++pass) {
    bool improved = false;
    for (std::size_t i = 0; i < n; ++i) {
      const int from = side[i], to = 1 - from;
      if (count[from] <= floor_size) continue;
      const double now = norm_of(sums[0]) + norm_of(sums[1]);
      const double after = norm_shifted(sums[from], points[i], {}) +
                           norm_shifted(sums[to], {}, points[i]);
      if (after > now + kEps) {
        apply(i, to);
        improved = true;
      }
    }
    if (n <= kSwapLimit) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          if (side[i] == side[j]) continue;
          const int si = side[i], sj = side[j];
          const double now = norm_of(sums[0]) + norm_of(sums[1]);
          const double after = norm_shifted(sums[si], points[i], points[j]) +
                               norm_shifted(sums[sj], points[j], points[i]);
          if (after > now + kEps) {
            apply(i, sj);
            apply(j, si);
            improved = true;
          }
        }
      }
    }
    if (!improved) break;
    changed = true;
  }
  return changed;
}

}  // namespace

TwoMeansResult constrained_2means(std::span<const std::string> ids,
                                  const EmbeddingTable& table, double min_frac,
                                  int max_iter, std::uint64_t seed) {
  const std::size_t n = ids.size();
  if (n < 4) throw InputError("constrained 2-means needs at least 4 points");
  if (!(min_frac > 0.0 && min_frac <= 0.5)) {
    throw InputError("min_frac must lie in (0, 0.5]");
  }
  if (max_iter < 1) throw InputError("max_iter must be positive");
  const std::size_t floor_size = std::max<std::size_t>(1, size_floor(n, min_frac));
  const std::size_t dim = table.dim();
  Points points;
  points.reserve(n);
  for (const auto& id : ids) points.push_back(table.vector(id));

  // First start: least similar pair among up to 8 random candidates. The
  // other starts use random pairs.
  Rng rng(derive_seed(seed, "two-means-init"));
  auto candidates = rng.sample_indices(n, std::min<std::size_t>(8, n));
  std::size_t ca = candidates[0], cb = candidates[1];
  double lowest = dot(points[ca], points[cb]);
  for (std::size_t x = 0; x < candidates.size(); ++x) {
    for (std::size_t y = x + 1; y < candidates.size(); ++y) {
      const double sim = dot(points[candidates[x]], points[candidates[y]]);
      if (sim < lowest) {
        lowest = sim;
        ca = candidates[x];
        cb = candidates[y];
      }
    }
  }
  constexpr int kStarts = 8;
  Sides best = lloyd(points, ca, cb, floor_size, max_iter, dim);
  for (int start = 1; start < kStarts; ++start) {
    const auto pair = rng.sample_indices(n, 2);
    Sides run = lloyd(points, pair[0], pair[1], floor_size, max_iter, dim);
    if (run.trace.back() > best.trace.back()) best = std::move(run);
  }

  TwoMeansResult result;
  result.objective_trace = best.trace;
  result.iterations = best.iterations;
  if (refine(points, best.side, floor_size, dim)) {
    result.objective_trace.push_back(objective_of(points, best.side, dim));
  }
  result.objective = result.objective_trace.back();
  for (std::size_t i = 0; i < n; ++i) {
    (best.side[i] == 0 ? result.first : result.second).push_back(ids[i]);
  }
  return result;
}

void write_clusters(std::span<const TopicCluster> clusters,
                    const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  for (const auto& c : clusters) {
    nlohmann::ordered_json j;
    j["cluster_id"] = c.cluster_id;
    j["seed_members"] = c.seed_members;
    j["populated_members"] = c.populated_members;
    out << j.dump() << '\n';
  }
}

std::vector<TopicCluster> read_clusters(const std::filesystem::path& path,
                                        const EmbeddingTable* table) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::vector<TopicCluster> clusters;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      TopicCluster c;
      c.cluster_id = j.at("cluster_id").get<int>();
      c.seed_members = j.at("seed_members").get<std::vector<std::string>>();
      c.populated_members = j.at("populated_members").get<std::vector<std::string>>();
      std::sort(c.seed_members.begin(), c.seed_members.end());
      std::sort(c.populated_members.begin(), c.populated_members.end());
      if (table && c.size() > 0) c.centroid = centroid(c.members(), *table);
      clusters.push_back(std::move(c));
    } catch (const nlohmann::json::exception& e) {
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return clusters;
}

}  // namespace topicstream
