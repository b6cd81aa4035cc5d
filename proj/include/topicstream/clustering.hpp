#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "topicstream/embeddings.hpp"

namespace topicstream {

struct ClusterParams {
  double t1 = 0.7;   // seed threshold: member-to-anchor cosine
  double t2 = 0.5;   // population threshold: query-to-centroid cosine
  std::size_t min_size = 40;
  std::size_t sample_size = 50000;
  std::uint64_t seed = 13;

  // Throws InputError unless 0 < t2 < t1 < 1 and min_size >= 1.
  void check() const;
};

struct TopicCluster {
  int cluster_id = 0;
  std::string anchor;
  // Both sorted and unique; disjoint from each other.
  std::vector<std::string> seed_members;
  std::vector<std::string> populated_members;
  Vector centroid;

  std::size_t size() const { return seed_members.size() + populated_members.size(); }
  std::vector<std::string> members() const;
};

// Uniform sample without replacement of min(sample_size, |ids|) ids, drawn
// with a sub-seed of params.seed. Returned sorted.
std::vector<std::string> sample_for_clustering(std::span<const std::string> ids,
                                               const ClusterParams& params);

// Anchor-based community extraction. Every sampled query's t1-neighborhood
// (itself included) is a candidate community; candidates of size >= s are
// visited by descending size (ties: anchor id), each keeping only members not
// already taken, and kept when still >= s. Output sorted by descending size
// then anchor id; cluster ids are the output positions.
std::vector<TopicCluster> seed_clusters(std::span<const std::string> sample,
                                        const EmbeddingTable& table,
                                        const ClusterParams& params);

// Single pass: each pool query joins the cluster whose centroid it is most
// similar to (ties: lower cluster id) when that cosine is >= t2. Centroids
// are held fixed during the pass and recomputed once afterwards.
std::vector<TopicCluster> populate_clusters(std::vector<TopicCluster> clusters,
                                            std::span<const std::string> pool,
                                            const EmbeddingTable& table,
                                            const ClusterParams& params);

// sample_for_clustering, seed_clusters, then populate_clusters over the ids
// left out of every seed community.
std::vector<TopicCluster> cluster_queries(std::span<const std::string> ids,
                                          const EmbeddingTable& table,
                                          const ClusterParams& params);

struct TwoMeansResult {
  std::vector<std::string> first;
  std::vector<std::string> second;
  // Sum over points of cosine to their own side's center.
  double objective = 0.0;
  std::vector<double> objective_trace;
  int iterations = 0;
};

// Two-way spherical k-means where each side keeps at least
// ceil(min_frac * |ids|) points. The first of 8 starts is seeded with the
// least similar pair among 8 random candidates, the rest with random pairs;
// the best run is then polished by single moves and (up to 400 points) pair
// swaps. Throws InputError for fewer than 4 ids or min_frac outside (0, 0.5].
TwoMeansResult constrained_2means(std::span<const std::string> ids,
                                  const EmbeddingTable& table,
                                  double min_frac = 0.25, int max_iter = 100,
                                  std::uint64_t seed = 13);

// ceil(min_frac * n), capped at n / 2 so two sides always fit.
std::size_t size_floor(std::size_t n, double min_frac);

// One JSON object per line: {cluster_id, seed_members, populated_members}.
void write_clusters(std::span<const TopicCluster> clusters,
                    const std::filesystem::path& path);
// Centroids are recomputed from `table` when given.
std::vector<TopicCluster> read_clusters(const std::filesystem::path& path,
                                        const EmbeddingTable* table = nullptr);

}  // namespace topicstream
