#pragma once

// Brute-force reference implementations used by the unit and acceptance
// tests. They work from raw inputs and share no code paths with the
// library beyond tokenize/bm25_score where stated.

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "topicstream/corpus.hpp"
#include "topicstream/retrieval.hpp"

namespace oracle {

inline double mrr(const std::vector<std::string>& ranked, const topicstream::Judgments& rel,
                  std::size_t k) {
  std::size_t best = 0;  // 1-based, 0 = none
  for (const auto& [doc, grade] : rel) {
    for (std::size_t i = 0; i < ranked.size(); ++i) {
      if (ranked[i] == doc && (best == 0 || i + 1 < best)) best = i + 1;
    }
  }
  return best == 0 || best > k ? 0.0 : 1.0 / static_cast<double>(best);
}

inline double mf(const std::vector<double>& scores, std::size_t j) {
  double hi = scores[0];
  for (double s : scores) hi = s > hi ? s : hi;
  return hi - scores[j];
}

// Top-`depth` docs by exhaustive BM25 scoring; ties by doc id.
inline std::vector<std::string> top_docs(const std::string& query,
                                         const topicstream::InvertedIndex& index,
                                         std::size_t depth) {
  const auto terms = topicstream::tokenize(query);
  std::vector<std::pair<double, std::string>> all;
  for (const auto& id : index.doc_ids()) {
    const double s = topicstream::bm25_score(terms, id, index);
    if (s > 0) all.emplace_back(-s, id);
  }
  std::sort(all.begin(), all.end());
  std::vector<std::string> out;
  for (std::size_t i = 0; i < all.size() && i < depth; ++i) out.push_back(all[i].second);
  return out;
}

inline double c_score(const std::vector<std::string>& pool_a,
                      const std::vector<std::string>& pool_b,
                      const topicstream::QueryStore& store,
                      const topicstream::InvertedIndex& index, std::size_t depth) {
  std::set<std::string> da, db;
  for (const auto& q : pool_a) {
    for (const auto& d : top_docs(store.text(q), index, depth)) da.insert(d);
  }
  for (const auto& q : pool_b) {
    for (const auto& d : top_docs(store.text(q), index, depth)) db.insert(d);
  }
  std::size_t common = 0;
  for (const auto& d : da) common += db.count(d);
  return static_cast<double>(common) / static_cast<double>(da.size());
}

using Points = std::vector<std::vector<double>>;

inline std::vector<double> unit(std::vector<double> v) {
  double n = 0;
  for (double x : v) n += x * x;
  n = std::sqrt(n);
  for (double& x : v) x /= n;
  return v;
}

inline double cos(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return d / std::sqrt(na * nb);
}

// Sum of cosines of each point to the mean direction of its side.
inline double two_side_objective(const Points& pts, const std::vector<int>& side) {
  double total = 0;
  for (int s = 0; s < 2; ++s) {
    std::vector<double> mean(pts[0].size(), 0.0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (side[i] != s) continue;
      const auto u = unit(pts[i]);
      for (std::size_t k = 0; k < u.size(); ++k) mean[k] += u[k];
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (side[i] == s) total += cos(pts[i], mean);
    }
  }
  return total;
}

// Greedy anchor communities: neighborhoods (self included) at cosine >= t1,
// largest first (ties: smaller anchor index), each losing already-taken
// members and kept when still >= s. Returns member index sets.
inline std::vector<std::vector<std::size_t>> communities(const Points& pts, double t1,
                                                         std::size_t s) {
  const std::size_t n = pts.size();
  std::vector<std::vector<std::size_t>> hood(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || cos(pts[i], pts[j]) >= t1) hood[i].push_back(j);
    }
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return hood[a].size() > hood[b].size();
  });
  std::vector<bool> taken(n, false);
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t a : order) {
    if (hood[a].size() < s) continue;
    std::vector<std::size_t> keep;
    for (std::size_t m : hood[a]) {
      if (!taken[m]) keep.push_back(m);
    }
    if (keep.size() < s) continue;
    for (std::size_t m : keep) taken[m] = true;
    out.push_back(keep);
  }
  return out;
}

}  // namespace oracle
