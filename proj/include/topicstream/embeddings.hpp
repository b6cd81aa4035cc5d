#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace topicstream {

// Dense vectors keyed by query or document id, stored L2-normalized so that
// cosine similarity is a dot product. Immutable once built.
class EmbeddingTable {
 public:
  explicit EmbeddingTable(std::size_t dim);

  // Normalizes `values`. Throws InputError on a dimension mismatch, a
  // non-finite component, a zero-norm vector or a duplicate id.
  void add(const std::string& id, std::span<const double> values);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return ids_.size(); }
  bool contains(const std::string& id) const { return index_.count(id) != 0; }

  // Unit vector for `id`; throws InputError for unknown ids.
  std::span<const float> vector(const std::string& id) const;
  std::span<const float> row(std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }
  std::size_t row_of(const std::string& id) const;
  const std::vector<std::string>& ids() const { return ids_; }

 private:
  std::size_t dim_;
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<float> data_;
};

// Header `#dim D`, then `id<TAB>f1 f2 ... fD` per line.
EmbeddingTable load_vectors(const std::filesystem::path& path);
void write_vectors(const EmbeddingTable& table, const std::filesystem::path& path);

using Vector = std::vector<float>;

double dot(std::span<const float> a, std::span<const float> b);

double cosine(const std::string& a, const std::string& b,
              const EmbeddingTable& table);

// Component-wise mean of the unit vectors, re-normalized. Throws InputError
// on an empty set and when the mean has norm below 1e-9.
Vector centroid(std::span<const std::string> ids, const EmbeddingTable& table);

// Normalizes in place; returns false when the norm is below 1e-9.
bool normalize(std::span<float> v);

struct Neighbor {
  std::string id;
  double similarity;
};

// Candidate with the highest cosine to `source`; ties go to the earliest
// candidate. Throws InputError for an empty list or unknown ids.
Neighbor nearest(const std::string& source,
                 std::span<const std::string> candidates,
                 const EmbeddingTable& table);

}  // namespace topicstream
