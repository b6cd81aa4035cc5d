#include "topicstream/embeddings.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "topicstream/error.hpp"

namespace topicstream {
namespace {

constexpr double kMinNorm = 1e-9;

std::string location(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line);
}

}  // namespace

EmbeddingTable::EmbeddingTable(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw InputError("embedding dimension must be positive");
}

void EmbeddingTable::add(const std::string& id, std::span<const double> values) {
  if (values.size() != dim_) {
    throw InputError("vector for " + id + " has " +
                     std::to_string(values.size()) + " components, expected " +
                     std::to_string(dim_));
  }
  double norm2 = 0.0;
  for (double v : values) {
    if (!std::isfinite(v)) throw InputError("non-finite component for " + id);
    norm2 += v * v;
  }
  const double norm = std::sqrt(norm2);
  if (norm < kMinNorm) throw InputError("zero-norm vector for " + id);
  if (!index_.emplace(id, ids_.size()).second) {
    throw InputError("duplicate vector id " + id);
  }
  ids_.push_back(id);
  for (double v : values) data_.push_back(static_cast<float>(v / norm));
}

std::size_t EmbeddingTable::row_of(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw InputError("no embedding for id " + id);
  return it->second;
}

std::span<const float> EmbeddingTable::vector(const std::string& id) const {
  return row(row_of(id));
}

EmbeddingTable load_vectors(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.rfind("#dim", 0) != 0) {
      throw InputError(location(path, line_no) + ": expected `#dim D` header");
    }
    const char* first = line.data() + 4;
    const char* last = line.data() + line.size();
    while (first < last && *first == ' ') ++first;
    auto [ptr, ec] = std::from_chars(first, last, dim);
    if (ec != std::errc() || ptr != last || dim == 0) {
      throw InputError(location(path, line_no) + ": bad dimension header");
    }
    break;
  }
  if (dim == 0) throw InputError(path.string() + ": missing `#dim D` header");

  EmbeddingTable table(dim);
  std::vector<double> values;
  values.reserve(dim);
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw InputError(location(path, line_no) + ": missing TAB separator");
    }
    values.clear();
    const char* p = line.data() + tab + 1;
    const char* end = line.data() + line.size();
    while (p < end) {
      while (p < end && (*p == ' ' || *p == '\t')) ++p;
      if (p == end) break;
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(p, end, v);
      if (ec != std::errc()) {
        throw InputError(location(path, line_no) + ": malformed number");
      }
      values.push_back(v);
      p = ptr;
    }
    if (values.size() != dim) {
      throw InputError(location(path, line_no) + ": dimension mismatch, got " +
                       std::to_string(values.size()) + " expected " +
                       std::to_string(dim));
    }
    try {
      table.add(line.substr(0, tab), values);
    } catch (const InputError& e) {
      throw InputError(location(path, line_no) + ": " + e.what());
    }
  }
  return table;
}

void write_vectors(const EmbeddingTable& table,
                   const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << "#dim " << table.dim() << '\n';
  char buf[32];
  for (std::size_t i = 0; i < table.size(); ++i) {
    out << table.ids()[i] << '\t';
    auto v = table.row(i);
    for (std::size_t k = 0; k < v.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(v[k]));
      if (k) out << ' ';
      out << buf;
    }
    out << '\n';
  }
}

double dot(std::span<const float> a, std::span<const float> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    s += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return s;
}

double cosine(const std::string& a, const std::string& b,
              const EmbeddingTable& table) {
  return dot(table.vector(a), table.vector(b));
}

bool normalize(std::span<float> v) {
  double norm2 = 0.0;
  for (float x : v) norm2 += static_cast<double>(x) * x;
  const double norm = std::sqrt(norm2);
  if (norm < kMinNorm) return false;
  for (float& x : v) x = static_cast<float>(x / norm);
  return true;
}

Vector centroid(std::span<const std::string> ids, const EmbeddingTable& table) {
  if (ids.empty()) throw InputError("centroid of an empty set");
  std::vector<double> sum(table.dim(), 0.0);
  for (const auto& id : ids) {
    auto v = table.vector(id);
    for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += v[k];
  }
  double norm2 = 0.0;
  for (double& s : sum) {
    s /= static_cast<double>(ids.size());
    norm2 += s * s;
  }
  const double norm = std::sqrt(norm2);
  if (norm < kMinNorm) throw InputError("degenerate centroid (mean norm ~ 0)");
  Vector out(sum.size());
  for (std::size_t k = 0; k < sum.size(); ++k) {
    out[k] = static_cast<float>(sum[k] / norm);
  }
  return out;
}

Neighbor nearest(const std::string& source,
                 std::span<const std::string> candidates,
                 const EmbeddingTable& table) {
  if (candidates.empty()) throw InputError("nearest over no candidates");
  auto src = table.vector(source);
  std::size_t best = 0;
  double best_sim = dot(src, table.vector(candidates[0]));
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const double sim = dot(src, table.vector(candidates[i]));
    if (sim > best_sim) {
      best_sim = sim;
      best = i;
    }
  }
  return {candidates[best], best_sim};
}

}  // namespace topicstream
