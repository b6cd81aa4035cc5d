#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace topicstream {

// Every random decision in the toolkit derives from one run seed. Each
// sampling site asks for its own stream with derive_seed(seed, name, index)
// so that adding a new site never perturbs existing ones.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view name,
                          std::uint64_t index = 0);
std::uint64_t derive_seed(std::uint64_t seed, std::string_view name,
                          std::string_view key);

// std::mt19937_64 is bit-exact across standard libraries; the std
// distributions are not, so the helpers below are implemented here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);
  // Uniform in [0, 1).
  double uniform();
  double normal();

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  // k distinct positions out of [0, n), in draw order.
  std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace topicstream
