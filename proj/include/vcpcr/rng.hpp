#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>
#include <vector>

namespace vcpcr {

// Reproducible random source.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. The distribution code below is ours rather than <random>'s, whose
// algorithms are implementation-defined, so a seed yields the same draws on
// every platform and standard library.
//
// Seeding: a run seed plus a stream name ("data", "folds", "partitions",
// "kmeans", ...) and optional integer keys are mixed with SplitMix64 into the
// engine seed. Components that draw from different streams never share state.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng stream(std::uint64_t seed, std::string_view name,
                    std::initializer_list<std::uint64_t> keys = {});

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer on [0, bound), unbiased by rejection.
  std::uint64_t below(std::uint64_t bound);

  // Standard normal via the Marsaglia polar method; the spare draw is cached.
  double normal();

  // Fisher-Yates with below().
  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace vcpcr
