#include "vcpcr/partition.hpp"

#include <map>
#include <string>

#include "vcpcr/errors.hpp"
#include "vcpcr/rng.hpp"

namespace vcpcr {

void Partition::validate() const {
  if (K < 1) throw InvalidArgument("partition needs K >= 1");
  std::vector<int> counts(static_cast<std::size_t>(K), 0);
  for (int label : labels) {
    if (label < 0 || label >= K)
      throw InvalidArgument("partition label " + std::to_string(label) + " outside [0, " +
                            std::to_string(K) + ")");
    ++counts[static_cast<std::size_t>(label)];
  }
  for (int k = 0; k < K; ++k)
    if (counts[static_cast<std::size_t>(k)] == 0) throw EmptyCluster(k);
}

std::vector<int> Partition::cluster_sizes() const {
  std::vector<int> counts(static_cast<std::size_t>(K > 0 ? K : 0), 0);
  for (int label : labels)
    if (label >= 0 && label < K) ++counts[static_cast<std::size_t>(label)];
  return counts;
}

Partition random_balanced_partition(int p, int K, std::uint64_t seed) {
  if (K < 1 || K > p) throw InvalidArgument("random partition needs 1 <= K <= p");
  Partition out;
  out.K = K;
  out.labels.resize(static_cast<std::size_t>(p));
  for (int j = 0; j < p; ++j) out.labels[static_cast<std::size_t>(j)] = j % K;
  Rng rng = Rng::stream(seed, "partitions", {static_cast<std::uint64_t>(p), static_cast<std::uint64_t>(K)});
  rng.shuffle(out.labels);
  return out;
}

Partition canonicalize(const std::vector<int>& labels) {
  std::map<int, int> remap;
  Partition out;
  out.labels.reserve(labels.size());
  for (int label : labels) {
    auto [it, inserted] = remap.try_emplace(label, static_cast<int>(remap.size()));
    out.labels.push_back(it->second);
  }
  out.K = static_cast<int>(remap.size());
  return out;
}

}  // namespace vcpcr
