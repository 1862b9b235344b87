#pragma once

#include <cstdint>
#include <vector>

namespace vcpcr {

// Hard assignment of p variables to K clusters. Labels are 0-based; the
// serialized forms (JSON, CSV) use 1-based labels.
struct Partition {
  std::vector<int> labels;
  int K = 0;

  std::size_t size() const { return labels.size(); }

  // Throws InvalidArgument for an out-of-range label and EmptyCluster when a
  // label in [0, K) has no member.
  void validate() const;

  std::vector<int> cluster_sizes() const;
};

/// Uniformly shuffled assignment whose cluster sizes differ by at most one.
Partition random_balanced_partition(int p, int K, std::uint64_t seed);

/// Relabels clusters in order of first appearance, dropping unused labels.
Partition canonicalize(const std::vector<int>& labels);

}  // namespace vcpcr
