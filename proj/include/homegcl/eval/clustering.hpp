#pragma once

#include <cstdint>
#include <vector>

#include "homegcl/encoder/params.hpp"

namespace homegcl {

struct KMeansResult {
  std::vector<int> labels;
  Mat centers;
  double inertia = 0.0;
};

// Lloyd iterations from k-means++ seeds; the restart with the lowest inertia wins.
KMeansResult kmeans(const Mat& x, int k, std::uint64_t seed, int restarts = 10, int max_iter = 300);

struct ConsistencyScores {
  double nmi = 0.0;
  double ari = 0.0;
  std::vector<int> segment_clusters;
  std::vector<int> ideal_clusters;  // each segment takes its parcel's cluster
};

ConsistencyScores cluster_consistency(const Mat& segment_embeddings, const Mat& parcel_embeddings,
                                      const std::vector<int>& parcel_of_segment, int k, std::uint64_t seed,
                                      int restarts = 10);

}  // namespace homegcl
