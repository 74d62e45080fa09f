#include "homegcl/eval/clustering.hpp"

#include <limits>

#include "homegcl/core/error.hpp"
#include "homegcl/core/rng.hpp"
#include "homegcl/eval/metrics.hpp"

namespace homegcl {

namespace {

Mat seed_centers(const Mat& x, int k, Rng& rng) {
  const Eigen::Index n = x.rows();
  Mat centers(k, x.cols());
  centers.row(0) = x.row(static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n))));
  std::vector<double> d2(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = (x.row(i) - centers.row(c - 1)).squaredNorm();
      auto& cur = d2[static_cast<std::size_t>(i)];
      if (d < cur) cur = d;
      total += cur;
    }
    // All points coincide with chosen centers: any point will do.
    const std::size_t pick = total > 0.0 ? rng.categorical(d2) : rng.below(static_cast<std::uint64_t>(n));
    centers.row(c) = x.row(static_cast<Eigen::Index>(pick));
  }
  return centers;
}

KMeansResult lloyd(const Mat& x, Mat centers, int max_iter) {
  const Eigen::Index n = x.rows();
  const int k = static_cast<int>(centers.rows());
  KMeansResult r;
  r.labels.assign(static_cast<std::size_t>(n), -1);
  for (int it = 0; it < max_iter; ++it) {
    bool changed = false;
    r.inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = (x.row(i) - centers.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      r.inertia += best_d;
      if (r.labels[static_cast<std::size_t>(i)] != best) {
        r.labels[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }
    if (!changed) break;
    Mat sums = Mat::Zero(k, x.cols());
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int c = r.labels[static_cast<std::size_t>(i)];
      sums.row(c) += x.row(i);
      ++counts[static_cast<std::size_t>(c)];
    }
    // Empty clusters keep their previous center.
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) centers.row(c) = sums.row(c) / counts[static_cast<std::size_t>(c)];
    }
  }
  r.centers = std::move(centers);
  return r;
}

}  // namespace

KMeansResult kmeans(const Mat& x, int k, std::uint64_t seed, int restarts, int max_iter) {
  if (k < 2) throw ValidationError("k-means needs k >= 2");
  if (x.rows() < k) throw ValidationError("fewer points than clusters");
  if (restarts < 1) throw ValidationError("k-means needs at least one restart");
  Rng rng(seed);
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    Rng local(rng.derive_seed());
    KMeansResult cur = lloyd(x, seed_centers(x, k, local), max_iter);
    if (cur.inertia < best.inertia) best = std::move(cur);
  }
  return best;
}

ConsistencyScores cluster_consistency(const Mat& segment_embeddings, const Mat& parcel_embeddings,
                                      const std::vector<int>& parcel_of_segment, int k, std::uint64_t seed,
                                      int restarts) {
  if (parcel_of_segment.size() != static_cast<std::size_t>(segment_embeddings.rows())) {
    throw ValidationError("assignment does not cover every segment");
  }
  Rng rng(seed);
  const std::uint64_t parcel_seed = rng.derive_seed();
  const std::uint64_t segment_seed = rng.derive_seed();
  const KMeansResult parcels = kmeans(parcel_embeddings, k, parcel_seed, restarts);
  const KMeansResult segments = kmeans(segment_embeddings, k, segment_seed, restarts);
  ConsistencyScores s;
  s.segment_clusters = segments.labels;
  for (int p : parcel_of_segment) s.ideal_clusters.push_back(parcels.labels.at(static_cast<std::size_t>(p)));
  s.nmi = normalized_mutual_info(s.segment_clusters, s.ideal_clusters);
  s.ari = adjusted_rand_index(s.segment_clusters, s.ideal_clusters);
  return s;
}

}  // namespace homegcl
