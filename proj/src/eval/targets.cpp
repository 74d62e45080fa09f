#include "homegcl/eval/targets.hpp"

#include <algorithm>

#include "homegcl/core/error.hpp"
#include "homegcl/graph/builders.hpp"

namespace homegcl {

TrajectorySplit split_trajectories(const std::vector<SegmentTrajectory>& trajectories) {
  std::vector<SegmentTrajectory> sorted = trajectories;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const SegmentTrajectory& a, const SegmentTrajectory& b) { return a.id < b.id; });
  const std::size_t n = sorted.size();
  const std::size_t n_train = n * 6 / 10;
  const std::size_t n_val = n * 8 / 10 - n_train;
  TrajectorySplit s;
  s.train.assign(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.validation.assign(sorted.begin() + static_cast<std::ptrdiff_t>(n_train),
                      sorted.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  s.test.assign(sorted.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), sorted.end());
  return s;
}

FlowTargets derive_flow_and_od(const std::vector<SegmentTrajectory>& trajectories,
                               const std::vector<int>& parcel_of_segment, EntityType type,
                               int n_entities) {
  std::vector<std::vector<int>> paths;
  if (type == EntityType::Parcel) {
    paths = parcel_sequences(trajectories, parcel_of_segment);
  } else {
    for (const auto& t : trajectories) paths.push_back(t.segment_ids);
  }
  const auto n = static_cast<std::size_t>(n_entities);
  FlowTargets f;
  f.inflow.assign(n, 0.0);
  f.outflow.assign(n, 0.0);
  f.od = Mat::Zero(n_entities, n_entities);
  for (const auto& p : paths) {
    if (p.empty()) continue;
    for (int e : p) {
      if (e < 0 || e >= n_entities) throw ValidationError("trajectory references unknown entity " + std::to_string(e));
    }
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
      f.outflow[static_cast<std::size_t>(p[i])] += 1.0;
      f.inflow[static_cast<std::size_t>(p[i + 1])] += 1.0;
    }
    f.od(p.front(), p.back()) += 1.0;
  }
  return f;
}

}  // namespace homegcl
