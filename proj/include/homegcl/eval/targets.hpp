#pragma once

#include <vector>

#include "homegcl/core/map_bundle.hpp"
#include "homegcl/encoder/params.hpp"
#include "homegcl/graph/edge_list.hpp"

namespace homegcl {

struct TrajectorySplit {
  std::vector<SegmentTrajectory> train;
  std::vector<SegmentTrajectory> validation;
  std::vector<SegmentTrajectory> test;
};

// Chronological split in trajectory id order with ratio 6:2:2.
TrajectorySplit split_trajectories(const std::vector<SegmentTrajectory>& trajectories);

struct FlowTargets {
  std::vector<double> inflow;
  std::vector<double> outflow;
  Mat od;  // od(i, j) counts trajectories from origin i to destination j
};

// Every consecutive transition a -> b adds outflow at a and inflow at b, so
// transit entities gain both and endpoints one. For parcels the segment path
// is mapped through `parcel_of_segment` with consecutive repeats collapsed.
FlowTargets derive_flow_and_od(const std::vector<SegmentTrajectory>& trajectories,
                               const std::vector<int>& parcel_of_segment, EntityType type,
                               int n_entities);

}  // namespace homegcl
