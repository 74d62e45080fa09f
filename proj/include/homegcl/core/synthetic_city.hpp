#pragma once

#include <cstdint>

#include "homegcl/core/map_bundle.hpp"

namespace homegcl {

struct SynthSpec {
  int grid_w = 8;
  int grid_h = 8;
  double cell_size_m = 100.0;
  int n_pois = 640;
  int n_trajectories = 400;
  int n_function_classes = 5;
  std::uint64_t seed = 0;
};

// Number of street segments of a grid city: one segment per grid edge.
inline int synthetic_segment_count(int grid_w, int grid_h) {
  return grid_h * (grid_w + 1) + grid_w * (grid_h + 1);
}

// Planted grid city. Each grid cell is a parcel whose function class is drawn
// from spatially contiguous zones; POI categories and trajectory random walks
// are conditioned on those classes. Pure function of the spec.
MapBundle generate_synthetic_city(const SynthSpec& spec);

}  // namespace homegcl
