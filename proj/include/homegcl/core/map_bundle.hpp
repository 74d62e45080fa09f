#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "homegcl/core/geometry.hpp"

namespace homegcl {

enum class FeatureKind { Categorical, Continuous };

// Describes one raw feature column. Categorical cardinality includes the
// reserved "other" code, which is always the last code.
struct FeatureSchema {
  std::string name;
  FeatureKind kind = FeatureKind::Continuous;
  int cardinality = 0;
  double min = 0.0;
  double max = 0.0;
  // Continuous columns only; used to standardize encoder inputs.
  double mean = 0.0;
  double stddev = 0.0;

  friend bool operator==(const FeatureSchema&, const FeatureSchema&) = default;
};

struct RoadSegment {
  int id = 0;
  Polyline polyline;
  Point midpoint;
  // category, length_m, lanes, max_speed, lon, lat
  std::vector<double> raw_features;

  friend bool operator==(const RoadSegment&, const RoadSegment&) = default;
};

struct LandParcel {
  int id = 0;
  Ring polygon;
  Point centroid;
  // function, cbd_flag, n_buildings, avg_floors, area_m2, lon, lat
  std::vector<double> raw_features;

  friend bool operator==(const LandParcel&, const LandParcel&) = default;
};

struct Poi {
  int id = 0;
  Point location;
  int category = 0;

  friend bool operator==(const Poi&, const Poi&) = default;
};

struct SegmentTrajectory {
  int id = 0;
  std::vector<int> segment_ids;

  friend bool operator==(const SegmentTrajectory&, const SegmentTrajectory&) = default;
};

// Category names per vocabulary. Codes index into these lists; the code equal
// to the list size is the reserved "other" code.
struct Vocabulary {
  std::vector<std::string> segment_category;
  std::vector<std::string> parcel_function;
  std::vector<std::string> poi_category;

  int other_segment_category() const { return static_cast<int>(segment_category.size()); }
  int other_parcel_function() const { return static_cast<int>(parcel_function.size()); }
  int other_poi_category() const { return static_cast<int>(poi_category.size()); }

  friend bool operator==(const Vocabulary&, const Vocabulary&) = default;
};

inline constexpr const char* kFramePlanar = "planar_m";
inline constexpr const char* kFrameLonLat = "lonlat_deg";

struct MapBundle {
  std::vector<RoadSegment> segments;
  std::vector<LandParcel> parcels;
  std::vector<Poi> pois;
  std::vector<SegmentTrajectory> trajectories;
  std::vector<FeatureSchema> segment_schema;
  std::vector<FeatureSchema> parcel_schema;
  Vocabulary vocab;
  std::string frame = kFramePlanar;

  friend bool operator==(const MapBundle&, const MapBundle&) = default;
};

// Column positions of the raw feature vectors.
namespace seg_feature {
inline constexpr int kCategory = 0;
inline constexpr int kLength = 1;
inline constexpr int kLanes = 2;
inline constexpr int kMaxSpeed = 3;
inline constexpr int kLon = 4;
inline constexpr int kLat = 5;
inline constexpr int kCount = 6;
}  // namespace seg_feature

namespace parcel_feature {
inline constexpr int kFunction = 0;
inline constexpr int kCbd = 1;
inline constexpr int kBuildings = 2;
inline constexpr int kFloors = 3;
inline constexpr int kArea = 4;
inline constexpr int kLon = 5;
inline constexpr int kLat = 6;
inline constexpr int kCount = 7;
}  // namespace parcel_feature

// Schemas for the fixed column layout; continuous ranges are filled from data.
std::vector<FeatureSchema> segment_schema_for(const Vocabulary& vocab,
                                              const std::vector<RoadSegment>& segments);
std::vector<FeatureSchema> parcel_schema_for(const Vocabulary& vocab,
                                             const std::vector<LandParcel>& parcels);

// Throws ValidationError listing every violated invariant.
void validate_bundle(const MapBundle& bundle);

// Nearest segment by point-to-polyline distance, ties to the lowest id.
int snap_point_to_segment(Point p, const std::vector<RoadSegment>& segments);

}  // namespace homegcl

namespace homegcl {

// For each segment, the ids of other segments sharing a polyline endpoint
// (an intersection), ascending. Symmetric by construction.
std::vector<std::vector<int>> shared_endpoint_adjacency(const std::vector<RoadSegment>& segments);

}  // namespace homegcl
