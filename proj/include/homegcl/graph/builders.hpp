#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "homegcl/core/map_bundle.hpp"
#include "homegcl/graph/edge_list.hpp"

namespace homegcl {

// Segment geographic view: 1/(dist(midpoints)+epsilon) on segments sharing an
// intersection, min-max normalized. `topology[i]` lists neighbors of i.
WeightedEdgeList build_segment_geo(const std::vector<RoadSegment>& segments,
                                   const std::vector<std::vector<int>>& topology, double epsilon);

// Parcel geographic view: 1/(dist(centroids)+epsilon) for pairs within
// epsilon_r, both directions, min-max normalized.
WeightedEdgeList build_parcel_geo(const std::vector<LandParcel>& parcels, double epsilon, double epsilon_r);

// Twice the median nearest-neighbor centroid distance.
double default_epsilon_r(const std::vector<LandParcel>& parcels);

// Sparse TF-IDF vectors over the POI category vocabulary, one per entity.
struct TfidfTable {
  int vocab_size = 0;
  std::vector<std::vector<std::pair<int, double>>> rows;

  std::size_t size() const { return rows.size(); }
  std::vector<double> dense(std::size_t i) const;
};

// tf = count / document length, idf = ln(N / (1 + df)), clamped at zero.
// `documents[i]` holds the category of every POI matched to entity i.
TfidfTable tfidf_from_documents(const std::vector<std::vector<int>>& documents, int vocab_size);

// Entity index per POI: nearest segment, or the containing parcel with a
// nearest-centroid fallback.
std::vector<int> match_pois_to_segments(const MapBundle& bundle);
std::vector<int> match_pois_to_parcels(const MapBundle& bundle);

TfidfTable compute_tfidf(EntityType type, const MapBundle& bundle);

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

// Each entity links to its top_k most cosine-similar others (positive
// similarity only, ties to the lower id); an edge exists in both directions if
// either endpoint selected the other.
WeightedEdgeList build_function_graph(const TfidfTable& tfidf, int top_k, Relation relation);

// First-order transition probabilities count(i->j) / sum_k count(i->k).
WeightedEdgeList transition_probabilities(const std::vector<std::vector<int>>& sequences, Relation relation);

WeightedEdgeList build_segment_mobility(const std::vector<SegmentTrajectory>& trajectories);

struct SrGeometry {
  int parcel = 0;
  int segment = 0;
  double distance_m = 0.0;  // parcel centroid to segment polyline
  double angle_rad = 0.0;   // direction of segment midpoint -> parcel centroid, [0, 2pi)

  friend bool operator==(const SrGeometry&, const SrGeometry&) = default;
};

struct Assignment {
  WeightedEdgeList sr;                // src = segment, dst = parcel, weight 1
  std::vector<SrGeometry> geometry;   // one entry per segment, ordered by segment id
  std::vector<int> parcel_of_segment;
};

// Each segment goes to the parcel whose boundary is nearest its midpoint.
Assignment assign_segments_to_parcels(const std::vector<RoadSegment>& segments,
                                      const std::vector<LandParcel>& parcels);

// Segment trajectories mapped to parcels with consecutive repeats collapsed.
std::vector<std::vector<int>> parcel_sequences(const std::vector<SegmentTrajectory>& trajectories,
                                               const std::vector<int>& parcel_of_segment);

WeightedEdgeList build_parcel_mobility(const std::vector<SegmentTrajectory>& trajectories,
                                       const std::vector<int>& parcel_of_segment);

}  // namespace homegcl
