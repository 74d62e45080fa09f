#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "homegcl/core/map_bundle.hpp"
#include "homegcl/graph/builders.hpp"
#include "homegcl/graph/edge_list.hpp"

namespace homegcl {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct GraphConfig {
  double epsilon = 1.0;
  // Absolute meters; unset means twice the median nearest-neighbor distance.
  std::optional<double> epsilon_r;
  int top_k = 10;
  // Drop the classification label columns from the encoder inputs.
  bool exclude_segment_label = true;
  bool exclude_parcel_label = true;

  friend bool operator==(const GraphConfig&, const GraphConfig&) = default;
};

// One entity type with its geographic, function and mobility views.
struct MultiViewGraph {
  EntityType type = EntityType::Segment;
  int n = 0;
  WeightedEdgeList geo;
  WeightedEdgeList fun;
  WeightedEdgeList mob;

  friend bool operator==(const MultiViewGraph&, const MultiViewGraph&) = default;
};

struct HomeGraph {
  MultiViewGraph segment_graph;
  MultiViewGraph parcel_graph;
  WeightedEdgeList assignment{Relation::SR, {}};  // src = segment, dst = parcel
  std::vector<SrGeometry> geometry;               // aligned with assignment edges
  RowMatrix segment_features;
  RowMatrix parcel_features;
  std::vector<FeatureSchema> segment_schema;
  std::vector<FeatureSchema> parcel_schema;
  GraphConfig config;
  double epsilon_r = 0.0;

  int n_segments() const { return segment_graph.n; }
  int n_parcels() const { return parcel_graph.n; }
  int n_nodes(EntityType t) const { return t == EntityType::Segment ? n_segments() : n_parcels(); }

  const WeightedEdgeList& relation(Relation r) const;
  WeightedEdgeList& relation(Relation r);
  const MultiViewGraph& views(EntityType t) const {
    return t == EntityType::Segment ? segment_graph : parcel_graph;
  }

  std::vector<int> parcel_of_segment() const;
  // Segments assigned to each parcel, ascending ids.
  std::vector<std::vector<int>> segments_of_parcel() const;
};

bool operator==(const HomeGraph& a, const HomeGraph& b);

EntityType relation_entity(Relation r);

HomeGraph assemble_home_graph(const MapBundle& bundle, const GraphConfig& config);

// Throws ValidationError listing every violated HomeGraph invariant.
void validate_home_graph(const HomeGraph& g);

// Unweighted in-degree over the three intra-entity views.
std::vector<int> intra_in_degree(const HomeGraph& g, EntityType t);

}  // namespace homegcl
