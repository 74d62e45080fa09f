#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace homegcl {

enum class EntityType { Segment, Parcel };

std::string_view entity_name(EntityType t);

enum class Relation { SegGeo, SegFun, SegMob, ParGeo, ParFun, ParMob, SR };

inline constexpr std::array<Relation, 7> kAllRelations = {Relation::SegGeo, Relation::SegFun, Relation::SegMob,
                                                          Relation::ParGeo, Relation::ParFun, Relation::ParMob,
                                                          Relation::SR};
inline constexpr std::array<Relation, 6> kIntraRelations = {Relation::SegGeo, Relation::SegFun, Relation::SegMob,
                                                            Relation::ParGeo, Relation::ParFun, Relation::ParMob};

// "S_geo", "R_fun", "SR", ...
std::string_view relation_name(Relation r);
Relation relation_from_name(std::string_view name);
int relation_index(Relation r);

struct Edge {
  int src = 0;
  int dst = 0;
  double weight = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// Edges sorted by (src, dst) with no duplicate pairs.
struct WeightedEdgeList {
  Relation relation = Relation::SegGeo;
  std::vector<Edge> edges;

  bool empty() const { return edges.empty(); }
  std::size_t size() const { return edges.size(); }

  friend bool operator==(const WeightedEdgeList&, const WeightedEdgeList&) = default;
};

// Sorts by (src, dst); throws when a pair appears twice.
void sort_and_check_unique(WeightedEdgeList& list);

// Min-max normalization over the present edges. A single edge or all-equal
// weights normalize to 1.0.
void min_max_normalize(WeightedEdgeList& list);

// Sum of outgoing weights per source node (size n).
std::vector<double> out_weight_sums(const WeightedEdgeList& list, int n);

}  // namespace homegcl
