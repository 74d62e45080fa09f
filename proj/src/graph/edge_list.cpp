#include "homegcl/graph/edge_list.hpp"

#include <algorithm>

#include "homegcl/core/error.hpp"

namespace homegcl {

std::string_view entity_name(EntityType t) { return t == EntityType::Segment ? "segment" : "parcel"; }

std::string_view relation_name(Relation r) {
  switch (r) {
    case Relation::SegGeo: return "S_geo";
    case Relation::SegFun: return "S_fun";
    case Relation::SegMob: return "S_mob";
    case Relation::ParGeo: return "R_geo";
    case Relation::ParFun: return "R_fun";
    case Relation::ParMob: return "R_mob";
    case Relation::SR: return "SR";
  }
  return "?";
}

Relation relation_from_name(std::string_view name) {
  for (Relation r : kAllRelations) {
    if (relation_name(r) == name) return r;
  }
  throw ValidationError("unknown relation '" + std::string(name) + "'");
}

int relation_index(Relation r) { return static_cast<int>(r); }

void sort_and_check_unique(WeightedEdgeList& list) {
  auto& e = list.edges;
  std::sort(e.begin(), e.end(), [](const Edge& a, const Edge& b) {
    return a.src != b.src ? a.src < b.src : a.dst < b.dst;
  });
  for (std::size_t i = 1; i < e.size(); ++i) {
    if (e[i].src == e[i - 1].src && e[i].dst == e[i - 1].dst) {
      throw ValidationError(std::string(relation_name(list.relation)) + ": duplicate edge (" +
                            std::to_string(e[i].src) + ", " + std::to_string(e[i].dst) + ")");
    }
  }
}

void min_max_normalize(WeightedEdgeList& list) {
  if (list.edges.empty()) return;
  auto [lo_it, hi_it] = std::minmax_element(list.edges.begin(), list.edges.end(),
                                            [](const Edge& a, const Edge& b) { return a.weight < b.weight; });
  const double lo = lo_it->weight;
  const double hi = hi_it->weight;
  if (!(hi > lo)) {
    for (auto& e : list.edges) e.weight = 1.0;
    return;
  }
  for (auto& e : list.edges) e.weight = (e.weight - lo) / (hi - lo);
}

std::vector<double> out_weight_sums(const WeightedEdgeList& list, int n) {
  std::vector<double> sums(static_cast<std::size_t>(n), 0.0);
  for (const auto& e : list.edges) sums[static_cast<std::size_t>(e.src)] += e.weight;
  return sums;
}

}  // namespace homegcl
