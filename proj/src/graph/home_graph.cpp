#include "homegcl/graph/home_graph.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "homegcl/core/error.hpp"

namespace homegcl {

const WeightedEdgeList& HomeGraph::relation(Relation r) const {
  switch (r) {
    case Relation::SegGeo: return segment_graph.geo;
    case Relation::SegFun: return segment_graph.fun;
    case Relation::SegMob: return segment_graph.mob;
    case Relation::ParGeo: return parcel_graph.geo;
    case Relation::ParFun: return parcel_graph.fun;
    case Relation::ParMob: return parcel_graph.mob;
    case Relation::SR: return assignment;
  }
  throw Error("unknown relation");
}

WeightedEdgeList& HomeGraph::relation(Relation r) {
  return const_cast<WeightedEdgeList&>(static_cast<const HomeGraph&>(*this).relation(r));
}

std::vector<int> HomeGraph::parcel_of_segment() const {
  std::vector<int> out(static_cast<std::size_t>(n_segments()), -1);
  for (const auto& e : assignment.edges) out[static_cast<std::size_t>(e.src)] = e.dst;
  return out;
}

std::vector<std::vector<int>> HomeGraph::segments_of_parcel() const {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(n_parcels()));
  for (const auto& e : assignment.edges) out[static_cast<std::size_t>(e.dst)].push_back(e.src);
  return out;
}

bool operator==(const HomeGraph& a, const HomeGraph& b) {
  auto same = [](const RowMatrix& x, const RowMatrix& y) {
    return x.rows() == y.rows() && x.cols() == y.cols() && (x.size() == 0 || x == y);
  };
  return a.segment_graph == b.segment_graph && a.parcel_graph == b.parcel_graph &&
         a.assignment == b.assignment && a.geometry == b.geometry &&
         same(a.segment_features, b.segment_features) && same(a.parcel_features, b.parcel_features) &&
         a.segment_schema == b.segment_schema && a.parcel_schema == b.parcel_schema && a.config == b.config &&
         a.epsilon_r == b.epsilon_r;
}

EntityType relation_entity(Relation r) {
  switch (r) {
    case Relation::SegGeo:
    case Relation::SegFun:
    case Relation::SegMob: return EntityType::Segment;
    case Relation::ParGeo:
    case Relation::ParFun:
    case Relation::ParMob: return EntityType::Parcel;
    case Relation::SR: break;
  }
  throw Error("SR relation spans both entity types");
}

namespace {

template <typename Row>
RowMatrix feature_matrix(const std::vector<Row>& rows, const std::vector<int>& keep) {
  RowMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < keep.size(); ++k) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          rows[i].raw_features[static_cast<std::size_t>(keep[k])];
    }
  }
  return m;
}

std::vector<int> kept_columns(std::size_t n, bool drop_first) {
  std::vector<int> keep;
  for (std::size_t k = drop_first ? 1 : 0; k < n; ++k) keep.push_back(static_cast<int>(k));
  return keep;
}

std::vector<FeatureSchema> select(const std::vector<FeatureSchema>& s, const std::vector<int>& keep) {
  std::vector<FeatureSchema> out;
  for (int k : keep) out.push_back(s[static_cast<std::size_t>(k)]);
  return out;
}

}  // namespace

HomeGraph assemble_home_graph(const MapBundle& bundle, const GraphConfig& config) {
  validate_bundle(bundle);
  if (config.top_k < 1) throw ConfigError("graph.top_k must be >= 1");
  if (!(config.epsilon > 0.0)) throw ConfigError("graph.epsilon must be positive");
  if (config.epsilon_r && !(*config.epsilon_r > 0.0)) throw ConfigError("graph.epsilon_r must be positive");

  HomeGraph g;
  g.config = config;
  const int n_s = static_cast<int>(bundle.segments.size());
  const int n_r = static_cast<int>(bundle.parcels.size());
  g.epsilon_r = config.epsilon_r ? *config.epsilon_r : default_epsilon_r(bundle.parcels);

  const auto topology = shared_endpoint_adjacency(bundle.segments);
  auto assignment = assign_segments_to_parcels(bundle.segments, bundle.parcels);

  g.segment_graph.type = EntityType::Segment;
  g.segment_graph.n = n_s;
  g.segment_graph.geo = build_segment_geo(bundle.segments, topology, config.epsilon);
  g.segment_graph.fun = build_function_graph(compute_tfidf(EntityType::Segment, bundle), config.top_k, Relation::SegFun);
  g.segment_graph.mob = build_segment_mobility(bundle.trajectories);

  g.parcel_graph.type = EntityType::Parcel;
  g.parcel_graph.n = n_r;
  g.parcel_graph.geo = build_parcel_geo(bundle.parcels, config.epsilon, g.epsilon_r);
  g.parcel_graph.fun = build_function_graph(compute_tfidf(EntityType::Parcel, bundle), config.top_k, Relation::ParFun);
  g.parcel_graph.mob = build_parcel_mobility(bundle.trajectories, assignment.parcel_of_segment);

  g.assignment = std::move(assignment.sr);
  g.geometry = std::move(assignment.geometry);

  const auto seg_keep = kept_columns(bundle.segment_schema.size(), config.exclude_segment_label);
  const auto par_keep = kept_columns(bundle.parcel_schema.size(), config.exclude_parcel_label);
  g.segment_features = feature_matrix(bundle.segments, seg_keep);
  g.parcel_features = feature_matrix(bundle.parcels, par_keep);
  g.segment_schema = select(bundle.segment_schema, seg_keep);
  g.parcel_schema = select(bundle.parcel_schema, par_keep);

  validate_home_graph(g);
  return g;
}

void validate_home_graph(const HomeGraph& g) {
  std::vector<std::string> problems;
  const int n_s = g.n_segments();
  const int n_r = g.n_parcels();
  for (Relation r : kIntraRelations) {
    const auto& list = g.relation(r);
    const int n = g.n_nodes(relation_entity(r));
    const std::string name(relation_name(r));
    for (std::size_t k = 0; k < list.edges.size(); ++k) {
      const auto& e = list.edges[k];
      if (e.src < 0 || e.src >= n || e.dst < 0 || e.dst >= n) {
        problems.push_back(name + ": endpoint out of range");
        break;
      }
      if (!(e.weight >= 0.0 && e.weight <= 1.0)) {
        problems.push_back(name + ": weight outside [0, 1]");
        break;
      }
      if (k > 0) {
        const auto& p = list.edges[k - 1];
        if (p.src > e.src || (p.src == e.src && p.dst >= e.dst)) {
          problems.push_back(name + ": edges not sorted or duplicated");
          break;
        }
      }
    }
    if (r == Relation::SegMob || r == Relation::ParMob) {
      const auto sums = out_weight_sums(list, n);
      std::vector<bool> has_out(static_cast<std::size_t>(n), false);
      for (const auto& e : list.edges) has_out[static_cast<std::size_t>(e.src)] = true;
      for (int i = 0; i < n; ++i) {
        if (has_out[static_cast<std::size_t>(i)] && std::abs(sums[static_cast<std::size_t>(i)] - 1.0) > 1e-9) {
          problems.push_back(name + ": row " + std::to_string(i) + " is not stochastic");
          break;
        }
      }
    }
  }
  std::vector<int> out_deg(static_cast<std::size_t>(n_s), 0);
  for (const auto& e : g.assignment.edges) {
    if (e.src < 0 || e.src >= n_s || e.dst < 0 || e.dst >= n_r) {
      problems.push_back("SR: endpoint out of range");
      break;
    }
    if (e.weight != 1.0) problems.push_back("SR: weight must be 1");
    out_deg[static_cast<std::size_t>(e.src)] += 1;
  }
  for (int i = 0; i < n_s; ++i) {
    if (out_deg[static_cast<std::size_t>(i)] != 1) {
      problems.push_back("SR: segment " + std::to_string(i) + " has " +
                         std::to_string(out_deg[static_cast<std::size_t>(i)]) + " assigned parcels");
      break;
    }
  }
  if (g.geometry.size() != g.assignment.edges.size()) {
    problems.push_back("SR geometry does not align with assignment");
  } else {
    for (std::size_t k = 0; k < g.geometry.size(); ++k) {
      const auto& geo = g.geometry[k];
      const auto& e = g.assignment.edges[k];
      if (geo.segment != e.src || geo.parcel != e.dst) {
        problems.push_back("SR geometry does not align with assignment");
        break;
      }
      if (!(geo.angle_rad >= 0.0 && geo.angle_rad < 2.0 * std::numbers::pi) || !(geo.distance_m >= 0.0)) {
        problems.push_back("SR geometry out of range");
        break;
      }
    }
  }
  if (g.segment_features.rows() != n_s || g.segment_features.cols() != static_cast<Eigen::Index>(g.segment_schema.size())) {
    problems.push_back("segment feature matrix shape mismatch");
  }
  if (g.parcel_features.rows() != n_r || g.parcel_features.cols() != static_cast<Eigen::Index>(g.parcel_schema.size())) {
    problems.push_back("parcel feature matrix shape mismatch");
  }
  if (!problems.empty()) {
    std::ostringstream os;
    os << "invalid HOME graph:";
    for (const auto& p : problems) os << "\n  " << p;
    throw ValidationError(os.str());
  }
}

std::vector<int> intra_in_degree(const HomeGraph& g, EntityType t) {
  const auto& v = g.views(t);
  std::vector<int> deg(static_cast<std::size_t>(v.n), 0);
  for (const auto* list : {&v.geo, &v.fun, &v.mob}) {
    for (const auto& e : list->edges) deg[static_cast<std::size_t>(e.dst)] += 1;
  }
  return deg;
}

}  // namespace homegcl
