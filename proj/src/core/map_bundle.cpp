#include "homegcl/core/map_bundle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "homegcl/core/error.hpp"

namespace homegcl {

namespace {

template <typename Row>
void fill_ranges(std::vector<FeatureSchema>& schema, const std::vector<Row>& rows) {
  for (std::size_t k = 0; k < schema.size(); ++k) {
    if (schema[k].kind != FeatureKind::Continuous) continue;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& r : rows) {
      lo = std::min(lo, r.raw_features[k]);
      hi = std::max(hi, r.raw_features[k]);
    }
    double sum = 0.0;
    for (const auto& r : rows) sum += r.raw_features[k];
    const double n = static_cast<double>(rows.size());
    const double mean = rows.empty() ? 0.0 : sum / n;
    double ss = 0.0;
    for (const auto& r : rows) ss += (r.raw_features[k] - mean) * (r.raw_features[k] - mean);
    if (rows.empty()) lo = hi = 0.0;
    schema[k].min = lo;
    schema[k].max = hi;
    schema[k].mean = mean;
    schema[k].stddev = rows.empty() ? 0.0 : std::sqrt(ss / n);
  }
}

}  // namespace

std::vector<FeatureSchema> segment_schema_for(const Vocabulary& vocab,
                                              const std::vector<RoadSegment>& segments) {
  std::vector<FeatureSchema> s = {
      {"category", FeatureKind::Categorical, vocab.other_segment_category() + 1, 0, 0},
      {"length_m", FeatureKind::Continuous, 0, 0, 0},
      {"lanes", FeatureKind::Continuous, 0, 0, 0},
      {"max_speed", FeatureKind::Continuous, 0, 0, 0},
      {"lon", FeatureKind::Continuous, 0, 0, 0},
      {"lat", FeatureKind::Continuous, 0, 0, 0},
  };
  fill_ranges(s, segments);
  return s;
}

std::vector<FeatureSchema> parcel_schema_for(const Vocabulary& vocab,
                                             const std::vector<LandParcel>& parcels) {
  std::vector<FeatureSchema> s = {
      {"function", FeatureKind::Categorical, vocab.other_parcel_function() + 1, 0, 0},
      {"cbd_flag", FeatureKind::Categorical, 2, 0, 0},
      {"n_buildings", FeatureKind::Continuous, 0, 0, 0},
      {"avg_floors", FeatureKind::Continuous, 0, 0, 0},
      {"area_m2", FeatureKind::Continuous, 0, 0, 0},
      {"lon", FeatureKind::Continuous, 0, 0, 0},
      {"lat", FeatureKind::Continuous, 0, 0, 0},
  };
  fill_ranges(s, parcels);
  return s;
}

void validate_bundle(const MapBundle& b) {
  std::vector<std::string> problems;
  auto check_features = [&](const std::string& what, int id, const std::vector<double>& f,
                            const std::vector<FeatureSchema>& schema) {
    if (f.size() != schema.size()) {
      problems.push_back(what + " " + std::to_string(id) + ": expected " +
                         std::to_string(schema.size()) + " raw features, got " +
                         std::to_string(f.size()));
      return;
    }
    for (std::size_t k = 0; k < f.size(); ++k) {
      if (schema[k].kind != FeatureKind::Categorical) continue;
      const double v = f[k];
      if (v < 0 || v >= schema[k].cardinality || v != static_cast<int>(v)) {
        problems.push_back(what + " " + std::to_string(id) + ": feature '" + schema[k].name +
                           "' code out of vocabulary");
      }
    }
  };

  for (std::size_t i = 0; i < b.segments.size(); ++i) {
    const auto& s = b.segments[i];
    if (s.id != static_cast<int>(i)) problems.push_back("segment ids are not dense at " + std::to_string(i));
    if (s.polyline.size() < 2) problems.push_back("segment " + std::to_string(s.id) + ": polyline has fewer than 2 points");
    check_features("segment", s.id, s.raw_features, b.segment_schema);
  }
  for (std::size_t i = 0; i < b.parcels.size(); ++i) {
    const auto& p = b.parcels[i];
    if (p.id != static_cast<int>(i)) problems.push_back("parcel ids are not dense at " + std::to_string(i));
    if (!ring_is_closed(p.polygon) || p.polygon.size() < 4) {
      problems.push_back("parcel " + std::to_string(p.id) + ": polygon ring is not closed");
    } else if (!(std::abs(signed_area(p.polygon)) > 0.0)) {
      problems.push_back("parcel " + std::to_string(p.id) + ": polygon has zero area");
    }
    check_features("parcel", p.id, p.raw_features, b.parcel_schema);
  }
  for (std::size_t i = 0; i < b.pois.size(); ++i) {
    const auto& p = b.pois[i];
    if (p.id != static_cast<int>(i)) problems.push_back("poi ids are not dense at " + std::to_string(i));
    if (p.category < 0 || p.category > b.vocab.other_poi_category()) {
      problems.push_back("poi " + std::to_string(p.id) + ": category out of vocabulary");
    }
  }
  std::vector<std::string> dangling;
  const int n_seg = static_cast<int>(b.segments.size());
  for (std::size_t i = 0; i < b.trajectories.size(); ++i) {
    const auto& t = b.trajectories[i];
    if (t.id != static_cast<int>(i)) problems.push_back("trajectory ids are not dense at " + std::to_string(i));
    for (int sid : t.segment_ids) {
      if (sid < 0 || sid >= n_seg) {
        dangling.push_back("trajectory " + std::to_string(t.id) + " -> segment " + std::to_string(sid));
      }
    }
  }
  if (!dangling.empty()) {
    std::ostringstream os;
    os << "dangling trajectory segment ids:";
    for (const auto& d : dangling) os << "\n  " << d;
    problems.push_back(os.str());
  }
  if (!problems.empty()) {
    std::ostringstream os;
    os << "invalid map bundle:";
    for (const auto& p : problems) os << "\n  " << p;
    throw ValidationError(os.str());
  }
}

int snap_point_to_segment(Point p, const std::vector<RoadSegment>& segments) {
  if (segments.empty()) throw ValidationError("snap_point_to_segment: empty segment set");
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& s : segments) {
    const double d = point_polyline_distance(p, s.polyline);
    if (best < 0 || (d < best_d && !nearly_equal_distance(d, best_d))) {
      best = s.id;
      best_d = d;
    } else if (nearly_equal_distance(d, best_d) && s.id < best) {
      best = s.id;
    }
  }
  return best;
}

}  // namespace homegcl

namespace homegcl {

std::vector<std::vector<int>> shared_endpoint_adjacency(const std::vector<RoadSegment>& segments) {
  // Endpoints are matched on a millimeter grid.
  auto key = [](Point p) {
    return std::make_pair(static_cast<long long>(std::llround(p.x * 1000.0)),
                          static_cast<long long>(std::llround(p.y * 1000.0)));
  };
  std::map<std::pair<long long, long long>, std::vector<int>> at_node;
  for (const auto& s : segments) {
    if (s.polyline.size() < 2) continue;
    const auto a = key(s.polyline.front());
    const auto b = key(s.polyline.back());
    at_node[a].push_back(s.id);
    if (b != a) at_node[b].push_back(s.id);
  }
  std::vector<std::vector<int>> adj(segments.size());
  for (const auto& [k, ids] : at_node) {
    for (int i : ids) {
      for (int j : ids) {
        if (i != j) adj[static_cast<std::size_t>(i)].push_back(j);
      }
    }
  }
  for (auto& row : adj) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }
  return adj;
}

}  // namespace homegcl
