#include "homegcl/graph/builders.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <set>

#include "homegcl/core/error.hpp"

namespace homegcl {

WeightedEdgeList build_segment_geo(const std::vector<RoadSegment>& segments,
                                   const std::vector<std::vector<int>>& topology, double epsilon) {
  if (!(epsilon > 0.0)) throw ValidationError("build_segment_geo: epsilon must be positive");
  WeightedEdgeList out{Relation::SegGeo, {}};
  for (std::size_t i = 0; i < topology.size() && i < segments.size(); ++i) {
    for (int j : topology[i]) {
      if (j == static_cast<int>(i)) continue;
      const double d = distance(segments[i].midpoint, segments[static_cast<std::size_t>(j)].midpoint);
      out.edges.push_back({static_cast<int>(i), j, 1.0 / (d + epsilon)});
    }
  }
  sort_and_check_unique(out);
  min_max_normalize(out);
  return out;
}

WeightedEdgeList build_parcel_geo(const std::vector<LandParcel>& parcels, double epsilon, double epsilon_r) {
  if (!(epsilon > 0.0)) throw ValidationError("build_parcel_geo: epsilon must be positive");
  if (!(epsilon_r > 0.0)) throw ValidationError("build_parcel_geo: epsilon_r must be positive");
  WeightedEdgeList out{Relation::ParGeo, {}};
  for (std::size_t i = 0; i < parcels.size(); ++i) {
    for (std::size_t j = 0; j < parcels.size(); ++j) {
      if (i == j) continue;
      const double d = distance(parcels[i].centroid, parcels[j].centroid);
      if (d <= epsilon_r) out.edges.push_back({static_cast<int>(i), static_cast<int>(j), 1.0 / (d + epsilon)});
    }
  }
  sort_and_check_unique(out);
  min_max_normalize(out);
  return out;
}

double default_epsilon_r(const std::vector<LandParcel>& parcels) {
  if (parcels.size() < 2) return 1.0;
  std::vector<double> nn;
  for (std::size_t i = 0; i < parcels.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < parcels.size(); ++j) {
      if (i != j) best = std::min(best, distance(parcels[i].centroid, parcels[j].centroid));
    }
    nn.push_back(best);
  }
  std::sort(nn.begin(), nn.end());
  const std::size_t m = nn.size() / 2;
  const double median = nn.size() % 2 ? nn[m] : 0.5 * (nn[m - 1] + nn[m]);
  return median > 0.0 ? 2.0 * median : 1.0;
}

std::vector<double> TfidfTable::dense(std::size_t i) const {
  std::vector<double> v(static_cast<std::size_t>(vocab_size), 0.0);
  for (const auto& [c, x] : rows[i]) v[static_cast<std::size_t>(c)] = x;
  return v;
}

TfidfTable tfidf_from_documents(const std::vector<std::vector<int>>& documents, int vocab_size) {
  TfidfTable t;
  t.vocab_size = vocab_size;
  const double n_docs = static_cast<double>(documents.size());
  std::vector<int> df(static_cast<std::size_t>(vocab_size), 0);
  std::vector<std::map<int, int>> counts(documents.size());
  for (std::size_t i = 0; i < documents.size(); ++i) {
    for (int c : documents[i]) {
      if (c < 0 || c >= vocab_size) throw ValidationError("tfidf: category out of vocabulary");
      counts[i][c] += 1;
    }
    for (const auto& [c, n] : counts[i]) df[static_cast<std::size_t>(c)] += 1;
  }
  t.rows.resize(documents.size());
  for (std::size_t i = 0; i < documents.size(); ++i) {
    const double len = static_cast<double>(documents[i].size());
    for (const auto& [c, n] : counts[i]) {
      const double tf = static_cast<double>(n) / len;
      const double idf = std::log(n_docs / (1.0 + df[static_cast<std::size_t>(c)]));
      const double v = tf * idf;
      if (v > 0.0) t.rows[i].emplace_back(c, v);
    }
  }
  return t;
}

std::vector<int> match_pois_to_segments(const MapBundle& bundle) {
  std::vector<int> out;
  out.reserve(bundle.pois.size());
  for (const auto& p : bundle.pois) out.push_back(snap_point_to_segment(p.location, bundle.segments));
  return out;
}

std::vector<int> match_pois_to_parcels(const MapBundle& bundle) {
  if (bundle.parcels.empty()) throw ValidationError("match_pois_to_parcels: no parcels");
  std::vector<int> out;
  out.reserve(bundle.pois.size());
  for (const auto& p : bundle.pois) {
    int found = -1;
    for (const auto& r : bundle.parcels) {
      if (point_in_ring(p.location, r.polygon)) {
        found = r.id;
        break;
      }
    }
    if (found < 0) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& r : bundle.parcels) {
        const double d = distance(p.location, r.centroid);
        if (found < 0 || (d < best && !nearly_equal_distance(d, best))) {
          found = r.id;
          best = d;
        }
      }
    }
    out.push_back(found);
  }
  return out;
}

TfidfTable compute_tfidf(EntityType type, const MapBundle& bundle) {
  const bool seg = type == EntityType::Segment;
  const std::size_t n = seg ? bundle.segments.size() : bundle.parcels.size();
  std::vector<std::vector<int>> docs(n);
  if (!bundle.pois.empty()) {
    const auto owner = seg ? match_pois_to_segments(bundle) : match_pois_to_parcels(bundle);
    for (std::size_t k = 0; k < bundle.pois.size(); ++k) {
      docs[static_cast<std::size_t>(owner[k])].push_back(bundle.pois[k].category);
    }
  }
  return tfidf_from_documents(docs, bundle.vocab.other_poi_category() + 1);
}

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  // Rounding can push identical vectors just past 1.
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

WeightedEdgeList build_function_graph(const TfidfTable& tfidf, int top_k, Relation relation) {
  if (top_k < 1) throw ValidationError("build_function_graph: top_k must be >= 1");
  const std::size_t n = tfidf.size();
  std::vector<std::vector<double>> dense(n);
  std::vector<double> norms(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    dense[i] = tfidf.dense(i);
    for (double v : dense[i]) norms[i] += v * v;
  }
  std::set<std::pair<int, int>> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    if (norms[i] == 0.0) continue;
    std::vector<std::pair<double, int>> cand;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || norms[j] == 0.0) continue;
      const double s = cosine_similarity(dense[i], dense[j]);
      if (s > 0.0) cand.emplace_back(s, static_cast<int>(j));
    }
    std::sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    const std::size_t keep = std::min(cand.size(), static_cast<std::size_t>(top_k));
    for (std::size_t k = 0; k < keep; ++k) {
      const int a = static_cast<int>(i);
      const int b = cand[k].second;
      pairs.emplace(a, b);
      pairs.emplace(b, a);
    }
  }
  WeightedEdgeList out{relation, {}};
  for (const auto& [a, b] : pairs) {
    // Recompute in canonical order so both directions carry identical weights.
    const int lo = std::min(a, b), hi = std::max(a, b);
    out.edges.push_back({a, b, cosine_similarity(dense[static_cast<std::size_t>(lo)],
                                                 dense[static_cast<std::size_t>(hi)])});
  }
  sort_and_check_unique(out);
  return out;
}

WeightedEdgeList transition_probabilities(const std::vector<std::vector<int>>& sequences, Relation relation) {
  std::map<int, std::map<int, long long>> counts;
  for (const auto& seq : sequences) {
    for (std::size_t k = 0; k + 1 < seq.size(); ++k) counts[seq[k]][seq[k + 1]] += 1;
  }
  WeightedEdgeList out{relation, {}};
  for (const auto& [src, row] : counts) {
    long long total = 0;
    for (const auto& [dst, c] : row) total += c;
    for (const auto& [dst, c] : row) {
      out.edges.push_back({src, dst, static_cast<double>(c) / static_cast<double>(total)});
    }
  }
  sort_and_check_unique(out);
  return out;
}

WeightedEdgeList build_segment_mobility(const std::vector<SegmentTrajectory>& trajectories) {
  std::vector<std::vector<int>> seqs;
  seqs.reserve(trajectories.size());
  for (const auto& t : trajectories) seqs.push_back(t.segment_ids);
  return transition_probabilities(seqs, Relation::SegMob);
}

Assignment assign_segments_to_parcels(const std::vector<RoadSegment>& segments,
                                      const std::vector<LandParcel>& parcels) {
  if (parcels.empty()) throw ValidationError("assign_segments_to_parcels: empty parcel set");
  Assignment a;
  a.sr.relation = Relation::SR;
  for (const auto& s : segments) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& r : parcels) {
      const double d = point_ring_boundary_distance(s.midpoint, r.polygon);
      if (best < 0 || (d < best_d && !nearly_equal_distance(d, best_d))) {
        best = r.id;
        best_d = d;
      }
    }
    const auto& r = parcels[static_cast<std::size_t>(best)];
    double angle = std::atan2(r.centroid.y - s.midpoint.y, r.centroid.x - s.midpoint.x);
    if (angle < 0.0) angle += 2.0 * std::numbers::pi;
    if (angle >= 2.0 * std::numbers::pi) angle = 0.0;
    a.sr.edges.push_back({s.id, best, 1.0});
    a.geometry.push_back({best, s.id, point_polyline_distance(r.centroid, s.polyline), angle});
    a.parcel_of_segment.push_back(best);
  }
  sort_and_check_unique(a.sr);
  return a;
}

std::vector<std::vector<int>> parcel_sequences(const std::vector<SegmentTrajectory>& trajectories,
                                               const std::vector<int>& parcel_of_segment) {
  std::vector<std::vector<int>> out;
  out.reserve(trajectories.size());
  for (const auto& t : trajectories) {
    std::vector<int> seq;
    for (int s : t.segment_ids) {
      const int p = parcel_of_segment.at(static_cast<std::size_t>(s));
      if (seq.empty() || seq.back() != p) seq.push_back(p);
    }
    out.push_back(std::move(seq));
  }
  return out;
}

WeightedEdgeList build_parcel_mobility(const std::vector<SegmentTrajectory>& trajectories,
                                       const std::vector<int>& parcel_of_segment) {
  return transition_probabilities(parcel_sequences(trajectories, parcel_of_segment), Relation::ParMob);
}

}  // namespace homegcl
