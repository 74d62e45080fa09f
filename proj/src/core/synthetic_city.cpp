#include "homegcl/core/synthetic_city.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "homegcl/core/error.hpp"
#include "homegcl/core/rng.hpp"

namespace homegcl {

namespace {

constexpr int kPoiCategoriesPerClass = 3;
constexpr double kPoiOwnClassProb = 0.6;
constexpr double kClassNoiseProb = 0.15;
constexpr double kSameZoneWalkBias = 4.0;
constexpr int kMajorLineEvery = 4;

enum SegmentCategory { kPrimary = 0, kSecondary = 1, kResidential = 2 };

}  // namespace

MapBundle generate_synthetic_city(const SynthSpec& spec) {
  if (spec.grid_w < 2 || spec.grid_h < 2) {
    throw ValidationError("synthetic city needs grid_w, grid_h >= 2");
  }
  if (!(spec.cell_size_m > 0.0)) throw ValidationError("synthetic city needs cell_size_m > 0");
  if (spec.n_function_classes < 1) throw ValidationError("synthetic city needs n_function_classes >= 1");
  if (spec.n_pois < 0 || spec.n_trajectories < 0) throw ValidationError("synthetic city counts must be >= 0");

  Rng rng(spec.seed);
  const int w = spec.grid_w;
  const int h = spec.grid_h;
  const int n_cells = w * h;
  const int n_classes = spec.n_function_classes;
  const double cell = spec.cell_size_m;

  MapBundle b;
  b.vocab.segment_category = {"primary", "secondary", "residential"};
  for (int c = 0; c < n_classes; ++c) b.vocab.parcel_function.push_back("class_" + std::to_string(c));
  for (int k = 0; k < n_classes * kPoiCategoriesPerClass; ++k) {
    b.vocab.poi_category.push_back("poi_" + std::to_string(k));
  }

  // Planted classes: Voronoi zones around random seed cells, plus label noise.
  std::vector<int> seed_cells;
  {
    const auto perm = rng.permutation(n_cells);
    for (int c = 0; c < std::min(n_classes, n_cells); ++c) seed_cells.push_back(perm[static_cast<std::size_t>(c)]);
  }
  std::vector<int> cell_class(static_cast<std::size_t>(n_cells));
  for (int id = 0; id < n_cells; ++id) {
    const int ci = id % w;
    const int cj = id / w;
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < seed_cells.size(); ++c) {
      const int si = seed_cells[c] % w;
      const int sj = seed_cells[c] / w;
      const double d = std::hypot(ci - si, cj - sj);
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    cell_class[static_cast<std::size_t>(id)] = best;
  }
  for (int id = 0; id < n_cells; ++id) {
    if (rng.bernoulli(kClassNoiseProb)) {
      cell_class[static_cast<std::size_t>(id)] = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_classes)));
    }
  }

  // Parcels: one axis-aligned rectangle per cell, row-major ids.
  const Point center{0.5 * w * cell, 0.5 * h * cell};
  const double cbd_radius = 0.25 * std::min(w, h) * cell;
  for (int id = 0; id < n_cells; ++id) {
    const int i = id % w;
    const int j = id / w;
    const double x0 = i * cell, x1 = (i + 1) * cell, y0 = j * cell, y1 = (j + 1) * cell;
    LandParcel p;
    p.id = id;
    p.polygon = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}, {x0, y0}};
    p.centroid = ring_centroid(p.polygon);
    const int cls = cell_class[static_cast<std::size_t>(id)];
    const double buildings = std::max(0.0, std::round(8.0 + 1.5 * (cls % 3) + 3.0 * rng.normal()));
    const double floors = std::max(1.0, std::round(10.0 * (3.0 + 0.5 * (cls % 2) + 1.5 * rng.normal())) / 10.0);
    p.raw_features = {static_cast<double>(cls),
                      distance(p.centroid, center) <= cbd_radius ? 1.0 : 0.0,
                      buildings,
                      floors,
                      std::abs(signed_area(p.polygon)),
                      p.centroid.x,
                      p.centroid.y};
    b.parcels.push_back(std::move(p));
  }

  // Segments: horizontal streets first, then vertical. Each segment remembers
  // the lowest-id adjacent cell, which is also its nearest parcel.
  std::vector<int> zone_of_segment;
  auto add_segment = [&](Point a, Point c, bool major, int cell_lo, int cell_hi) {
    RoadSegment s;
    s.id = static_cast<int>(b.segments.size());
    s.polyline = {a, c};
    s.midpoint = arc_length_midpoint(s.polyline);
    int category = kResidential;
    if (major) {
      category = kPrimary;
    } else if (cell_lo >= 0 && cell_hi >= 0 &&
               cell_class[static_cast<std::size_t>(cell_lo)] != cell_class[static_cast<std::size_t>(cell_hi)]) {
      category = kSecondary;
    }
    static constexpr double kLanes[] = {4.0, 2.0, 1.0};
    static constexpr double kSpeed[] = {60.0, 50.0, 30.0};
    const double lanes = kLanes[category] + static_cast<double>(rng.below(2));
    const double speed = kSpeed[category] + 5.0 * static_cast<double>(rng.below(3));
    s.raw_features = {static_cast<double>(category), polyline_length(s.polyline), lanes, speed,
                      s.midpoint.x, s.midpoint.y};
    b.segments.push_back(std::move(s));
    const int zone_cell = cell_lo >= 0 ? cell_lo : cell_hi;
    zone_of_segment.push_back(cell_class[static_cast<std::size_t>(zone_cell)]);
  };
  for (int j = 0; j <= h; ++j) {
    for (int i = 0; i < w; ++i) {
      const int below = j > 0 ? (j - 1) * w + i : -1;
      const int above = j < h ? j * w + i : -1;
      add_segment({i * cell, j * cell}, {(i + 1) * cell, j * cell}, j % kMajorLineEvery == 0, below, above);
    }
  }
  for (int i = 0; i <= w; ++i) {
    for (int j = 0; j < h; ++j) {
      const int left = i > 0 ? j * w + (i - 1) : -1;
      const int right = i < w ? j * w + i : -1;
      add_segment({i * cell, j * cell}, {i * cell, (j + 1) * cell}, i % kMajorLineEvery == 0, left, right);
    }
  }

  // POIs inside a random parcel, category biased toward the parcel's class.
  const int n_poi_cats = n_classes * kPoiCategoriesPerClass;
  const double inset = 0.05 * cell;
  for (int k = 0; k < spec.n_pois; ++k) {
    const int cell_id = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_cells)));
    const int i = cell_id % w;
    const int j = cell_id / w;
    Poi p;
    p.id = k;
    p.location = Point{rng.uniform(i * cell + inset, (i + 1) * cell - inset),
                       rng.uniform(j * cell + inset, (j + 1) * cell - inset)};
    const int cls = cell_class[static_cast<std::size_t>(cell_id)];
    if (rng.bernoulli(kPoiOwnClassProb)) {
      p.category = cls * kPoiCategoriesPerClass + static_cast<int>(rng.below(kPoiCategoriesPerClass));
    } else {
      p.category = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_poi_cats)));
    }
    b.pois.push_back(p);
  }

  // Random walks on segment adjacency that prefer staying in the start zone.
  const auto adj = shared_endpoint_adjacency(b.segments);
  const int n_seg = static_cast<int>(b.segments.size());
  for (int t = 0; t < spec.n_trajectories; ++t) {
    SegmentTrajectory traj;
    traj.id = t;
    int cur = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_seg)));
    const int zone = zone_of_segment[static_cast<std::size_t>(cur)];
    const int length = 2 + static_cast<int>(rng.below(10));
    int prev = -1;
    traj.segment_ids.push_back(cur);
    while (static_cast<int>(traj.segment_ids.size()) < length) {
      std::vector<int> options;
      for (int nb : adj[static_cast<std::size_t>(cur)]) {
        if (nb != prev) options.push_back(nb);
      }
      if (options.empty()) options = adj[static_cast<std::size_t>(cur)];
      if (options.empty()) break;
      std::vector<double> weights;
      for (int nb : options) {
        weights.push_back(zone_of_segment[static_cast<std::size_t>(nb)] == zone ? kSameZoneWalkBias : 1.0);
      }
      prev = cur;
      cur = options[rng.categorical(weights)];
      traj.segment_ids.push_back(cur);
    }
    b.trajectories.push_back(std::move(traj));
  }

  b.segment_schema = segment_schema_for(b.vocab, b.segments);
  b.parcel_schema = parcel_schema_for(b.vocab, b.parcels);
  return b;
}

}  // namespace homegcl
