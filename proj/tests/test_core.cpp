#include <doctest.h>

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>

#include "homegcl/core/bundle_io.hpp"
#include "homegcl/core/csv.hpp"
#include "homegcl/core/error.hpp"
#include "homegcl/core/hash.hpp"
#include "homegcl/core/rng.hpp"
#include "homegcl/core/synthetic_city.hpp"
#include "test_util.hpp"

using namespace homegcl;

namespace {

RoadSegment make_segment(int id, Polyline line) {
  RoadSegment s;
  s.id = id;
  s.polyline = std::move(line);
  s.midpoint = arc_length_midpoint(s.polyline);
  s.raw_features = std::vector<double>(seg_feature::kCount, 0.0);
  return s;
}

std::string slurp(const std::filesystem::path& p) { return read_text_file(p); }

}  // namespace

TEST_CASE("geometry primitives") {
  const Polyline line = {{0, 0}, {3, 0}, {3, 4}};
  CHECK(polyline_length(line) == doctest::Approx(7.0));
  const Point mid = arc_length_midpoint(line);
  CHECK(mid.x == doctest::Approx(3.0));
  CHECK(mid.y == doctest::Approx(0.5));
  const Ring sq = {{0, 0}, {2, 0}, {2, 2}, {0, 2}, {0, 0}};
  CHECK(signed_area(sq) == doctest::Approx(4.0));
  CHECK(ring_centroid(sq).x == doctest::Approx(1.0));
  CHECK(point_in_ring({1, 1}, sq));
  CHECK(point_in_ring({2, 1}, sq));
  CHECK_FALSE(point_in_ring({3, 1}, sq));
  CHECK(point_ring_boundary_distance({1, 1}, sq) == doctest::Approx(1.0));
  CHECK(ring_is_simple(sq));
  const Ring bowtie = {{0, 0}, {2, 2}, {2, 0}, {0, 2}, {0, 0}};
  CHECK_FALSE(ring_is_simple(bowtie));
}

TEST_CASE("csv quoting and number round trip") {
  const auto t = csv::parse("a,b\n\"x,1\",\"he said \"\"hi\"\"\"\n", "mem");
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0][0] == "x,1");
  CHECK(t.rows[0][1] == "he said \"hi\"");
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const double v = rng.normal() * std::pow(10.0, static_cast<double>(rng.below(20)) - 10.0);
    CHECK(csv::parse_double(csv::format_double(v), "t") == v);
  }
}

TEST_CASE("rng state round trip and below range") {
  Rng a(42);
  for (int i = 0; i < 10; ++i) a.next_u64();
  Rng b(0);
  b.set_state(a.state());
  for (int i = 0; i < 10; ++i) CHECK(a.next_u64() == b.next_u64());
  for (int i = 0; i < 1000; ++i) CHECK(a.below(7) < 7u);
}

TEST_CASE("synthetic city counts") {
  const auto b = generate_synthetic_city({2, 2, 100.0, 0, 0, 1, 0});
  CHECK(b.parcels.size() == 4);
  CHECK(b.segments.size() == static_cast<std::size_t>(synthetic_segment_count(2, 2)));
  CHECK(b.segments.size() == 12);
  CHECK(b.pois.empty());
  CHECK(b.trajectories.empty());
}

TEST_CASE("synthetic city rejects degenerate grid") {
  CHECK_THROWS_AS(generate_synthetic_city({1, 1, 100.0, 0, 0, 1, 0}), ValidationError);
}

TEST_CASE("synthetic city is deterministic and byte identical") {
  const SynthSpec spec{4, 3, 100.0, 50, 20, 3, 9};
  const auto a = generate_synthetic_city(spec);
  const auto b = generate_synthetic_city(spec);
  CHECK(a == b);
  testutil::TempDir da("synth_a"), db("synth_b");
  save_bundle(a, da.path());
  save_bundle(b, db.path());
  for (const char* f : {"segments.csv", "parcels.csv", "pois.csv", "trajectories.jsonl", "vocab.json"}) {
    CHECK(slurp(da.path() / f) == slurp(db.path() / f));
  }
  const auto c = generate_synthetic_city({4, 3, 100.0, 50, 20, 3, 10});
  CHECK_FALSE(a == c);
}

TEST_CASE("synthetic parcels are simple axis-aligned rectangles") {
  const auto b = generate_synthetic_city({5, 4, 80.0, 100, 30, 4, 1});
  for (const auto& p : b.parcels) {
    REQUIRE(ring_is_closed(p.polygon));
    CHECK(ring_is_simple(p.polygon));
    CHECK(signed_area(p.polygon) > 0.0);
    for (std::size_t k = 0; k + 1 < p.polygon.size(); ++k) {
      const auto a = p.polygon[k], c = p.polygon[k + 1];
      CHECK((a.x == c.x || a.y == c.y));
    }
  }
  for (const auto& s : b.segments) {
    const auto m = arc_length_midpoint(s.polyline);
    CHECK(s.midpoint.x == doctest::Approx(m.x));
    CHECK(s.midpoint.y == doctest::Approx(m.y));
  }
}

TEST_CASE("synthetic POI categories depend on the planted class") {
  const auto b = generate_synthetic_city({8, 8, 100.0, 640, 0, 5, 4});
  const int n_classes = static_cast<int>(b.vocab.parcel_function.size());
  const int n_cats = static_cast<int>(b.vocab.poi_category.size());
  REQUIRE(n_classes == 5);
  // Contingency table of (class of containing parcel, POI category).
  std::vector<std::vector<double>> table(n_classes, std::vector<double>(n_cats, 0.0));
  for (const auto& poi : b.pois) {
    int cls = -1;
    for (const auto& p : b.parcels) {
      if (point_in_ring(poi.location, p.polygon)) {
        cls = static_cast<int>(p.raw_features[parcel_feature::kFunction]);
        break;
      }
    }
    REQUIRE(cls >= 0);
    table[cls][poi.category] += 1.0;
  }
  double total = 0.0;
  std::vector<double> rows(n_classes, 0.0), cols(n_cats, 0.0);
  for (int i = 0; i < n_classes; ++i) {
    for (int j = 0; j < n_cats; ++j) {
      rows[i] += table[i][j];
      cols[j] += table[i][j];
      total += table[i][j];
    }
  }
  double chi2 = 0.0;
  int dof_rows = 0, dof_cols = 0;
  for (int i = 0; i < n_classes; ++i) dof_rows += rows[i] > 0;
  for (int j = 0; j < n_cats; ++j) dof_cols += cols[j] > 0;
  for (int i = 0; i < n_classes; ++i) {
    for (int j = 0; j < n_cats; ++j) {
      const double e = rows[i] * cols[j] / total;
      if (e > 0) chi2 += (table[i][j] - e) * (table[i][j] - e) / e;
    }
  }
  // Under independence chi2 has mean = dof and sd = sqrt(2 dof).
  const double dof = static_cast<double>((dof_rows - 1) * (dof_cols - 1));
  CHECK(chi2 > dof + 10.0 * std::sqrt(2.0 * dof));
}

TEST_CASE("bundle round trip through files") {
  const auto a = generate_synthetic_city({4, 4, 100.0, 80, 40, 3, 5});
  testutil::TempDir d("rt");
  save_bundle(a, d.path());
  const auto b = load_bundle(d.path());
  CHECK(a == b);
  testutil::TempDir d2("rt2");
  save_bundle(b, d2.path());
  const auto c = load_bundle(d2.path());
  CHECK(b == c);
  CHECK(slurp(d.path() / "segments.csv") == slurp(d2.path() / "segments.csv"));
}

TEST_CASE("empty trajectory file loads as an empty set") {
  const auto a = generate_synthetic_city({2, 2, 100.0, 10, 5, 2, 1});
  testutil::TempDir d("empty_traj");
  save_bundle(a, d.path());
  std::ofstream(d.path() / "trajectories.jsonl", std::ios::trunc).close();
  const auto b = load_bundle(d.path());
  CHECK(b.trajectories.empty());
  CHECK(b.segments.size() == a.segments.size());
}

TEST_CASE("dangling trajectory id is a validation error") {
  const auto a = generate_synthetic_city({2, 2, 100.0, 10, 0, 2, 1});
  testutil::TempDir d("dangling");
  save_bundle(a, d.path());
  std::ofstream(d.path() / "trajectories.jsonl") << "{\"id\": 0, \"segment_ids\": [1, 999]}\n";
  try {
    load_bundle(d.path());
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("999") != std::string::npos);
  }
}

TEST_CASE("missing bundle file names the file") {
  const auto a = generate_synthetic_city({2, 2, 100.0, 10, 0, 2, 1});
  testutil::TempDir d("missing");
  save_bundle(a, d.path());
  std::filesystem::remove(d.path() / "pois.csv");
  try {
    load_bundle(d.path());
    FAIL("expected a load error");
  } catch (const LoadError& e) {
    CHECK(std::string(e.what()).find("pois.csv") != std::string::npos);
  }
}

TEST_CASE("unknown categorical codes map to other") {
  const auto a = generate_synthetic_city({2, 2, 100.0, 10, 0, 2, 1});
  testutil::TempDir d("other");
  save_bundle(a, d.path());
  auto text = slurp(d.path() / "pois.csv");
  const auto t = csv::parse(text, "pois");
  std::ofstream out(d.path() / "pois.csv", std::ios::trunc);
  csv::write_row(out, t.header);
  for (auto row : t.rows) {
    row[3] = "77";
    csv::write_row(out, row);
  }
  out.close();
  const auto b = load_bundle(d.path());
  for (const auto& p : b.pois) CHECK(p.category == b.vocab.other_poi_category());
}

TEST_CASE("lon/lat frame is projected to planar meters") {
  testutil::TempDir d("lonlat");
  const auto a = generate_synthetic_city({2, 2, 100.0, 0, 0, 1, 1});
  save_bundle(a, d.path());
  // Rewrite geometry as degrees on a mean-radius sphere.
  auto vocab = slurp(d.path() / "vocab.json");
  const auto pos = vocab.find("planar_m");
  REQUIRE(pos != std::string::npos);
  vocab.replace(pos, 8, "lonlat_deg");
  write_text_file(d.path() / "vocab.json", vocab);
  const double deg = 180.0 / (std::numbers::pi * 6371008.8);
  auto seg = csv::read_file(d.path() / "segments.csv");
  std::ofstream out(d.path() / "segments.csv", std::ios::trunc);
  csv::write_row(out, seg.header);
  for (auto row : seg.rows) {
    Polyline line = parse_wkt_linestring(row[1]);
    for (auto& p : line) p = Point{p.x * deg, p.y * deg};
    row[1] = to_wkt_linestring(line);
    csv::write_row(out, row);
  }
  out.close();
  auto par = csv::read_file(d.path() / "parcels.csv");
  std::ofstream out2(d.path() / "parcels.csv", std::ios::trunc);
  csv::write_row(out2, par.header);
  for (auto row : par.rows) {
    Ring ring = parse_wkt_polygon(row[1]);
    for (auto& p : ring) p = Point{p.x * deg, p.y * deg};
    row[1] = to_wkt_polygon(ring);
    csv::write_row(out2, row);
  }
  out2.close();
  const auto b = load_bundle(d.path());
  CHECK(b.frame == kFramePlanar);
  CHECK(polyline_length(b.segments[0].polyline) == doctest::Approx(100.0).epsilon(1e-3));
}

TEST_CASE("snap_point_to_segment") {
  std::vector<RoadSegment> segs;
  for (int i = 0; i < 10; ++i) segs.push_back(make_segment(i, {{0, 10.0 * i}, {50, 10.0 * i}}));

  SUBCASE("midpoint maps to its own segment") {
    for (const auto& s : segs) CHECK(snap_point_to_segment(s.midpoint, segs) == s.id);
  }
  SUBCASE("tie goes to the lowest id") {
    std::vector<RoadSegment> two = {make_segment(0, {{0, 0}, {1, 0}})};
    for (int i = 1; i < 8; ++i) two.push_back(make_segment(i, {{100.0 * i, 100}, {100.0 * i + 1, 100}}));
    two[3] = make_segment(3, {{0, 10}, {10, 10}});
    two[7] = make_segment(7, {{0, -10}, {10, -10}});
    two[0] = make_segment(0, {{500, 500}, {501, 500}});
    CHECK(snap_point_to_segment({5, 0}, two) == 3);
  }
  SUBCASE("matches exhaustive scan") {
    Rng rng(11);
    std::vector<RoadSegment> random_segs;
    for (int i = 0; i < 15; ++i) {
      random_segs.push_back(make_segment(
          i, {{rng.uniform(0, 100), rng.uniform(0, 100)}, {rng.uniform(0, 100), rng.uniform(0, 100)},
              {rng.uniform(0, 100), rng.uniform(0, 100)}}));
    }
    for (int t = 0; t < 100; ++t) {
      const Point p{rng.uniform(-20, 120), rng.uniform(-20, 120)};
      // Independent scan: distance to each vertex pair by projection.
      int best = -1;
      double best_d = 1e300;
      for (const auto& s : random_segs) {
        double d = 1e300;
        for (std::size_t k = 0; k + 1 < s.polyline.size(); ++k) {
          const auto a = s.polyline[k], b = s.polyline[k + 1];
          const double vx = b.x - a.x, vy = b.y - a.y;
          double u = ((p.x - a.x) * vx + (p.y - a.y) * vy) / (vx * vx + vy * vy);
          u = std::clamp(u, 0.0, 1.0);
          d = std::min(d, std::hypot(a.x + u * vx - p.x, a.y + u * vy - p.y));
        }
        if (d < best_d) {
          best_d = d;
          best = s.id;
        }
      }
      CHECK(snap_point_to_segment(p, random_segs) == best);
    }
  }
  SUBCASE("empty set is an error") {
    CHECK_THROWS_AS(snap_point_to_segment({0, 0}, {}), ValidationError);
  }
}

TEST_CASE("sha256 known vector") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
