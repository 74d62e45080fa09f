#include "homegcl/core/bundle_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "homegcl/core/csv.hpp"
#include "homegcl/core/error.hpp"

namespace homegcl {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

// Parses "x y, x y, ..." into points.
std::vector<Point> parse_coords(const std::string& body, const std::string& wkt) {
  std::vector<Point> pts;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::istringstream ps(trim(item));
    std::string xs, ys;
    ps >> xs >> ys;
    if (xs.empty() || ys.empty()) throw LoadError("malformed WKT coordinates: " + wkt);
    pts.push_back(Point{csv::parse_double(xs, "WKT"), csv::parse_double(ys, "WKT")});
  }
  return pts;
}

std::string body_between(const std::string& wkt, const std::string& keyword, int depth) {
  std::string upper = wkt;
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  const auto k = upper.find(keyword);
  if (k == std::string::npos) throw LoadError("expected " + keyword + " WKT: " + wkt);
  std::size_t open = k + keyword.size();
  for (int d = 0; d < depth; ++d) {
    open = wkt.find('(', open);
    if (open == std::string::npos) throw LoadError("malformed WKT: " + wkt);
    ++open;
  }
  const auto close = wkt.find(')', open);
  if (close == std::string::npos) throw LoadError("malformed WKT: " + wkt);
  return wkt.substr(open, close - open);
}

std::string coords_to_string(const std::vector<Point>& pts) {
  std::string s;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) s += ", ";
    s += csv::format_double(pts[i].x);
    s += ' ';
    s += csv::format_double(pts[i].y);
  }
  return s;
}

int map_code(double raw, int vocab_size) {
  const auto code = static_cast<long long>(raw);
  if (static_cast<double>(code) != raw || code < 0 || code >= vocab_size) return vocab_size;
  return static_cast<int>(code);
}

void require_file(const fs::path& p) {
  if (!fs::exists(p)) throw LoadError("missing bundle file: " + p.string());
}

template <typename Row>
std::map<long long, int> dense_ids(std::vector<std::pair<long long, Row>>& rows, const std::string& what) {
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::map<long long, int> ids;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!ids.emplace(rows[i].first, static_cast<int>(i)).second) {
      throw ValidationError(what + ": duplicate id " + std::to_string(rows[i].first));
    }
  }
  return ids;
}

}  // namespace

std::string to_wkt_linestring(const Polyline& line) { return "LINESTRING (" + coords_to_string(line) + ")"; }

std::string to_wkt_polygon(const Ring& ring) { return "POLYGON ((" + coords_to_string(ring) + "))"; }

Polyline parse_wkt_linestring(const std::string& wkt) {
  return parse_coords(body_between(wkt, "LINESTRING", 1), wkt);
}

Ring parse_wkt_polygon(const std::string& wkt) {
  return parse_coords(body_between(wkt, "POLYGON", 2), wkt);
}

MapBundle load_bundle(const fs::path& dir) {
  const fs::path vocab_path = dir / "vocab.json";
  const fs::path seg_path = dir / "segments.csv";
  const fs::path par_path = dir / "parcels.csv";
  const fs::path poi_path = dir / "pois.csv";
  const fs::path traj_path = dir / "trajectories.jsonl";
  for (const auto& p : {vocab_path, seg_path, par_path, poi_path, traj_path}) require_file(p);

  MapBundle b;
  {
    std::ifstream in(vocab_path);
    json v;
    try {
      in >> v;
      b.vocab.segment_category = v.at("segment_category").get<std::vector<std::string>>();
      b.vocab.parcel_function = v.at("parcel_function").get<std::vector<std::string>>();
      b.vocab.poi_category = v.at("poi_category").get<std::vector<std::string>>();
      b.frame = v.value("frame", std::string(kFramePlanar));
    } catch (const json::exception& e) {
      throw LoadError(vocab_path.string() + ": " + e.what());
    }
    if (b.frame != kFramePlanar && b.frame != kFrameLonLat) {
      throw LoadError(vocab_path.string() + ": unknown frame '" + b.frame + "'");
    }
  }

  // Segments.
  const auto seg_table = csv::read_file(seg_path);
  const std::string seg_src = seg_path.string();
  std::vector<std::pair<long long, RoadSegment>> seg_rows;
  {
    const std::size_t c_id = seg_table.column("id", seg_src);
    const std::size_t c_wkt = seg_table.column("wkt_linestring", seg_src);
    const std::vector<std::size_t> c_feat = {
        seg_table.column("category", seg_src), seg_table.column("length_m", seg_src),
        seg_table.column("lanes", seg_src),    seg_table.column("max_speed", seg_src),
        seg_table.column("lon", seg_src),      seg_table.column("lat", seg_src)};
    for (const auto& row : seg_table.rows) {
      RoadSegment s;
      s.polyline = parse_wkt_linestring(row[c_wkt]);
      for (std::size_t c : c_feat) s.raw_features.push_back(csv::parse_double(row[c], seg_src));
      s.raw_features[seg_feature::kCategory] =
          map_code(s.raw_features[seg_feature::kCategory], b.vocab.other_segment_category());
      seg_rows.emplace_back(csv::parse_int(row[c_id], seg_src), std::move(s));
    }
  }
  const auto seg_ids = dense_ids(seg_rows, seg_src);

  // Parcels.
  const auto par_table = csv::read_file(par_path);
  const std::string par_src = par_path.string();
  std::vector<std::pair<long long, LandParcel>> par_rows;
  {
    const std::size_t c_id = par_table.column("id", par_src);
    const std::size_t c_wkt = par_table.column("wkt_polygon", par_src);
    const std::vector<std::size_t> c_feat = {
        par_table.column("function", par_src),   par_table.column("cbd_flag", par_src),
        par_table.column("n_buildings", par_src), par_table.column("avg_floors", par_src),
        par_table.column("area_m2", par_src),    par_table.column("lon", par_src),
        par_table.column("lat", par_src)};
    for (const auto& row : par_table.rows) {
      LandParcel p;
      p.polygon = parse_wkt_polygon(row[c_wkt]);
      for (std::size_t c : c_feat) p.raw_features.push_back(csv::parse_double(row[c], par_src));
      p.raw_features[parcel_feature::kFunction] =
          map_code(p.raw_features[parcel_feature::kFunction], b.vocab.other_parcel_function());
      p.raw_features[parcel_feature::kCbd] = p.raw_features[parcel_feature::kCbd] != 0.0 ? 1.0 : 0.0;
      par_rows.emplace_back(csv::parse_int(row[c_id], par_src), std::move(p));
    }
  }
  dense_ids(par_rows, par_src);

  // POIs.
  const auto poi_table = csv::read_file(poi_path);
  const std::string poi_src = poi_path.string();
  std::vector<std::pair<long long, Poi>> poi_rows;
  {
    const std::size_t c_id = poi_table.column("id", poi_src);
    const std::size_t c_x = poi_table.column("x", poi_src);
    const std::size_t c_y = poi_table.column("y", poi_src);
    const std::size_t c_cat = poi_table.column("category", poi_src);
    for (const auto& row : poi_table.rows) {
      Poi p;
      p.location = Point{csv::parse_double(row[c_x], poi_src), csv::parse_double(row[c_y], poi_src)};
      p.category = map_code(csv::parse_double(row[c_cat], poi_src), b.vocab.other_poi_category());
      poi_rows.emplace_back(csv::parse_int(row[c_id], poi_src), p);
    }
  }
  dense_ids(poi_rows, poi_src);

  // Trajectories.
  std::vector<std::pair<long long, SegmentTrajectory>> traj_rows;
  std::vector<std::string> dangling;
  {
    std::ifstream in(traj_path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (trim(line).empty()) continue;
      json j;
      try {
        j = json::parse(line);
      } catch (const json::exception& e) {
        throw LoadError(traj_path.string() + ":" + std::to_string(lineno) + ": " + e.what());
      }
      SegmentTrajectory t;
      long long tid = 0;
      try {
        tid = j.at("id").get<long long>();
        for (long long sid : j.at("segment_ids").get<std::vector<long long>>()) {
          auto it = seg_ids.find(sid);
          if (it == seg_ids.end()) {
            dangling.push_back("trajectory " + std::to_string(tid) + " -> segment " + std::to_string(sid));
          } else {
            t.segment_ids.push_back(it->second);
          }
        }
      } catch (const json::exception& e) {
        throw LoadError(traj_path.string() + ":" + std::to_string(lineno) + ": " + e.what());
      }
      traj_rows.emplace_back(tid, std::move(t));
    }
  }
  if (!dangling.empty()) {
    std::ostringstream os;
    os << "dangling trajectory segment ids:";
    for (const auto& d : dangling) os << "\n  " << d;
    throw ValidationError(os.str());
  }
  dense_ids(traj_rows, traj_path.string());

  for (std::size_t i = 0; i < seg_rows.size(); ++i) {
    seg_rows[i].second.id = static_cast<int>(i);
    b.segments.push_back(std::move(seg_rows[i].second));
  }
  for (std::size_t i = 0; i < par_rows.size(); ++i) {
    par_rows[i].second.id = static_cast<int>(i);
    b.parcels.push_back(std::move(par_rows[i].second));
  }
  for (std::size_t i = 0; i < poi_rows.size(); ++i) {
    poi_rows[i].second.id = static_cast<int>(i);
    b.pois.push_back(poi_rows[i].second);
  }
  for (std::size_t i = 0; i < traj_rows.size(); ++i) {
    traj_rows[i].second.id = static_cast<int>(i);
    b.trajectories.push_back(std::move(traj_rows[i].second));
  }

  if (b.frame == kFrameLonLat) {
    // Project around the mean segment vertex.
    double lon = 0.0, lat = 0.0;
    std::size_t n = 0;
    for (const auto& s : b.segments) {
      for (const auto& p : s.polyline) {
        lon += p.x;
        lat += p.y;
        ++n;
      }
    }
    Equirectangular proj{n ? lon / static_cast<double>(n) : 0.0, n ? lat / static_cast<double>(n) : 0.0};
    for (auto& s : b.segments) {
      for (auto& p : s.polyline) p = proj.project(p.x, p.y);
    }
    for (auto& r : b.parcels) {
      for (auto& p : r.polygon) p = proj.project(p.x, p.y);
    }
    for (auto& p : b.pois) p.location = proj.project(p.location.x, p.location.y);
    b.frame = kFramePlanar;
  }

  for (auto& s : b.segments) {
    if (s.polyline.size() >= 2) s.midpoint = arc_length_midpoint(s.polyline);
  }
  for (auto& r : b.parcels) {
    if (r.polygon.size() >= 3) r.centroid = ring_centroid(r.polygon);
  }
  b.segment_schema = segment_schema_for(b.vocab, b.segments);
  b.parcel_schema = parcel_schema_for(b.vocab, b.parcels);
  validate_bundle(b);
  return b;
}

void save_bundle(const MapBundle& b, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create directory " + dir.string() + ": " + ec.message());

  auto open = [](const fs::path& p) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + p.string());
    return out;
  };
  {
    auto out = open(dir / "segments.csv");
    csv::write_row(out, {"id", "wkt_linestring", "category", "length_m", "lanes", "max_speed", "lon", "lat"});
    for (const auto& s : b.segments) {
      std::vector<std::string> f = {std::to_string(s.id), to_wkt_linestring(s.polyline)};
      for (double v : s.raw_features) f.push_back(csv::format_double(v));
      csv::write_row(out, f);
    }
  }
  {
    auto out = open(dir / "parcels.csv");
    csv::write_row(out, {"id", "wkt_polygon", "function", "cbd_flag", "n_buildings", "avg_floors", "area_m2",
                         "lon", "lat"});
    for (const auto& p : b.parcels) {
      std::vector<std::string> f = {std::to_string(p.id), to_wkt_polygon(p.polygon)};
      for (double v : p.raw_features) f.push_back(csv::format_double(v));
      csv::write_row(out, f);
    }
  }
  {
    auto out = open(dir / "pois.csv");
    csv::write_row(out, {"id", "x", "y", "category"});
    for (const auto& p : b.pois) {
      csv::write_row(out, {std::to_string(p.id), csv::format_double(p.location.x),
                           csv::format_double(p.location.y), std::to_string(p.category)});
    }
  }
  {
    auto out = open(dir / "trajectories.jsonl");
    for (const auto& t : b.trajectories) {
      json j;
      j["id"] = t.id;
      j["segment_ids"] = t.segment_ids;
      out << j.dump() << '\n';
    }
  }
  {
    auto out = open(dir / "vocab.json");
    json v;
    v["frame"] = b.frame;
    v["segment_category"] = b.vocab.segment_category;
    v["parcel_function"] = b.vocab.parcel_function;
    v["poi_category"] = b.vocab.poi_category;
    out << v.dump(2) << '\n';
  }
}

}  // namespace homegcl
