#include "homegcl/graph/graph_io.hpp"

#include <map>
#include <sstream>

#include "homegcl/core/csv.hpp"
#include "homegcl/core/error.hpp"
#include "homegcl/core/hash.hpp"

namespace homegcl {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string nodes_csv(const RowMatrix& m, const std::vector<FeatureSchema>& schema) {
  std::ostringstream os;
  std::vector<std::string> header = {"id"};
  for (const auto& s : schema) header.push_back(s.name);
  csv::write_row(os, header);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<std::string> row = {std::to_string(i)};
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(csv::format_double(m(i, k)));
    csv::write_row(os, row);
  }
  return os.str();
}

std::string edges_csv(const WeightedEdgeList& list) {
  std::ostringstream os;
  csv::write_row(os, {"src", "dst", "weight"});
  for (const auto& e : list.edges) {
    csv::write_row(os, {std::to_string(e.src), std::to_string(e.dst), csv::format_double(e.weight)});
  }
  return os.str();
}

std::string geometry_csv(const std::vector<SrGeometry>& geo) {
  std::ostringstream os;
  csv::write_row(os, {"parcel_id", "segment_id", "distance_m", "angle_rad"});
  for (const auto& g : geo) {
    csv::write_row(os, {std::to_string(g.parcel), std::to_string(g.segment), csv::format_double(g.distance_m),
                        csv::format_double(g.angle_rad)});
  }
  return os.str();
}

// File name -> content, in a fixed order.
std::vector<std::pair<std::string, std::string>> serialized_files(const HomeGraph& g) {
  std::vector<std::pair<std::string, std::string>> files;
  files.emplace_back("nodes_segments.csv", nodes_csv(g.segment_features, g.segment_schema));
  files.emplace_back("nodes_parcels.csv", nodes_csv(g.parcel_features, g.parcel_schema));
  for (Relation r : kAllRelations) {
    files.emplace_back("edges_" + std::string(relation_name(r)) + ".csv", edges_csv(g.relation(r)));
  }
  files.emplace_back("sr_geometry.csv", geometry_csv(g.geometry));
  return files;
}

std::string hash_files(const std::vector<std::pair<std::string, std::string>>& files) {
  std::string all;
  for (const auto& [name, content] : files) {
    all += name;
    all += '\n';
    all += std::to_string(content.size());
    all += '\n';
    all += content;
  }
  return sha256_hex(all);
}

RowMatrix load_nodes(const fs::path& p, std::size_t n_cols) {
  const auto t = csv::read_file(p);
  if (t.header.size() != n_cols + 1) throw LoadError(p.string() + ": unexpected column count");
  RowMatrix m(static_cast<Eigen::Index>(t.rows.size()), static_cast<Eigen::Index>(n_cols));
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    if (csv::parse_int(t.rows[i][0], p.string()) != static_cast<long long>(i)) {
      throw LoadError(p.string() + ": node ids must be dense and ordered");
    }
    for (std::size_t k = 0; k < n_cols; ++k) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = csv::parse_double(t.rows[i][k + 1], p.string());
    }
  }
  return m;
}

WeightedEdgeList load_edges(const fs::path& p, Relation r) {
  const auto t = csv::read_file(p);
  const auto cs = t.column("src", p.string());
  const auto cd = t.column("dst", p.string());
  const auto cw = t.column("weight", p.string());
  WeightedEdgeList list{r, {}};
  for (const auto& row : t.rows) {
    list.edges.push_back(Edge{static_cast<int>(csv::parse_int(row[cs], p.string())),
                              static_cast<int>(csv::parse_int(row[cd], p.string())),
                              csv::parse_double(row[cw], p.string())});
  }
  return list;
}

}  // namespace

json graph_config_to_json(const GraphConfig& c) {
  json j;
  j["epsilon"] = c.epsilon;
  j["epsilon_r"] = c.epsilon_r ? json(*c.epsilon_r) : json(nullptr);
  j["top_k"] = c.top_k;
  j["exclude_segment_label"] = c.exclude_segment_label;
  j["exclude_parcel_label"] = c.exclude_parcel_label;
  return j;
}

GraphConfig graph_config_from_json(const json& j) {
  GraphConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "epsilon") {
      c.epsilon = value.get<double>();
    } else if (key == "epsilon_r") {
      if (value.is_null()) c.epsilon_r.reset();
      else c.epsilon_r = value.get<double>();
    } else if (key == "top_k") {
      c.top_k = value.get<int>();
    } else if (key == "exclude_segment_label") {
      c.exclude_segment_label = value.get<bool>();
    } else if (key == "exclude_parcel_label") {
      c.exclude_parcel_label = value.get<bool>();
    } else {
      throw ConfigError("unknown key graph." + key);
    }
  }
  return c;
}

json schema_to_json(const std::vector<FeatureSchema>& schema) {
  json arr = json::array();
  for (const auto& s : schema) {
    arr.push_back({{"name", s.name},
                   {"kind", s.kind == FeatureKind::Categorical ? "categorical" : "continuous"},
                   {"cardinality", s.cardinality},
                   {"min", s.min},
                   {"max", s.max},
                   {"mean", s.mean},
                   {"stddev", s.stddev}});
  }
  return arr;
}

std::vector<FeatureSchema> schema_from_json(const json& j) {
  std::vector<FeatureSchema> out;
  for (const auto& e : j) {
    FeatureSchema s;
    s.name = e.at("name").get<std::string>();
    const auto kind = e.at("kind").get<std::string>();
    if (kind != "categorical" && kind != "continuous") throw LoadError("unknown feature kind " + kind);
    s.kind = kind == "categorical" ? FeatureKind::Categorical : FeatureKind::Continuous;
    s.cardinality = e.at("cardinality").get<int>();
    s.min = e.at("min").get<double>();
    s.max = e.at("max").get<double>();
    s.mean = e.at("mean").get<double>();
    s.stddev = e.at("stddev").get<double>();
    out.push_back(s);
  }
  return out;
}

std::string home_graph_content_hash(const HomeGraph& g) { return hash_files(serialized_files(g)); }

void save_home_graph(const HomeGraph& g, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create directory " + dir.string() + ": " + ec.message());
  const auto files = serialized_files(g);
  for (const auto& [name, content] : files) write_text_file(dir / name, content);

  json meta;
  meta["counts"] = {{"segments", g.n_segments()}, {"parcels", g.n_parcels()}};
  json edges;
  for (Relation r : kAllRelations) edges[std::string(relation_name(r))] = g.relation(r).size();
  meta["counts"]["edges"] = edges;
  meta["config"] = graph_config_to_json(g.config);
  meta["epsilon_r_used"] = g.epsilon_r;
  meta["segment_schema"] = schema_to_json(g.segment_schema);
  meta["parcel_schema"] = schema_to_json(g.parcel_schema);
  meta["content_hash"] = hash_files(files);
  write_text_file(dir / "meta.json", meta.dump(2) + "\n");
}

HomeGraph load_home_graph(const fs::path& dir) {
  const auto meta_path = dir / "meta.json";
  if (!fs::exists(meta_path)) throw LoadError("missing graph file: " + meta_path.string());
  json meta;
  try {
    meta = json::parse(read_text_file(meta_path));
  } catch (const json::exception& e) {
    throw LoadError(meta_path.string() + ": " + e.what());
  }
  HomeGraph g;
  try {
    g.config = graph_config_from_json(meta.at("config"));
    g.epsilon_r = meta.at("epsilon_r_used").get<double>();
    g.segment_schema = schema_from_json(meta.at("segment_schema"));
    g.parcel_schema = schema_from_json(meta.at("parcel_schema"));
  } catch (const json::exception& e) {
    throw LoadError(meta_path.string() + ": " + e.what());
  }
  auto need = [&](const std::string& name) {
    const auto p = dir / name;
    if (!fs::exists(p)) throw LoadError("missing graph file: " + p.string());
    return p;
  };
  g.segment_features = load_nodes(need("nodes_segments.csv"), g.segment_schema.size());
  g.parcel_features = load_nodes(need("nodes_parcels.csv"), g.parcel_schema.size());
  g.segment_graph.type = EntityType::Segment;
  g.segment_graph.n = static_cast<int>(g.segment_features.rows());
  g.parcel_graph.type = EntityType::Parcel;
  g.parcel_graph.n = static_cast<int>(g.parcel_features.rows());
  for (Relation r : kAllRelations) {
    g.relation(r) = load_edges(need("edges_" + std::string(relation_name(r)) + ".csv"), r);
  }
  {
    const auto p = need("sr_geometry.csv");
    const auto t = csv::read_file(p);
    const auto cp = t.column("parcel_id", p.string());
    const auto cs = t.column("segment_id", p.string());
    const auto cd = t.column("distance_m", p.string());
    const auto ca = t.column("angle_rad", p.string());
    for (const auto& row : t.rows) {
      g.geometry.push_back(SrGeometry{static_cast<int>(csv::parse_int(row[cp], p.string())),
                                      static_cast<int>(csv::parse_int(row[cs], p.string())),
                                      csv::parse_double(row[cd], p.string()),
                                      csv::parse_double(row[ca], p.string())});
    }
  }
  validate_home_graph(g);
  const auto expected = meta.value("content_hash", std::string());
  if (!expected.empty() && expected != home_graph_content_hash(g)) {
    throw ValidationError(dir.string() + ": content hash mismatch");
  }
  return g;
}

}  // namespace homegcl
