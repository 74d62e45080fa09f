#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "homegcl/graph/home_graph.hpp"

namespace homegcl {

// Writes nodes_*.csv, edges_*.csv, sr_geometry.csv and meta.json.
void save_home_graph(const HomeGraph& g, const std::filesystem::path& dir);
HomeGraph load_home_graph(const std::filesystem::path& dir);

// SHA-256 over the serialized node, edge and geometry files.
std::string home_graph_content_hash(const HomeGraph& g);

nlohmann::json graph_config_to_json(const GraphConfig& c);
GraphConfig graph_config_from_json(const nlohmann::json& j);

nlohmann::json schema_to_json(const std::vector<FeatureSchema>& schema);
std::vector<FeatureSchema> schema_from_json(const nlohmann::json& j);

}  // namespace homegcl
