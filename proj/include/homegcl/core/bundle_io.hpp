#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "homegcl/core/map_bundle.hpp"

namespace homegcl {

// Reads segments.csv, parcels.csv, pois.csv, trajectories.jsonl and vocab.json.
// Ids are remapped to dense 0..N-1 in ascending order of the file ids, unknown
// categorical codes become the reserved "other" code, and lon/lat frames are
// projected to planar meters.
MapBundle load_bundle(const std::filesystem::path& dir);

// Writes the five bundle files; creates the directory when missing.
void save_bundle(const MapBundle& bundle, const std::filesystem::path& dir);

std::string to_wkt_linestring(const Polyline& line);
std::string to_wkt_polygon(const Ring& ring);
Polyline parse_wkt_linestring(const std::string& wkt);
Ring parse_wkt_polygon(const std::string& wkt);

}  // namespace homegcl
