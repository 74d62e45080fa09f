#include "homegcl/encoder/embedding_io.hpp"

#include <sstream>

#include "homegcl/core/csv.hpp"
#include "homegcl/core/error.hpp"
#include "homegcl/core/hash.hpp"

namespace homegcl {

void save_embeddings(const EmbeddingTable& table, const std::filesystem::path& path) {
  std::ostringstream os;
  const Eigen::Index D = std::max(table.segments.cols(), table.parcels.cols());
  std::vector<std::string> header = {"entity_type", "id"};
  for (Eigen::Index k = 0; k < D; ++k) header.push_back("e_" + std::to_string(k));
  csv::write_row(os, header);
  auto emit = [&](const char* type, const Mat& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      std::vector<std::string> row = {type, std::to_string(i)};
      for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(csv::format_double(m(i, k)));
      csv::write_row(os, row);
    }
  };
  emit("segment", table.segments);
  emit("parcel", table.parcels);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  write_text_file(path, os.str());
}

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw LoadError("missing embedding file: " + path.string());
  const auto t = csv::read_file(path);
  if (t.header.size() < 3 || t.header[0] != "entity_type" || t.header[1] != "id") {
    throw LoadError(path.string() + ": not an embedding table");
  }
  const auto D = static_cast<Eigen::Index>(t.header.size() - 2);
  std::vector<std::vector<double>> seg, par;
  for (const auto& row : t.rows) {
    std::vector<double> v;
    for (Eigen::Index k = 0; k < D; ++k) v.push_back(csv::parse_double(row[static_cast<std::size_t>(k + 2)], path.string()));
    auto& dst = row[0] == "segment" ? seg : row[0] == "parcel" ? par : throw LoadError("unknown entity type " + row[0]);
    if (csv::parse_int(row[1], path.string()) != static_cast<long long>(dst.size())) {
      throw LoadError(path.string() + ": ids must be dense and ordered per entity type");
    }
    dst.push_back(std::move(v));
  }
  auto to_mat = [D](const std::vector<std::vector<double>>& rows) {
    Mat m(static_cast<Eigen::Index>(rows.size()), D);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (Eigen::Index k = 0; k < D; ++k) m(static_cast<Eigen::Index>(i), k) = rows[i][static_cast<std::size_t>(k)];
    }
    return m;
  };
  return EmbeddingTable{to_mat(seg), to_mat(par)};
}

}  // namespace homegcl
