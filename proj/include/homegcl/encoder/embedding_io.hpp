#pragma once

#include <filesystem>

#include "homegcl/encoder/encoder.hpp"

namespace homegcl {

// CSV with columns entity_type, id, e_0 .. e_{D-1}; segments first.
void save_embeddings(const EmbeddingTable& table, const std::filesystem::path& path);
EmbeddingTable load_embeddings(const std::filesystem::path& path);

}  // namespace homegcl
