#pragma once

#include <filesystem>

#include "homegcl/train/trainer.hpp"

namespace homegcl {

// Binary archive: an 8-byte magic, a length-prefixed JSON header (config,
// epoch, rng state, loss history, tensor index), then raw float64 data for
// parameters, buffers and optimizer moments in index order.
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace homegcl
