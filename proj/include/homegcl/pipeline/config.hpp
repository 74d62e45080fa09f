#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "homegcl/core/synthetic_city.hpp"
#include "homegcl/eval/report.hpp"
#include "homegcl/graph/home_graph.hpp"
#include "homegcl/train/trainer.hpp"

namespace homegcl {

struct AblationConfig {
  std::vector<std::string> variants;  // empty means every variant
  std::vector<std::uint64_t> seeds;   // empty means the global seed only

  friend bool operator==(const AblationConfig&, const AblationConfig&) = default;
};

// One static config for every subcommand. Sections mirror the stages; a
// section seed left out of the file takes the global seed.
struct PipelineConfig {
  std::uint64_t seed = 0;
  SynthSpec synth;
  GraphConfig graph;
  TrainConfig train;
  EvalConfig eval;
  AblationConfig ablation;
};

nlohmann::json to_json(const SynthSpec& s);
SynthSpec synth_spec_from_json(const nlohmann::json& j);

// Applies "a.b=value" overrides to a raw config document. Values parse as
// JSON when possible and as strings otherwise.
void apply_overrides(nlohmann::json& doc, const std::vector<std::string>& overrides);

// Validates everything and rejects unknown keys.
PipelineConfig pipeline_config_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const PipelineConfig& c);

// Reads `path` (or starts from defaults when empty), applies the global
// seed override and the key=value overrides, then parses.
PipelineConfig load_pipeline_config(const std::optional<std::filesystem::path>& path,
                                    const std::optional<std::uint64_t>& seed,
                                    const std::vector<std::string>& overrides);

}  // namespace homegcl
