#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "homegcl/eval/report.hpp"
#include "homegcl/train/trainer.hpp"

namespace homegcl {

// "full" followed by the eight single-toggle variants, in report order.
const std::vector<std::string>& ablation_variant_names();

// Applies toggles such as {"no_psa", "no_edge_aug"} to a copy of `base`.
// Unknown, repeated or conflicting toggles throw ConfigError.
TrainConfig apply_toggles(const TrainConfig& base, const std::vector<std::string>& toggles);

// Variant name to config; "full" returns `base`, "a+b" combines toggles.
TrainConfig variant_config(const TrainConfig& base, const std::string& variant);

// Model trained on one entity type alone: only that type's intra-entity
// contrastive loss and no segment-parcel messages.
TrainConfig single_entity_config(const TrainConfig& base, EntityType type);

struct AblationRow {
  std::string variant;
  std::uint64_t seed = 0;
  nlohmann::json train_config;
  EvalReport report;
};

struct AblationReport {
  std::vector<AblationRow> rows;
};

nlohmann::json to_json(const AblationReport& r);
std::string format_table(const AblationReport& r);

}  // namespace homegcl
