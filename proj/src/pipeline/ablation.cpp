#include "homegcl/pipeline/ablation.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

#include "homegcl/core/error.hpp"

namespace homegcl {

const std::vector<std::string>& ablation_variant_names() {
  static const std::vector<std::string> names = {"full",   "no_rfe",   "no_psa",         "no_bias",    "no_hgt",
                                                 "no_intra", "no_inter", "no_feature_aug", "no_edge_aug"};
  return names;
}

TrainConfig apply_toggles(const TrainConfig& base, const std::vector<std::string>& toggles) {
  const std::set<std::string> set(toggles.begin(), toggles.end());
  if (set.size() != toggles.size()) throw ConfigError("repeated ablation toggle");
  TrainConfig c = base;
  auto conflict = [&](const char* a, const char* b) {
    if (set.count(a) && set.count(b)) throw ConfigError(std::string("conflicting ablation toggles: ") + a + " and " + b);
  };
  // The bias lives inside shape attention; dropping all losses leaves nothing to train.
  conflict("no_psa", "no_bias");
  conflict("no_intra", "no_inter");
  auto already_off = [](bool off, const std::string& t) {
    if (off) throw ConfigError("ablation toggle " + t + " conflicts with the base config");
  };
  for (const auto& t : toggles) {
    if (t == "no_rfe") {
      already_off(!c.encoder.use_rfe, t);
      c.encoder.use_rfe = false;
    } else if (t == "no_psa") {
      already_off(!c.encoder.use_psa, t);
      c.encoder.use_psa = false;
    } else if (t == "no_bias") {
      already_off(!c.encoder.use_psa || !c.encoder.use_shape_bias, t);
      c.encoder.use_shape_bias = false;
    } else if (t == "no_hgt") {
      already_off(!c.encoder.use_hgt, t);
      c.encoder.use_hgt = false;
    } else if (t == "no_intra") {
      c.loss.lambda_ss = 0.0;
      c.loss.lambda_rr = 0.0;
    } else if (t == "no_inter") {
      c.loss.lambda_sr = 0.0;
      c.loss.lambda_c = 0.0;
    } else if (t == "no_feature_aug") {
      c.augmentation.view1.p_n = 0.0;
      c.augmentation.view2.p_n = 0.0;
    } else if (t == "no_edge_aug") {
      c.augmentation.view1.p_e = 0.0;
      c.augmentation.view2.p_e = 0.0;
    } else {
      throw ConfigError("unknown ablation toggle " + t);
    }
  }
  if (c.loss.lambda_ss == 0.0 && c.loss.lambda_rr == 0.0 && c.loss.lambda_sr == 0.0 && c.loss.lambda_c == 0.0) {
    throw ConfigError("ablation leaves no training objective");
  }
  validate(c);
  return c;
}

TrainConfig variant_config(const TrainConfig& base, const std::string& variant) {
  if (variant == "full") return base;
  std::vector<std::string> toggles;
  std::size_t start = 0;
  while (true) {
    const auto plus = variant.find('+', start);
    toggles.push_back(variant.substr(start, plus == std::string::npos ? std::string::npos : plus - start));
    if (plus == std::string::npos) break;
    start = plus + 1;
  }
  return apply_toggles(base, toggles);
}

TrainConfig single_entity_config(const TrainConfig& base, EntityType type) {
  TrainConfig c = base;
  c.loss.lambda_ss = type == EntityType::Segment ? base.loss.lambda_ss : 0.0;
  c.loss.lambda_rr = type == EntityType::Parcel ? base.loss.lambda_rr : 0.0;
  c.loss.lambda_sr = 0.0;
  c.loss.lambda_c = 0.0;
  c.encoder.use_sr_edges = false;
  validate(c);
  return c;
}

nlohmann::json to_json(const AblationReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"variant", row.variant}, {"seed", row.seed}, {"config", row.train_config}, {"report", to_json(row.report)}});
  }
  return {{"rows", rows}};
}

std::string format_table(const AblationReport& r) {
  // Columns: every task metric seen in the report, in first-seen order.
  std::vector<std::string> columns;
  for (const auto& row : r.rows) {
    for (const auto& t : row.report.tasks) {
      for (const auto& [m, v] : t.mean) {
        const std::string key = t.task + "." + m;
        if (std::find(columns.begin(), columns.end(), key) == columns.end()) columns.push_back(key);
      }
    }
  }
  std::ostringstream out;
  char cell[96];
  std::snprintf(cell, sizeof cell, "%-16s %6s", "variant", "seed");
  out << cell;
  for (const auto& c : columns) out << " " << c;
  out << "\n";
  for (const auto& row : r.rows) {
    std::snprintf(cell, sizeof cell, "%-16s %6llu", row.variant.c_str(), static_cast<unsigned long long>(row.seed));
    out << cell;
    for (const auto& c : columns) {
      const auto dot = c.find('.');
      double v = 0.0;
      bool found = false;
      for (const auto& t : row.report.tasks) {
        if (t.task == c.substr(0, dot) && t.mean.count(c.substr(dot + 1))) {
          v = t.mean.at(c.substr(dot + 1));
          found = true;
        }
      }
      std::snprintf(cell, sizeof cell, " %*s", static_cast<int>(c.size()), found ? "" : "-");
      if (found) std::snprintf(cell, sizeof cell, " %*.4f", static_cast<int>(c.size()), v);
      out << cell;
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace homegcl
