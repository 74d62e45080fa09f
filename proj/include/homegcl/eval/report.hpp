#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "homegcl/core/map_bundle.hpp"
#include "homegcl/encoder/encoder.hpp"
#include "homegcl/eval/probes.hpp"

namespace homegcl {

// Known task names, in report order.
const std::vector<std::string>& eval_task_names();

struct EvalConfig {
  std::vector<std::string> tasks = eval_task_names();
  ProbeConfig probe;
  int kmeans_k = 5;
  int kmeans_restarts = 10;

  friend bool operator==(const EvalConfig&, const EvalConfig&) = default;
};

bool operator==(const ProbeConfig& a, const ProbeConfig& b);

// Throws ConfigError on unknown tasks or out-of-range values.
void validate(const EvalConfig& c);
nlohmann::json to_json(const EvalConfig& c);
EvalConfig eval_config_from_json(const nlohmann::json& j);

struct TaskResult {
  std::string task;
  std::vector<std::map<std::string, double>> folds;
  std::map<std::string, double> mean;
};

struct EvalReport {
  nlohmann::json config;
  std::vector<TaskResult> tasks;

  const TaskResult& at(const std::string& task) const;
};

// Runs every configured task on frozen embeddings aligned with the bundle's
// segment and parcel order.
EvalReport evaluate(const EmbeddingTable& embeddings, const MapBundle& bundle, const EvalConfig& config);

nlohmann::json to_json(const EvalReport& r);
std::string format_table(const EvalReport& r);

}  // namespace homegcl
