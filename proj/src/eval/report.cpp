#include "homegcl/eval/report.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

#include "homegcl/core/error.hpp"
#include "homegcl/eval/clustering.hpp"
#include "homegcl/graph/builders.hpp"

namespace homegcl {

namespace {

std::map<std::string, double> scores(const ClassificationScores& s) {
  return {{"micro_f1", s.micro_f1}, {"macro_f1", s.macro_f1}};
}

std::map<std::string, double> scores(const RegressionScores& s) {
  if (s.mae > s.rmse * (1.0 + 1e-12) + 1e-12) throw NumericError("MAE exceeds RMSE");
  return {{"mae", s.mae}, {"rmse", s.rmse}};
}

template <typename R>
TaskResult task_result(const std::string& name, const R& r) {
  TaskResult t;
  t.task = name;
  for (const auto& f : r.folds) t.folds.push_back(scores(f));
  t.mean = scores(r.mean);
  return t;
}

std::vector<int> label_column(const std::vector<double>& values) {
  std::vector<int> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(static_cast<int>(v));
  return out;
}

}  // namespace

const std::vector<std::string>& eval_task_names() {
  static const std::vector<std::string> names = {"classify_segments", "classify_parcels", "flow_segments",
                                                 "flow_parcels",      "od_segments",      "od_parcels",
                                                 "cluster_consistency"};
  return names;
}

bool operator==(const ProbeConfig& a, const ProbeConfig& b) {
  return a.folds == b.folds && a.seed == b.seed && a.ridge_alpha == b.ridge_alpha &&
         a.classifier_steps == b.classifier_steps && a.classifier_lr == b.classifier_lr &&
         a.od_steps == b.od_steps && a.od_lr == b.od_lr;
}

void validate(const EvalConfig& c) {
  const auto& known = eval_task_names();
  if (c.tasks.empty()) throw ConfigError("eval.tasks is empty");
  for (const auto& t : c.tasks) {
    if (std::find(known.begin(), known.end(), t) == known.end()) throw ConfigError("unknown eval task: " + t);
  }
  if (c.probe.folds < 2) throw ConfigError("eval.folds must be >= 2");
  if (c.probe.ridge_alpha < 0.0) throw ConfigError("eval.ridge_alpha must be >= 0");
  if (c.probe.classifier_steps < 1 || c.probe.od_steps < 1) throw ConfigError("eval step counts must be >= 1");
  if (!(c.probe.classifier_lr > 0.0) || !(c.probe.od_lr > 0.0)) throw ConfigError("eval learning rates must be > 0");
  if (c.kmeans_k < 2) throw ConfigError("eval.kmeans_k must be >= 2");
  if (c.kmeans_restarts < 1) throw ConfigError("eval.kmeans_restarts must be >= 1");
}

nlohmann::json to_json(const EvalConfig& c) {
  return {{"tasks", c.tasks},
          {"folds", c.probe.folds},
          {"seed", c.probe.seed},
          {"ridge_alpha", c.probe.ridge_alpha},
          {"classifier_steps", c.probe.classifier_steps},
          {"classifier_lr", c.probe.classifier_lr},
          {"od_steps", c.probe.od_steps},
          {"od_lr", c.probe.od_lr},
          {"kmeans_k", c.kmeans_k},
          {"kmeans_restarts", c.kmeans_restarts}};
}

EvalConfig eval_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("eval section must be an object");
  EvalConfig c;
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "tasks") c.tasks = v.get<std::vector<std::string>>();
      else if (key == "folds") c.probe.folds = v.get<int>();
      else if (key == "seed") c.probe.seed = v.get<std::uint64_t>();
      else if (key == "ridge_alpha") c.probe.ridge_alpha = v.get<double>();
      else if (key == "classifier_steps") c.probe.classifier_steps = v.get<int>();
      else if (key == "classifier_lr") c.probe.classifier_lr = v.get<double>();
      else if (key == "od_steps") c.probe.od_steps = v.get<int>();
      else if (key == "od_lr") c.probe.od_lr = v.get<double>();
      else if (key == "kmeans_k") c.kmeans_k = v.get<int>();
      else if (key == "kmeans_restarts") c.kmeans_restarts = v.get<int>();
      else throw ConfigError("unknown key eval." + key);
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("bad value for eval." + key);
    }
  }
  validate(c);
  return c;
}

const TaskResult& EvalReport::at(const std::string& task) const {
  for (const auto& t : tasks) {
    if (t.task == task) return t;
  }
  throw ValidationError("task not in report: " + task);
}

EvalReport evaluate(const EmbeddingTable& embeddings, const MapBundle& bundle, const EvalConfig& config) {
  validate(config);
  const auto n_seg = static_cast<Eigen::Index>(bundle.segments.size());
  const auto n_par = static_cast<Eigen::Index>(bundle.parcels.size());
  if (embeddings.segments.rows() != n_seg || embeddings.parcels.rows() != n_par) {
    throw ValidationError("embedding rows do not match the bundle entities");
  }
  const std::set<std::string> wanted(config.tasks.begin(), config.tasks.end());
  const std::vector<int> parcel_of_segment = assign_segments_to_parcels(bundle.segments, bundle.parcels).parcel_of_segment;

  std::vector<double> seg_label, par_label;
  for (const auto& s : bundle.segments) seg_label.push_back(s.raw_features.at(seg_feature::kCategory));
  for (const auto& p : bundle.parcels) par_label.push_back(p.raw_features.at(parcel_feature::kFunction));

  const bool needs_flow = wanted.count("flow_segments") || wanted.count("flow_parcels") ||
                          wanted.count("od_segments") || wanted.count("od_parcels");
  if (needs_flow && bundle.trajectories.empty()) throw ValidationError("flow and OD tasks need trajectories");
  const TrajectorySplit split = split_trajectories(bundle.trajectories);

  EvalReport r;
  r.config = to_json(config);
  for (const auto& name : eval_task_names()) {
    if (!wanted.count(name)) continue;
    const bool seg = name.find("segments") != std::string::npos;
    const Mat& x = seg ? embeddings.segments : embeddings.parcels;
    const EntityType type = seg ? EntityType::Segment : EntityType::Parcel;
    const int n = static_cast<int>(x.rows());
    if (name.rfind("classify", 0) == 0) {
      r.tasks.push_back(task_result(name, classify(x, label_column(seg ? seg_label : par_label), config.probe)));
    } else if (name.rfind("flow", 0) == 0) {
      const FlowTargets t = derive_flow_and_od(split.test, parcel_of_segment, type, n);
      r.tasks.push_back(task_result(name, predict_flow(x, t, config.probe)));
    } else if (name.rfind("od", 0) == 0) {
      const FlowTargets t = derive_flow_and_od(split.test, parcel_of_segment, type, n);
      r.tasks.push_back(task_result(name, predict_od(x, t.od, config.probe)));
    } else {
      const ConsistencyScores c = cluster_consistency(embeddings.segments, embeddings.parcels, parcel_of_segment,
                                                      config.kmeans_k, config.probe.seed, config.kmeans_restarts);
      TaskResult t;
      t.task = name;
      t.mean = {{"nmi", c.nmi}, {"ari", c.ari}};
      r.tasks.push_back(std::move(t));
    }
  }
  return r;
}

nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json tasks = nlohmann::json::object();
  for (const auto& t : r.tasks) tasks[t.task] = {{"folds", t.folds}, {"mean", t.mean}};
  return {{"config", r.config}, {"tasks", tasks}};
}

std::string format_table(const EvalReport& r) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-22s %-10s %10s\n", "task", "metric", "mean");
  out << line;
  for (const auto& t : r.tasks) {
    for (const auto& [metric, value] : t.mean) {
      std::snprintf(line, sizeof line, "%-22s %-10s %10.4f\n", t.task.c_str(), metric.c_str(), value);
      out << line;
    }
  }
  return out.str();
}

}  // namespace homegcl
