#include "homegcl/pipeline/config.hpp"

#include <algorithm>

#include "homegcl/core/error.hpp"
#include "homegcl/core/hash.hpp"
#include "homegcl/graph/graph_io.hpp"

namespace homegcl {

namespace {

const char* const kSections[] = {"seed", "synth", "graph", "encoder", "augmentation", "loss", "train", "eval", "ablation"};

bool has_key(const nlohmann::json& j, const char* section, const char* key) {
  return j.contains(section) && j.at(section).is_object() && j.at(section).contains(key);
}

AblationConfig ablation_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("ablation section must be an object");
  AblationConfig a;
  for (const auto& [k, v] : j.items()) {
    try {
      if (k == "variants") a.variants = v.get<std::vector<std::string>>();
      else if (k == "seeds") a.seeds = v.get<std::vector<std::uint64_t>>();
      else throw ConfigError("unknown key ablation." + k);
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("bad value for ablation." + k);
    }
  }
  return a;
}

}  // namespace

nlohmann::json to_json(const SynthSpec& s) {
  return {{"grid_w", s.grid_w},       {"grid_h", s.grid_h},
          {"cell_size_m", s.cell_size_m}, {"n_pois", s.n_pois},
          {"n_trajectories", s.n_trajectories}, {"n_function_classes", s.n_function_classes},
          {"seed", s.seed}};
}

SynthSpec synth_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("synth section must be an object");
  SynthSpec s;
  for (const auto& [k, v] : j.items()) {
    try {
      if (k == "grid_w") s.grid_w = v.get<int>();
      else if (k == "grid_h") s.grid_h = v.get<int>();
      else if (k == "cell_size_m") s.cell_size_m = v.get<double>();
      else if (k == "n_pois") s.n_pois = v.get<int>();
      else if (k == "n_trajectories") s.n_trajectories = v.get<int>();
      else if (k == "n_function_classes") s.n_function_classes = v.get<int>();
      else if (k == "seed") s.seed = v.get<std::uint64_t>();
      else throw ConfigError("unknown key synth." + k);
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("bad value for synth." + k);
    }
  }
  if (s.grid_w < 1 || s.grid_h < 1) throw ConfigError("synth grid must be at least 1x1");
  if (!(s.cell_size_m > 0.0)) throw ConfigError("synth.cell_size_m must be > 0");
  if (s.n_pois < 0 || s.n_trajectories < 0) throw ConfigError("synth counts must be >= 0");
  if (s.n_function_classes < 1) throw ConfigError("synth.n_function_classes must be >= 1");
  return s;
}

void apply_overrides(nlohmann::json& doc, const std::vector<std::string>& overrides) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like key=value: " + o);
    const std::string path = o.substr(0, eq);
    const std::string text = o.substr(eq + 1);
    nlohmann::json value = nlohmann::json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    nlohmann::json* node = &doc;
    std::size_t start = 0;
    while (true) {
      const auto dot = path.find('.', start);
      const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
      if (key.empty()) throw ConfigError("bad override key: " + path);
      if (dot == std::string::npos) {
        (*node)[key] = value;
        break;
      }
      if (!node->contains(key)) (*node)[key] = nlohmann::json::object();
      node = &(*node)[key];
      if (!node->is_object()) throw ConfigError("override path crosses a value: " + path);
      start = dot + 1;
    }
  }
}

PipelineConfig pipeline_config_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [k, v] : doc.items()) {
    if (std::find(std::begin(kSections), std::end(kSections), k) == std::end(kSections)) {
      throw ConfigError("unknown config section " + k);
    }
  }
  PipelineConfig c;
  try {
    if (doc.contains("seed")) c.seed = doc.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("seed must be a non-negative integer");
  }
  if (doc.contains("synth")) c.synth = synth_spec_from_json(doc.at("synth"));
  if (doc.contains("graph")) {
    if (!doc.at("graph").is_object()) throw ConfigError("graph section must be an object");
    try {
      c.graph = graph_config_from_json(doc.at("graph"));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("graph: ") + e.what());
    }
    if (c.graph.top_k < 1) throw ConfigError("graph.top_k must be >= 1");
    if (!(c.graph.epsilon > 0.0)) throw ConfigError("graph.epsilon must be > 0");
    if (c.graph.epsilon_r && !(*c.graph.epsilon_r > 0.0)) throw ConfigError("graph.epsilon_r must be > 0");
  }
  nlohmann::json train = nlohmann::json::object();
  for (const char* s : {"train", "encoder", "augmentation", "loss"}) {
    if (doc.contains(s)) train[s] = doc.at(s);
  }
  c.train = train_config_from_json(train);
  if (doc.contains("eval")) c.eval = eval_config_from_json(doc.at("eval"));
  if (doc.contains("ablation")) c.ablation = ablation_from_json(doc.at("ablation"));
  if (!has_key(doc, "synth", "seed")) c.synth.seed = c.seed;
  if (!has_key(doc, "train", "seed")) c.train.seed = c.seed;
  if (!has_key(doc, "eval", "seed")) c.eval.probe.seed = c.seed;
  return c;
}

nlohmann::json to_json(const PipelineConfig& c) {
  nlohmann::json j = to_json(c.train);
  j["seed"] = c.seed;
  j["synth"] = to_json(c.synth);
  j["graph"] = graph_config_to_json(c.graph);
  j["eval"] = to_json(c.eval);
  j["ablation"] = {{"variants", c.ablation.variants}, {"seeds", c.ablation.seeds}};
  return j;
}

PipelineConfig load_pipeline_config(const std::optional<std::filesystem::path>& path,
                                    const std::optional<std::uint64_t>& seed,
                                    const std::vector<std::string>& overrides) {
  nlohmann::json doc = nlohmann::json::object();
  if (path) {
    doc = nlohmann::json::parse(read_text_file(*path), nullptr, false);
    if (doc.is_discarded()) throw ConfigError("config file is not valid JSON: " + path->string());
  }
  if (seed) doc["seed"] = *seed;
  apply_overrides(doc, overrides);
  return pipeline_config_from_json(doc);
}

}  // namespace homegcl
