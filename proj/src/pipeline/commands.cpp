#include "homegcl/pipeline/commands.hpp"

#include <cstdio>

#include "homegcl/core/bundle_io.hpp"
#include "homegcl/core/error.hpp"
#include "homegcl/core/hash.hpp"
#include "homegcl/core/synthetic_city.hpp"
#include "homegcl/encoder/embedding_io.hpp"
#include "homegcl/graph/graph_io.hpp"
#include "homegcl/train/checkpoint.hpp"

namespace homegcl {

namespace {

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw LoadError("cannot create directory " + dir.string());
}

void write_json(const fs::path& path, const nlohmann::json& j) { write_text_file(path, j.dump(2) + "\n"); }

}  // namespace

std::string metrics_csv(const std::vector<LossComponents>& history) {
  std::string out = "epoch,L_SS,L_RR,L_SR,L_C,total\n";
  char line[256];
  for (std::size_t i = 0; i < history.size(); ++i) {
    const auto& h = history[i];
    std::snprintf(line, sizeof line, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g\n", i + 1, h.ss, h.rr, h.sr, h.c, h.total);
    out += line;
  }
  return out;
}

MapBundle cmd_synth(const SynthSpec& spec, const fs::path& out_dir) {
  MapBundle b = generate_synthetic_city(spec);
  ensure_dir(out_dir);
  save_bundle(b, out_dir);
  write_json(out_dir / "synth_config.json", to_json(spec));
  return b;
}

HomeGraph cmd_build_graph(const fs::path& bundle_dir, const GraphConfig& config, const fs::path& out_dir) {
  const MapBundle b = load_bundle(bundle_dir);
  HomeGraph g = assemble_home_graph(b, config);
  ensure_dir(out_dir);
  save_home_graph(g, out_dir);
  return g;
}

Checkpoint cmd_pretrain(const fs::path& graph_dir, const TrainConfig& config, const fs::path& out_dir,
                        const std::optional<fs::path>& resume, std::ostream* log) {
  validate(config);
  const HomeGraph g = load_home_graph(graph_dir);
  ensure_dir(out_dir);
  Checkpoint ckpt;
  if (resume) {
    ckpt = load_checkpoint(*resume);
    TrainConfig stored = ckpt.config;
    stored.epochs = config.epochs;
    stored.checkpoint_every = config.checkpoint_every;
    if (!(stored == config)) throw ValidationError("resume checkpoint was trained with a different config");
    if (ckpt.graph_hash != home_graph_content_hash(g)) throw ValidationError("resume checkpoint was trained on a different graph");
    if (ckpt.epoch > config.epochs) throw ValidationError("resume checkpoint is past the configured epoch count");
    ckpt.config = config;
  } else {
    ckpt = init_checkpoint(g, config);
  }
  write_json(out_dir / "config.json", to_json(config));
  const HomeEncoder encoder(g, config.encoder);
  train_until(ckpt, encoder, config.epochs, [&](const Checkpoint& k) {
    if (log && (k.epoch == 1 || k.epoch % 50 == 0 || k.epoch == config.epochs)) {
      const auto& h = k.history.back();
      *log << "epoch " << k.epoch << " total " << h.total << " (ss " << h.ss << ", rr " << h.rr << ", sr " << h.sr
           << ", c " << h.c << ")\n";
    }
    if (config.checkpoint_every > 0 && k.epoch % config.checkpoint_every == 0) {
      save_checkpoint(k, out_dir / ("checkpoint_epoch_" + std::to_string(k.epoch) + ".ckpt"));
    }
  });
  save_checkpoint(ckpt, out_dir / "checkpoint.ckpt");
  write_text_file(out_dir / "metrics.csv", metrics_csv(ckpt.history));
  return ckpt;
}

EmbeddingTable cmd_export(const fs::path& graph_dir, const fs::path& checkpoint, const fs::path& out_file) {
  const HomeGraph g = load_home_graph(graph_dir);
  const Checkpoint k = load_checkpoint(checkpoint);
  EmbeddingTable e = export_embeddings(k, g);
  if (out_file.has_parent_path()) ensure_dir(out_file.parent_path());
  save_embeddings(e, out_file);
  return e;
}

EvalReport cmd_evaluate(const fs::path& embeddings, const fs::path& bundle_dir, const EvalConfig& config,
                        const fs::path& out_dir) {
  validate(config);
  const EmbeddingTable e = load_embeddings(embeddings);
  const MapBundle b = load_bundle(bundle_dir);
  EvalReport r = evaluate(e, b, config);
  ensure_dir(out_dir);
  write_json(out_dir / "report.json", to_json(r));
  write_text_file(out_dir / "report.txt", format_table(r));
  return r;
}

AblationReport cmd_ablate(const fs::path& graph_dir, const fs::path& bundle_dir, const PipelineConfig& config,
                          const fs::path& out_dir, std::ostream* log) {
  const std::vector<std::string> variants =
      config.ablation.variants.empty() ? ablation_variant_names() : config.ablation.variants;
  const std::vector<std::uint64_t> seeds =
      config.ablation.seeds.empty() ? std::vector<std::uint64_t>{config.train.seed} : config.ablation.seeds;
  // Resolve every variant before any training so conflicts fail fast.
  std::vector<TrainConfig> configs;
  for (const auto& v : variants) configs.push_back(variant_config(config.train, v));
  validate(config.eval);
  const HomeGraph g = load_home_graph(graph_dir);
  const MapBundle b = load_bundle(bundle_dir);
  AblationReport report;
  for (std::uint64_t seed : seeds) {
    for (std::size_t i = 0; i < variants.size(); ++i) {
      TrainConfig c = configs[i];
      c.seed = seed;
      if (log) *log << "ablation: " << variants[i] << " seed " << seed << "\n";
      const Checkpoint k = pretrain(g, c);
      report.rows.push_back({variants[i], seed, to_json(c), evaluate(export_embeddings(k, g), b, config.eval)});
    }
  }
  ensure_dir(out_dir);
  nlohmann::json j = to_json(report);
  j["config"] = to_json(config);
  write_json(out_dir / "ablation.json", j);
  write_text_file(out_dir / "ablation.txt", format_table(report));
  return report;
}

EvalReport cmd_pipeline(const PipelineConfig& config, const fs::path& out_dir, std::ostream* log) {
  ensure_dir(out_dir);
  write_json(out_dir / "config.json", to_json(config));
  if (log) *log << "synth\n";
  cmd_synth(config.synth, out_dir / "bundle");
  if (log) *log << "build-graph\n";
  cmd_build_graph(out_dir / "bundle", config.graph, out_dir / "graph");
  if (log) *log << "pretrain\n";
  cmd_pretrain(out_dir / "graph", config.train, out_dir / "train", std::nullopt, log);
  if (log) *log << "export\n";
  cmd_export(out_dir / "graph", out_dir / "train" / "checkpoint.ckpt", out_dir / "embeddings.csv");
  if (log) *log << "evaluate\n";
  return cmd_evaluate(out_dir / "embeddings.csv", out_dir / "bundle", config.eval, out_dir / "eval");
}

}  // namespace homegcl
