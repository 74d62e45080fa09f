#pragma once

#include <filesystem>
#include <optional>
#include <ostream>

#include "homegcl/core/map_bundle.hpp"
#include "homegcl/eval/report.hpp"
#include "homegcl/pipeline/ablation.hpp"
#include "homegcl/pipeline/config.hpp"
#include "homegcl/train/trainer.hpp"

namespace homegcl {

namespace fs = std::filesystem;

// Bundle files plus synth_config.json.
MapBundle cmd_synth(const SynthSpec& spec, const fs::path& out_dir);

// HOME graph files; meta.json carries the graph config.
HomeGraph cmd_build_graph(const fs::path& bundle_dir, const GraphConfig& config, const fs::path& out_dir);

// checkpoint.ckpt, metrics.csv (one row per epoch) and config.json, plus
// checkpoint_epoch_<k>.ckpt every checkpoint_every epochs. With `resume` the
// run continues from that checkpoint up to config.epochs.
Checkpoint cmd_pretrain(const fs::path& graph_dir, const TrainConfig& config, const fs::path& out_dir,
                        const std::optional<fs::path>& resume = std::nullopt, std::ostream* log = nullptr);

EmbeddingTable cmd_export(const fs::path& graph_dir, const fs::path& checkpoint, const fs::path& out_file);

// report.json and report.txt.
EvalReport cmd_evaluate(const fs::path& embeddings, const fs::path& bundle_dir, const EvalConfig& config,
                        const fs::path& out_dir);

// ablation.json and ablation.txt; one row per (seed, variant).
AblationReport cmd_ablate(const fs::path& graph_dir, const fs::path& bundle_dir, const PipelineConfig& config,
                          const fs::path& out_dir, std::ostream* log = nullptr);

// All stages under out_dir: bundle/, graph/, train/, embeddings.csv, eval/.
EvalReport cmd_pipeline(const PipelineConfig& config, const fs::path& out_dir, std::ostream* log = nullptr);

std::string metrics_csv(const std::vector<LossComponents>& history);

}  // namespace homegcl
