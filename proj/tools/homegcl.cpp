// Command-line entry point. Exit codes: 0 success, 2 invalid input or
// configuration, 3 runtime failure.
#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "homegcl/core/error.hpp"
#include "homegcl/pipeline/commands.hpp"

using namespace homegcl;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

struct Common {
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;

  PipelineConfig load() const {
    std::optional<fs::path> path;
    if (config) path = *config;
    return load_pipeline_config(path, seed, overrides);
  }
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "JSON config file");
  app->add_option("--seed", c.seed, "Global seed");
  app->add_option("--override", c.overrides, "key=value config override (repeatable)");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const std::string item = s.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!item.empty()) out.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HOME graph contrastive pretraining pipeline"};
  app.require_subcommand(1);
  Common common;
  std::string out, bundle, graph, checkpoint, embeddings, resume, tasks, variants;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic city bundle");
  add_common(synth, common);
  synth->add_option("--out", out, "Output directory")->required();

  auto* build = app.add_subcommand("build-graph", "Build the HOME graph from a bundle");
  add_common(build, common);
  build->add_option("--bundle", bundle, "Bundle directory")->required();
  build->add_option("--out", out, "Output directory")->required();

  auto* pretrain = app.add_subcommand("pretrain", "Pretrain the encoder");
  add_common(pretrain, common);
  pretrain->add_option("--graph", graph, "Graph directory")->required();
  pretrain->add_option("--out", out, "Output directory")->required();
  pretrain->add_option("--resume", resume, "Checkpoint to continue from");

  auto* exp = app.add_subcommand("export", "Export frozen embeddings");
  add_common(exp, common);
  exp->add_option("--graph", graph, "Graph directory")->required();
  exp->add_option("--checkpoint", checkpoint, "Checkpoint file")->required();
  exp->add_option("--out", out, "Embedding CSV path")->required();

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Evaluate embeddings on downstream tasks");
  add_common(evaluate_cmd, common);
  evaluate_cmd->add_option("--embeddings", embeddings, "Embedding CSV")->required();
  evaluate_cmd->add_option("--bundle", bundle, "Bundle directory")->required();
  evaluate_cmd->add_option("--out", out, "Output directory")->required();
  evaluate_cmd->add_option("--tasks", tasks, "Comma-separated task names");

  auto* ablate = app.add_subcommand("ablate", "Run the ablation matrix");
  add_common(ablate, common);
  ablate->add_option("--graph", graph, "Graph directory")->required();
  ablate->add_option("--bundle", bundle, "Bundle directory")->required();
  ablate->add_option("--out", out, "Output directory")->required();
  ablate->add_option("--variants", variants, "Comma-separated variants");

  auto* pipeline = app.add_subcommand("pipeline", "Run every stage");
  add_common(pipeline, common);
  pipeline->add_option("--out", out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    PipelineConfig cfg = common.load();
    if (synth->parsed()) {
      cmd_synth(cfg.synth, out);
    } else if (build->parsed()) {
      cmd_build_graph(bundle, cfg.graph, out);
    } else if (pretrain->parsed()) {
      std::optional<fs::path> from;
      if (!resume.empty()) from = resume;
      cmd_pretrain(graph, cfg.train, out, from, &std::cerr);
    } else if (exp->parsed()) {
      cmd_export(graph, checkpoint, out);
    } else if (evaluate_cmd->parsed()) {
      if (!tasks.empty()) {
        cfg.eval.tasks = split_list(tasks);
        validate(cfg.eval);
      }
      std::cout << format_table(cmd_evaluate(embeddings, bundle, cfg.eval, out));
    } else if (ablate->parsed()) {
      if (!variants.empty()) cfg.ablation.variants = split_list(variants);
      std::cout << format_table(cmd_ablate(graph, bundle, cfg, out, &std::cerr));
    } else if (pipeline->parsed()) {
      std::cout << format_table(cmd_pipeline(cfg, out, &std::cerr));
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
