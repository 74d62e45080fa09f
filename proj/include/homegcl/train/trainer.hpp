#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "homegcl/encoder/encoder.hpp"
#include "homegcl/ssl/augment.hpp"
#include "homegcl/ssl/losses.hpp"
#include "homegcl/train/adam.hpp"

namespace homegcl {

struct TrainConfig {
  double learning_rate = 0.01;
  int epochs = 1000;
  std::uint64_t seed = 0;
  int checkpoint_every = 0;  // 0 disables periodic checkpoints
  EncoderConfig encoder;
  AugmentationConfig augmentation;
  LossConfig loss;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

void validate(const TrainConfig& c);
// Only the train-section keys; encoder/augmentation/loss are separate sections.
nlohmann::json train_section_to_json(const TrainConfig& c);
void apply_train_section(TrainConfig& c, const nlohmann::json& j);
nlohmann::json to_json(const TrainConfig& c);
TrainConfig train_config_from_json(const nlohmann::json& j);

// Everything drawn at random for one optimization step.
struct StepSample {
  AugmentedView view1;
  AugmentedView view2;
  std::vector<int> negative_parcels;
  std::vector<int> permutation;
  std::uint64_t dropout_seed = 0;
};

struct Checkpoint {
  TrainConfig config;
  ParamStore params;
  AdamState adam;
  int epoch = 0;            // completed epochs
  std::string rng_state;    // training stream after `epoch` epochs
  std::vector<LossComponents> history;
  std::string graph_hash;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

// Model weights for a graph and config; deterministic in config.seed.
ParamStore init_model_params(const HomeEncoder& encoder, std::uint64_t seed);

// Per-dimension importances of the encoder inputs under the current weights.
std::pair<std::vector<double>, std::vector<double>> input_importance(const HomeEncoder& encoder,
                                                                     const ParamStore& params);

StepSample sample_step(const HomeEncoder& encoder, const ParamStore& params, const TrainConfig& config, Rng& rng);

// Loss components for a sample; fills `grads` with d(total)/d(param) when
// non-null. Components with a zero weight are skipped and reported as 0.
LossComponents compute_loss(const HomeEncoder& encoder, const ParamStore& params, const TrainConfig& config,
                            const StepSample& sample, Gradients* grads);

Checkpoint init_checkpoint(const HomeGraph& graph, const TrainConfig& config);

using EpochCallback = std::function<void(const Checkpoint&)>;

// Continues training until `until_epoch` epochs are complete.
void train_until(Checkpoint& ckpt, const HomeEncoder& encoder, int until_epoch, const EpochCallback& on_epoch = {});

Checkpoint pretrain(const HomeGraph& graph, const TrainConfig& config, const EpochCallback& on_epoch = {});

// Evaluation-mode embeddings; the checkpoint must match the graph.
EmbeddingTable export_embeddings(const Checkpoint& ckpt, const HomeGraph& graph);

}  // namespace homegcl
