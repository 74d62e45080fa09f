#include "homegcl/train/trainer.hpp"

#include <cmath>

#include "homegcl/core/error.hpp"
#include "homegcl/graph/graph_io.hpp"

namespace homegcl {

using ad::Var;

void validate(const TrainConfig& c) {
  if (c.epochs < 1) throw ConfigError("train.epochs must be >= 1");
  if (!(c.learning_rate > 0.0) || !std::isfinite(c.learning_rate)) throw ConfigError("train.learning_rate must be > 0");
  if (c.checkpoint_every < 0) throw ConfigError("train.checkpoint_every must be >= 0");
  validate(c.encoder);
  validate(c.augmentation);
  validate(c.loss);
}

nlohmann::json train_section_to_json(const TrainConfig& c) {
  return {{"learning_rate", c.learning_rate},
          {"epochs", c.epochs},
          {"seed", c.seed},
          {"checkpoint_every", c.checkpoint_every}};
}

void apply_train_section(TrainConfig& c, const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("train section must be an object");
  try {
    for (const auto& [k, v] : j.items()) {
      if (k == "learning_rate") c.learning_rate = v.get<double>();
      else if (k == "epochs") c.epochs = v.get<int>();
      else if (k == "seed") c.seed = v.get<std::uint64_t>();
      else if (k == "checkpoint_every") c.checkpoint_every = v.get<int>();
      else throw ConfigError("unknown key train." + k);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("train: ") + e.what());
  }
}

nlohmann::json to_json(const TrainConfig& c) {
  return {{"train", train_section_to_json(c)},
          {"encoder", to_json(c.encoder)},
          {"augmentation", to_json(c.augmentation)},
          {"loss", to_json(c.loss)}};
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  for (const auto& [k, v] : j.items()) {
    if (k == "train") apply_train_section(c, v);
    else if (k == "encoder") c.encoder = encoder_config_from_json(v);
    else if (k == "augmentation") c.augmentation = augmentation_config_from_json(v);
    else if (k == "loss") c.loss = loss_config_from_json(v);
    else throw ConfigError("unknown training config section " + k);
  }
  validate(c);
  return c;
}

ParamStore init_model_params(const HomeEncoder& encoder, std::uint64_t seed) {
  Rng rng(seed);
  ParamStore store;
  encoder.init_params(store, rng);
  init_ssl_params(store, encoder.config().D, rng);
  return store;
}

std::pair<std::vector<double>, std::vector<double>> input_importance(const HomeEncoder& encoder,
                                                                     const ParamStore& params) {
  ad::Tape tape;
  Bindings b(tape, params, false);
  const auto& g = encoder.graph();
  const Mat x_S = encoder.input_embedding(b, EntityType::Segment, g.segment_features).value();
  const Mat x_R = encoder.input_embedding(b, EntityType::Parcel, g.parcel_features).value();
  return {feature_importance(x_S, intra_in_degree(g, EntityType::Segment)),
          feature_importance(x_R, intra_in_degree(g, EntityType::Parcel))};
}

StepSample sample_step(const HomeEncoder& encoder, const ParamStore& params, const TrainConfig& config, Rng& rng) {
  const auto& g = encoder.graph();
  const auto [c_S, c_R] = input_importance(encoder, params);
  StepSample s;
  const auto& aug = config.augmentation;
  s.view1 = augment(g, c_S, c_R, aug.view1, aug.p_tau, rng.derive_seed());
  s.view2 = augment(g, c_S, c_R, aug.view2, aug.p_tau, rng.derive_seed());
  s.negative_parcels = sample_negative_parcels(g.n_parcels(), rng);
  s.permutation = corruption_permutation(g.n_segments(), rng);
  s.dropout_seed = rng.derive_seed();
  return s;
}

LossComponents compute_loss(const HomeEncoder& encoder, const ParamStore& params, const TrainConfig& config,
                            const StepSample& sample, Gradients* grads) {
  const auto& lc = config.loss;
  const auto& g = encoder.graph();
  ad::Tape tape;
  Bindings b(tape, params, grads != nullptr);
  Rng drop(sample.dropout_seed);
  const ForwardOptions opt{true, &drop};
  LossComponents out;
  std::vector<std::pair<double, Var>> terms;

  if (lc.lambda_ss > 0.0 || lc.lambda_rr > 0.0) {
    const auto o1 = encoder.forward(b, sample.view1.edges, sample.view1.masks, opt);
    const auto o2 = encoder.forward(b, sample.view2.edges, sample.view2.masks, opt);
    if (lc.lambda_ss > 0.0) {
      Var l = intra_entity_loss(project(b, o1.h_S), project(b, o2.h_S), lc.tau);
      out.ss = l.scalar();
      terms.emplace_back(lc.lambda_ss, l);
    }
    if (lc.lambda_rr > 0.0) {
      Var l = intra_entity_loss(project(b, o1.h_R), project(b, o2.h_R), lc.tau);
      out.rr = l.scalar();
      terms.emplace_back(lc.lambda_rr, l);
    }
  }
  if (lc.lambda_sr > 0.0 || lc.lambda_c > 0.0) {
    const EdgeView full = full_view(g);
    const auto o = encoder.forward(b, full, {}, opt);
    if (lc.lambda_sr > 0.0) {
      Var l = segment_parcel_loss(o.h_S, o.h_R, g.assignment, b("ssl.W_D"), sample.negative_parcels);
      out.sr = l.scalar();
      terms.emplace_back(lc.lambda_sr, l);
    }
    if (lc.lambda_c > 0.0) {
      auto [fake_S, fake_R] = encoder.encode_permuted(b, sample.permutation, {}, opt);
      if (lc.fake_through_hgt) {
        for (int l = 0; l < encoder.config().layers(); ++l) {
          std::tie(fake_S, fake_R) = encoder.hgt_layer(b, l, fake_S, fake_R, full, opt);
        }
      }
      Var l = city_loss(o.h_R, fake_R, b("ssl.W_C"));
      out.c = l.scalar();
      terms.emplace_back(lc.lambda_c, l);
    }
  }
  const std::pair<const char*, double> named[] = {{"L_SS", out.ss}, {"L_RR", out.rr}, {"L_SR", out.sr}, {"L_C", out.c}};
  for (const auto& [name, v] : named) {
    if (!std::isfinite(v)) throw NumericError(std::string("non-finite loss component ") + name);
  }
  out.total = total_loss(out, lc);
  if (!std::isfinite(out.total)) throw NumericError("non-finite total loss");

  if (grads) {
    if (terms.empty()) {
      *grads = b.gradients();
    } else {
      Var total = ad::scale(terms[0].second, terms[0].first);
      for (std::size_t k = 1; k < terms.size(); ++k) total = ad::add(total, ad::scale(terms[k].second, terms[k].first));
      tape.backward(total);
      *grads = b.gradients();
    }
  }
  return out;
}

Checkpoint init_checkpoint(const HomeGraph& graph, const TrainConfig& config) {
  validate(config);
  Checkpoint c;
  c.config = config;
  HomeEncoder encoder(graph, config.encoder);
  Rng seeds(config.seed);
  c.params = init_model_params(encoder, seeds.derive_seed());
  Rng stream(seeds.derive_seed());
  c.rng_state = stream.state();
  c.graph_hash = home_graph_content_hash(graph);
  return c;
}

void train_until(Checkpoint& ckpt, const HomeEncoder& encoder, int until_epoch, const EpochCallback& on_epoch) {
  Rng rng;
  rng.set_state(ckpt.rng_state);
  const AdamConfig adam{ckpt.config.learning_rate};
  while (ckpt.epoch < until_epoch) {
    const auto sample = sample_step(encoder, ckpt.params, ckpt.config, rng);
    Gradients grads;
    LossComponents comps;
    try {
      comps = compute_loss(encoder, ckpt.params, ckpt.config, sample, &grads);
    } catch (const NumericError& e) {
      throw NumericError(std::string(e.what()) + " at epoch " + std::to_string(ckpt.epoch + 1));
    }
    adam_step(ckpt.params, grads, ckpt.adam, adam);
    ckpt.history.push_back(comps);
    ckpt.epoch += 1;
    ckpt.rng_state = rng.state();
    if (on_epoch) on_epoch(ckpt);
  }
}

Checkpoint pretrain(const HomeGraph& graph, const TrainConfig& config, const EpochCallback& on_epoch) {
  Checkpoint ckpt = init_checkpoint(graph, config);
  HomeEncoder encoder(graph, config.encoder);
  train_until(ckpt, encoder, config.epochs, on_epoch);
  return ckpt;
}

EmbeddingTable export_embeddings(const Checkpoint& ckpt, const HomeGraph& graph) {
  if (!ckpt.graph_hash.empty() && ckpt.graph_hash != home_graph_content_hash(graph)) {
    throw ValidationError("checkpoint was trained on a different graph");
  }
  HomeEncoder encoder(graph, ckpt.config.encoder);
  const ParamStore expected = init_model_params(encoder, 0);
  for (const auto& [name, m] : expected.values) {
    if (!ckpt.params.contains(name) || ckpt.params.at(name).rows() != m.rows() ||
        ckpt.params.at(name).cols() != m.cols()) {
      throw ValidationError("checkpoint does not match the encoder config: parameter " + name);
    }
  }
  return encode(encoder, ckpt.params);
}

}  // namespace homegcl
