#pragma once

#include <nlohmann/json.hpp>

namespace homegcl {

struct EncoderConfig {
  int D = 128;
  int L = 2;
  int H = 8;
  double dropout = 0.2;
  int d_f = 16;  // per raw feature embedding width
  int n_dist_buckets = 20;
  int n_angle_buckets = 36;
  int D_l = 16;
  int D_d = 16;

  // Ablation switches.
  bool use_rfe = true;         // raw feature embedding; otherwise learned id embeddings
  bool use_psa = true;         // parcel-segment shape attention
  bool use_shape_bias = true;  // distance/angle bias inside shape attention
  bool use_hgt = true;         // graph transformer layers
  bool use_sr_edges = true;    // segment-parcel messages inside the transformer

  int layers() const { return use_hgt ? L : 0; }

  friend bool operator==(const EncoderConfig&, const EncoderConfig&) = default;
};

// Throws ConfigError on out-of-range values.
void validate(const EncoderConfig& c);

nlohmann::json to_json(const EncoderConfig& c);
// Keys absent from `j` keep their defaults; unknown keys are rejected.
EncoderConfig encoder_config_from_json(const nlohmann::json& j);

}  // namespace homegcl
