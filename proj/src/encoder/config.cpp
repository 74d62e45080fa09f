#include "homegcl/encoder/config.hpp"

#include "homegcl/core/error.hpp"

namespace homegcl {

void validate(const EncoderConfig& c) {
  if (c.D < 1) throw ConfigError("encoder.D must be >= 1");
  if (c.L < 0) throw ConfigError("encoder.L must be >= 0");
  if (c.H < 1) throw ConfigError("encoder.H must be >= 1");
  if (!(c.dropout >= 0.0 && c.dropout < 1.0)) throw ConfigError("encoder.dropout must be in [0, 1)");
  if (c.d_f < 1) throw ConfigError("encoder.d_f must be >= 1");
  if (c.n_dist_buckets < 1 || c.n_angle_buckets < 1) throw ConfigError("encoder bucket counts must be >= 1");
  if (c.D_l < 1 || c.D_d < 1) throw ConfigError("encoder.D_l and encoder.D_d must be >= 1");
}

nlohmann::json to_json(const EncoderConfig& c) {
  return {{"D", c.D},
          {"L", c.L},
          {"H", c.H},
          {"dropout", c.dropout},
          {"d_f", c.d_f},
          {"n_dist_buckets", c.n_dist_buckets},
          {"n_angle_buckets", c.n_angle_buckets},
          {"D_l", c.D_l},
          {"D_d", c.D_d},
          {"use_rfe", c.use_rfe},
          {"use_psa", c.use_psa},
          {"use_shape_bias", c.use_shape_bias},
          {"use_hgt", c.use_hgt},
          {"use_sr_edges", c.use_sr_edges}};
}

EncoderConfig encoder_config_from_json(const nlohmann::json& j) {
  EncoderConfig c;
  if (!j.is_object()) throw ConfigError("encoder section must be an object");
  for (const auto& [k, v] : j.items()) {
    try {
      if (k == "D") c.D = v.get<int>();
      else if (k == "L") c.L = v.get<int>();
      else if (k == "H") c.H = v.get<int>();
      else if (k == "dropout") c.dropout = v.get<double>();
      else if (k == "d_f") c.d_f = v.get<int>();
      else if (k == "n_dist_buckets") c.n_dist_buckets = v.get<int>();
      else if (k == "n_angle_buckets") c.n_angle_buckets = v.get<int>();
      else if (k == "D_l") c.D_l = v.get<int>();
      else if (k == "D_d") c.D_d = v.get<int>();
      else if (k == "use_rfe") c.use_rfe = v.get<bool>();
      else if (k == "use_psa") c.use_psa = v.get<bool>();
      else if (k == "use_shape_bias") c.use_shape_bias = v.get<bool>();
      else if (k == "use_hgt") c.use_hgt = v.get<bool>();
      else if (k == "use_sr_edges") c.use_sr_edges = v.get<bool>();
      else throw ConfigError("unknown key encoder." + k);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("encoder." + k + ": " + e.what());
    }
  }
  validate(c);
  return c;
}

}  // namespace homegcl
