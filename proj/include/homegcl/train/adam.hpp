#pragma once

#include "homegcl/encoder/params.hpp"

namespace homegcl {

struct AdamConfig {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  long long step = 0;
  std::map<std::string, Mat> m;
  std::map<std::string, Mat> v;

  friend bool operator==(const AdamState&, const AdamState&) = default;
};

// One bias-corrected Adam update of every parameter in `params`.
void adam_step(ParamStore& params, const Gradients& grads, AdamState& state, const AdamConfig& cfg);

}  // namespace homegcl
