#include "homegcl/train/adam.hpp"

#include <cmath>

#include "homegcl/core/error.hpp"

namespace homegcl {

void adam_step(ParamStore& params, const Gradients& grads, AdamState& state, const AdamConfig& cfg) {
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(cfg.beta1, t);
  const double c2 = 1.0 - std::pow(cfg.beta2, t);
  for (auto& [name, p] : params.values) {
    const auto it = grads.find(name);
    if (it == grads.end()) throw Error("missing gradient for " + name);
    const Mat& g = it->second;
    auto& m = state.m[name];
    auto& v = state.v[name];
    if (m.size() == 0) m = Mat::Zero(p.rows(), p.cols());
    if (v.size() == 0) v = Mat::Zero(p.rows(), p.cols());
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * g.cwiseProduct(g);
    if (cfg.lr == 0.0) continue;
    p.array() -= cfg.lr * (m.array() / c1) / ((v.array() / c2).sqrt() + cfg.eps);
  }
}

}  // namespace homegcl
