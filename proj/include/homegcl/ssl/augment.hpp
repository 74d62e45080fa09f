#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "homegcl/encoder/encoder.hpp"

namespace homegcl {

struct ViewProbs {
  double p_e = 0.3;  // edge removal scale
  double p_n = 0.4;  // feature masking scale

  friend bool operator==(const ViewProbs&, const ViewProbs&) = default;
};

struct AugmentationConfig {
  double p_tau = 0.7;
  ViewProbs view1{0.3, 0.4};
  ViewProbs view2{0.4, 0.3};

  friend bool operator==(const AugmentationConfig&, const AugmentationConfig&) = default;
};

void validate(const AugmentationConfig& c);
nlohmann::json to_json(const AugmentationConfig& c);
AugmentationConfig augmentation_config_from_json(const nlohmann::json& j);

// min((1 - w) * p_e, p_tau)
double edge_removal_prob(double weight, double p_e, double p_tau);
std::vector<double> edge_removal_probs(const WeightedEdgeList& edges, double p_e, double p_tau);

// c_k = sum_i |x_ik| * degree_i, min-max normalized; all-equal gives ones.
std::vector<double> feature_importance(const Mat& x, const std::vector<int>& degree);

// min((1 - c_k) * p_n, p_tau)
std::vector<double> feature_mask_probs(const std::vector<double>& c, double p_n, double p_tau);

struct AugmentedView {
  EdgeView edges;
  FeatureMasks masks;  // 1 = kept, 0 = masked
  std::uint64_t seed = 0;
  std::array<std::vector<bool>, 6> removed;  // per source edge, by relation_index
};

// Independent Bernoulli edge removal on the six intra-entity relations and
// per-dimension masking with the given importances. SR is never touched.
AugmentedView augment(const HomeGraph& g, const std::vector<double>& importance_S,
                      const std::vector<double>& importance_R, const ViewProbs& probs, double p_tau,
                      std::uint64_t seed);

}  // namespace homegcl
