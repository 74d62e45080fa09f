#include "homegcl/ssl/augment.hpp"

#include <algorithm>
#include <cmath>

#include "homegcl/core/error.hpp"

namespace homegcl {

void validate(const AugmentationConfig& c) {
  auto in01 = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!in01(c.p_tau)) throw ConfigError("augmentation.p_tau must be in [0, 1]");
  for (const auto* v : {&c.view1, &c.view2}) {
    if (!in01(v->p_e) || !in01(v->p_n)) throw ConfigError("augmentation probabilities must be in [0, 1]");
  }
}

nlohmann::json to_json(const AugmentationConfig& c) {
  return {{"p_tau", c.p_tau},
          {"view1", {{"p_e", c.view1.p_e}, {"p_n", c.view1.p_n}}},
          {"view2", {{"p_e", c.view2.p_e}, {"p_n", c.view2.p_n}}}};
}

namespace {

ViewProbs view_from_json(const nlohmann::json& j, const std::string& name, ViewProbs v) {
  if (!j.is_object()) throw ConfigError("augmentation." + name + " must be an object");
  for (const auto& [k, val] : j.items()) {
    if (k == "p_e") v.p_e = val.get<double>();
    else if (k == "p_n") v.p_n = val.get<double>();
    else throw ConfigError("unknown key augmentation." + name + "." + k);
  }
  return v;
}

}  // namespace

AugmentationConfig augmentation_config_from_json(const nlohmann::json& j) {
  AugmentationConfig c;
  if (!j.is_object()) throw ConfigError("augmentation section must be an object");
  try {
    for (const auto& [k, v] : j.items()) {
      if (k == "p_tau") c.p_tau = v.get<double>();
      else if (k == "view1") c.view1 = view_from_json(v, k, c.view1);
      else if (k == "view2") c.view2 = view_from_json(v, k, c.view2);
      else throw ConfigError("unknown key augmentation." + k);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("augmentation: ") + e.what());
  }
  validate(c);
  return c;
}

double edge_removal_prob(double weight, double p_e, double p_tau) { return std::min((1.0 - weight) * p_e, p_tau); }

std::vector<double> edge_removal_probs(const WeightedEdgeList& edges, double p_e, double p_tau) {
  std::vector<double> out;
  out.reserve(edges.size());
  for (const auto& e : edges.edges) out.push_back(edge_removal_prob(e.weight, p_e, p_tau));
  return out;
}

std::vector<double> feature_importance(const Mat& x, const std::vector<int>& degree) {
  if (static_cast<Eigen::Index>(degree.size()) != x.rows()) throw Error("feature_importance: degree size mismatch");
  std::vector<double> c(static_cast<std::size_t>(x.cols()), 0.0);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double d = degree[static_cast<std::size_t>(i)];
    if (d == 0.0) continue;
    for (Eigen::Index k = 0; k < x.cols(); ++k) c[static_cast<std::size_t>(k)] += std::abs(x(i, k)) * d;
  }
  if (c.empty()) return c;
  const auto [lo, hi] = std::minmax_element(c.begin(), c.end());
  const double a = *lo, b = *hi;
  for (double& v : c) v = b > a ? (v - a) / (b - a) : 1.0;
  return c;
}

std::vector<double> feature_mask_probs(const std::vector<double>& c, double p_n, double p_tau) {
  std::vector<double> out;
  out.reserve(c.size());
  for (double v : c) out.push_back(std::min((1.0 - v) * p_n, p_tau));
  return out;
}

AugmentedView augment(const HomeGraph& g, const std::vector<double>& importance_S,
                      const std::vector<double>& importance_R, const ViewProbs& probs, double p_tau,
                      std::uint64_t seed) {
  Rng rng(seed);
  AugmentedView view;
  view.seed = seed;
  for (Relation r : kIntraRelations) {
    const auto& src = g.relation(r);
    auto& kept = view.edges[r];
    kept.relation = r;
    auto& removed = view.removed[static_cast<std::size_t>(relation_index(r))];
    removed.assign(src.size(), false);
    for (std::size_t k = 0; k < src.edges.size(); ++k) {
      const double p = edge_removal_prob(src.edges[k].weight, probs.p_e, p_tau);
      if (p > 0.0 && rng.bernoulli(p)) {
        removed[k] = true;
      } else {
        kept.edges.push_back(src.edges[k]);
      }
    }
  }
  auto mask_for = [&](const std::vector<double>& c) {
    const auto p = feature_mask_probs(c, probs.p_n, p_tau);
    Mat m = Mat::Ones(1, static_cast<Eigen::Index>(c.size()));
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (p[k] > 0.0 && rng.bernoulli(p[k])) m(0, static_cast<Eigen::Index>(k)) = 0.0;
    }
    return m;
  };
  view.masks.segment = mask_for(importance_S);
  view.masks.parcel = mask_for(importance_R);
  return view;
}

}  // namespace homegcl
