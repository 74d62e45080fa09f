#pragma once

#include <array>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "homegcl/autodiff/ops.hpp"
#include "homegcl/encoder/params.hpp"
#include "homegcl/graph/home_graph.hpp"

namespace homegcl {

struct LossConfig {
  double lambda_ss = 0.25;  // segment intra-entity
  double lambda_rr = 0.25;  // parcel intra-entity
  double lambda_sr = 0.25;  // segment-parcel
  double lambda_c = 0.25;   // city
  double tau = 0.4;
  // Pass corrupted parcels through the transformer layers as well.
  bool fake_through_hgt = false;

  friend bool operator==(const LossConfig&, const LossConfig&) = default;
};

void validate(const LossConfig& c);
nlohmann::json to_json(const LossConfig& c);
LossConfig loss_config_from_json(const nlohmann::json& j);

// Projection head and discriminator weights.
void init_ssl_params(ParamStore& store, int D, Rng& rng);

// q = ELU(h w_1) w_2 with shared weights.
ad::Var project(Bindings& b, ad::Var h);

// Symmetrized NT-Xent with inter-view and intra-view negatives.
ad::Var intra_entity_loss(ad::Var q1, ad::Var q2, double tau);

// One negative parcel per parcel, uniform over the others; -1 when there is
// only one parcel.
std::vector<int> sample_negative_parcels(int n_parcels, Rng& rng);

// Discriminator loss between parcels and their assigned segments, with the
// segments of negative[r] as negatives for parcel r.
ad::Var segment_parcel_loss(ad::Var h_S, ad::Var h_R, const WeightedEdgeList& assignment, ad::Var W_D,
                            const std::vector<int>& negative);

// Row-permuted copy of the segment features.
std::vector<int> corruption_permutation(int n, Rng& rng);
RowMatrix corrupt_segment_features(const RowMatrix& features, std::uint64_t seed);

// Real parcels against the mean-pooled city vector versus corrupted parcels.
ad::Var city_loss(ad::Var h_R, ad::Var h_R_fake, ad::Var W_C);

struct LossComponents {
  double ss = 0.0;
  double rr = 0.0;
  double sr = 0.0;
  double c = 0.0;
  double total = 0.0;

  friend bool operator==(const LossComponents&, const LossComponents&) = default;
};

double total_loss(const LossComponents& parts, const LossConfig& w);

}  // namespace homegcl
