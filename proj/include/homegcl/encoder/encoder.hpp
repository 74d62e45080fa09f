#pragma once

#include <array>
#include <optional>
#include <vector>

#include "homegcl/autodiff/ops.hpp"
#include "homegcl/encoder/config.hpp"
#include "homegcl/encoder/params.hpp"
#include "homegcl/graph/home_graph.hpp"

namespace homegcl {

// Intra-entity edges seen by one forward pass, indexed by relation_index.
// The segment-parcel relation always comes from the graph itself.
struct EdgeView {
  std::array<WeightedEdgeList, 6> intra;

  const WeightedEdgeList& operator[](Relation r) const { return intra[static_cast<std::size_t>(relation_index(r))]; }
  WeightedEdgeList& operator[](Relation r) { return intra[static_cast<std::size_t>(relation_index(r))]; }
};

EdgeView full_view(const HomeGraph& g);

// Column masks over the encoder input embedding (1 x input_dim). Empty
// matrices mean no masking.
struct FeatureMasks {
  Mat segment;
  Mat parcel;
};

struct ForwardOptions {
  bool training = false;
  Rng* dropout_rng = nullptr;
};

struct EncoderOutput {
  ad::Var x0_S, x0_R;  // input embeddings after masking
  ad::Var xt_S, xt_R;  // compressed feature vectors
  ad::Var x_R;         // parcel vectors after shape attention
  ad::Var h_S, h_R;    // final representations
};

// Attention distributions recorded during a forward pass.
struct EncoderTrace {
  Mat shape_attention;          // E_SR x 1
  std::vector<int> shape_group; // parcel per SR edge
  std::vector<Mat> hgt_attention;  // per layer, E x H
  std::vector<int> hgt_group;      // global target node per edge
};

class HomeEncoder {
 public:
  HomeEncoder(const HomeGraph& graph, EncoderConfig config);

  const EncoderConfig& config() const { return config_; }
  const HomeGraph& graph() const { return *graph_; }
  int input_dim(EntityType t) const;

  // Adds every encoder parameter and buffer to the store.
  void init_params(ParamStore& store, Rng& rng) const;

  // Per-feature embeddings concatenated (or id embeddings without RFE).
  ad::Var input_embedding(Bindings& b, EntityType t, const RowMatrix& features) const;
  // Two-layer MLP to width D.
  ad::Var compress(Bindings& b, EntityType t, ad::Var x0, const ForwardOptions& opt) const;
  // Parcel update from the assigned segments; returns the new parcel matrix.
  ad::Var shape_attention(Bindings& b, ad::Var xt_S, ad::Var xt_R, const ForwardOptions& opt,
                          EncoderTrace* trace = nullptr) const;
  // One transformer layer over all nodes; returns (segments, parcels).
  std::pair<ad::Var, ad::Var> hgt_layer(Bindings& b, int layer, ad::Var x_S, ad::Var x_R, const EdgeView& edges,
                                        const ForwardOptions& opt, EncoderTrace* trace = nullptr) const;

  EncoderOutput forward(Bindings& b, const EdgeView& edges, const FeatureMasks& masks, const ForwardOptions& opt,
                        EncoderTrace* trace = nullptr) const;

  // Compressed segment vectors and shape-attended parcel vectors when
  // segment i takes the raw features of segment perm[i].
  std::pair<ad::Var, ad::Var> encode_permuted(Bindings& b, const std::vector<int>& perm, const FeatureMasks& masks,
                                              const ForwardOptions& opt) const;

  // Bucket indices for the SR edges under the stored boundaries.
  std::vector<int> distance_buckets(const Mat& boundaries) const;
  std::vector<int> angle_buckets() const;

 private:
  ad::Var dropout(ad::Var x, const ForwardOptions& opt) const;
  const std::vector<FeatureSchema>& schema(EntityType t) const;

  const HomeGraph* graph_;
  EncoderConfig config_;
  std::vector<int> sr_segment_;
  std::vector<int> sr_parcel_;
};

// Evaluation-mode forward pass on the full graph.
struct EmbeddingTable {
  Mat segments;
  Mat parcels;
};

EmbeddingTable encode(const HomeEncoder& encoder, const ParamStore& params);

// Canonical "{type}" token used in parameter names.
const char* type_token(EntityType t);

}  // namespace homegcl
