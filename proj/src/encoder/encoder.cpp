#include "homegcl/encoder/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "homegcl/core/error.hpp"

namespace homegcl {

using ad::Var;

const char* type_token(EntityType t) { return t == EntityType::Segment ? "segment" : "parcel"; }

EdgeView full_view(const HomeGraph& g) {
  EdgeView v;
  for (Relation r : kIntraRelations) v[r] = g.relation(r);
  return v;
}

HomeEncoder::HomeEncoder(const HomeGraph& graph, EncoderConfig config) : graph_(&graph), config_(config) {
  validate(config_);
  for (const auto& e : graph.assignment.edges) {
    sr_segment_.push_back(e.src);
    sr_parcel_.push_back(e.dst);
  }
}

const std::vector<FeatureSchema>& HomeEncoder::schema(EntityType t) const {
  return t == EntityType::Segment ? graph_->segment_schema : graph_->parcel_schema;
}

int HomeEncoder::input_dim(EntityType t) const {
  if (!config_.use_rfe) return config_.D;
  return static_cast<int>(schema(t).size()) * config_.d_f;
}

void HomeEncoder::init_params(ParamStore& store, Rng& rng) const {
  const int D = config_.D;
  const double inv_d = 1.0 / std::sqrt(static_cast<double>(D));
  for (EntityType t : {EntityType::Segment, EntityType::Parcel}) {
    const std::string p = std::string("jfe.") + type_token(t) + ".";
    if (config_.use_rfe) {
      const auto& s = schema(t);
      for (std::size_t k = 0; k < s.size(); ++k) {
        const std::string f = p + "feat" + std::to_string(k);
        if (s[k].kind == FeatureKind::Categorical) {
          store.add_uniform(f + ".table", s[k].cardinality, config_.d_f, 1.0, rng);
        } else {
          store.add_uniform(f + ".vector", 1, config_.d_f, 1.0, rng);
        }
      }
    } else {
      store.add_uniform(p + "id_embedding", graph_->n_nodes(t), D, 1.0, rng);
    }
    const int in = input_dim(t);
    store.add_uniform(p + "mlp1.weight", D, in, 1.0 / std::sqrt(static_cast<double>(in)), rng);
    store.add_zeros(p + "mlp1.bias", 1, D);
    store.add_uniform(p + "mlp2.weight", D, D, inv_d, rng);
    store.add_zeros(p + "mlp2.bias", 1, D);
  }
  if (config_.use_psa) {
    store.add_uniform("psa.W_A1", D, D, inv_d, rng);
    store.add_uniform("psa.W_A2", D, D, inv_d, rng);
    store.add_uniform("psa.W_A3", D, D, inv_d, rng);
    if (config_.use_shape_bias) {
      store.add_uniform("psa.w_l", 1, config_.D_l, 1.0 / std::sqrt(static_cast<double>(config_.D_l)), rng);
      store.add_uniform("psa.w_d", 1, config_.D_d, 1.0 / std::sqrt(static_cast<double>(config_.D_d)), rng);
      store.add_uniform("psa.dist_embedding", config_.n_dist_buckets, config_.D_l, 1.0, rng);
      store.add_uniform("psa.angle_embedding", config_.n_angle_buckets, config_.D_d, 1.0, rng);
      // Interior quantile boundaries of the SR distances.
      std::vector<double> d;
      for (const auto& g : graph_->geometry) d.push_back(g.distance_m);
      std::sort(d.begin(), d.end());
      Mat edges(1, config_.n_dist_buckets - 1);
      for (int k = 1; k < config_.n_dist_buckets; ++k) {
        if (d.empty()) {
          edges(0, k - 1) = 0.0;
          continue;
        }
        const double pos = static_cast<double>(k) / config_.n_dist_buckets * static_cast<double>(d.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, d.size() - 1);
        edges(0, k - 1) = d[lo] + (pos - static_cast<double>(lo)) * (d[hi] - d[lo]);
      }
      store.buffers["psa.distance_bucket_edges"] = edges;
    }
  }
  for (int l = 0; l < config_.layers(); ++l) {
    const std::string p = "hgt." + std::to_string(l) + ".";
    store.add_uniform(p + "node.segment", D, D, inv_d, rng);
    store.add_uniform(p + "node.parcel", D, D, inv_d, rng);
    for (Relation r : kAllRelations) {
      if (r == Relation::SR && !config_.use_sr_edges) continue;
      store.add_uniform(p + "edge." + std::string(relation_name(r)), D, D, inv_d, rng);
    }
    store.add_uniform(p + "W_q", config_.H * D, D, inv_d, rng);
    store.add_uniform(p + "W_k", config_.H * D, D, inv_d, rng);
    store.add_uniform(p + "W_v", config_.H * D, D, inv_d, rng);
  }
}

Var HomeEncoder::dropout(Var x, const ForwardOptions& opt) const {
  const double p = config_.dropout;
  if (!opt.training || p <= 0.0) return x;
  if (opt.dropout_rng == nullptr) throw Error("training forward needs a dropout rng");
  Mat mask(x.rows(), x.cols());
  const double keep = 1.0 / (1.0 - p);
  for (Eigen::Index i = 0; i < mask.size(); ++i) mask.data()[i] = opt.dropout_rng->bernoulli(p) ? 0.0 : keep;
  return ad::mul_const(x, mask);
}

Var HomeEncoder::input_embedding(Bindings& b, EntityType t, const RowMatrix& features) const {
  const std::string p = std::string("jfe.") + type_token(t) + ".";
  if (!config_.use_rfe) {
    Var ids = b(p + "id_embedding");
    if (features.rows() == ids.rows()) return ids;
    throw ValidationError("feature matrix does not match the id embedding table");
  }
  const auto& s = schema(t);
  if (features.cols() != static_cast<Eigen::Index>(s.size())) throw ValidationError("feature matrix width mismatch");
  std::vector<Var> parts;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const std::string f = p + "feat" + std::to_string(k);
    const auto col = features.col(static_cast<Eigen::Index>(k));
    if (s[k].kind == FeatureKind::Categorical) {
      ad::Index codes(static_cast<std::size_t>(features.rows()));
      for (Eigen::Index i = 0; i < features.rows(); ++i) {
        const double v = col(i);
        const auto c = static_cast<long long>(v);
        if (static_cast<double>(c) != v || c < 0 || c >= s[k].cardinality) {
          throw ValidationError("feature " + s[k].name + " value " + std::to_string(v) + " is outside its vocabulary");
        }
        codes[static_cast<std::size_t>(i)] = static_cast<int>(c);
      }
      parts.push_back(ad::gather_rows(b(f + ".table"), codes));
    } else {
      const double sd = s[k].stddev > 0.0 ? s[k].stddev : 1.0;
      Mat z = ((col.array() - s[k].mean) / sd).matrix();
      parts.push_back(ad::matmul(b.tape().constant(std::move(z)), b(f + ".vector")));
    }
  }
  return ad::concat_cols(parts);
}

Var HomeEncoder::compress(Bindings& b, EntityType t, Var x0, const ForwardOptions& opt) const {
  const std::string p = std::string("jfe.") + type_token(t) + ".";
  Var h = ad::relu(ad::add_row(ad::matmul_nt(x0, b(p + "mlp1.weight")), b(p + "mlp1.bias")));
  h = dropout(h, opt);
  return ad::add_row(ad::matmul_nt(h, b(p + "mlp2.weight")), b(p + "mlp2.bias"));
}

std::vector<int> HomeEncoder::distance_buckets(const Mat& boundaries) const {
  std::vector<int> out;
  const auto* begin = boundaries.data();
  const auto* end = begin + boundaries.size();
  for (const auto& g : graph_->geometry) out.push_back(static_cast<int>(std::upper_bound(begin, end, g.distance_m) - begin));
  return out;
}

std::vector<int> HomeEncoder::angle_buckets() const {
  std::vector<int> out;
  const double width = 2.0 * std::numbers::pi / config_.n_angle_buckets;
  for (const auto& g : graph_->geometry) {
    out.push_back(std::clamp(static_cast<int>(std::floor(g.angle_rad / width)), 0, config_.n_angle_buckets - 1));
  }
  return out;
}

Var HomeEncoder::shape_attention(Bindings& b, Var xt_S, Var xt_R, const ForwardOptions& opt,
                                 EncoderTrace* trace) const {
  if (!config_.use_psa || sr_segment_.empty()) return xt_R;
  const double inv = 1.0 / std::sqrt(static_cast<double>(config_.D));
  const int n_r = graph_->n_parcels();
  // x_r^T W_A1 x_s per assignment edge.
  Var left = ad::gather_rows(ad::matmul(xt_R, b("psa.W_A1")), sr_parcel_);
  Var score = ad::row_dot(left, ad::gather_rows(xt_S, sr_segment_));
  if (config_.use_shape_bias) {
    Var l = ad::gather_rows(b("psa.dist_embedding"), distance_buckets(b.buffer("psa.distance_bucket_edges")));
    Var d = ad::gather_rows(b("psa.angle_embedding"), angle_buckets());
    score = ad::add(score, ad::add(ad::matmul_nt(l, b("psa.w_l")), ad::matmul_nt(d, b("psa.w_d"))));
  }
  Var att = ad::segment_softmax(ad::scale(score, inv), sr_parcel_, n_r);
  if (trace) {
    trace->shape_attention = att.value();
    trace->shape_group = sr_parcel_;
  }
  att = dropout(att, opt);
  const std::vector<double> ones(sr_segment_.size(), 1.0);
  Var msg = ad::matmul_nt(xt_S, b("psa.W_A2"));
  Var a = ad::edge_aggregate(att, msg, sr_parcel_, sr_segment_, ones, 1, n_r);
  return ad::add(ad::matmul_nt(a, b("psa.W_A3")), xt_R);
}

std::pair<Var, Var> HomeEncoder::hgt_layer(Bindings& b, int layer, Var x_S, Var x_R, const EdgeView& edges,
                                           const ForwardOptions& opt, EncoderTrace* trace) const {
  const std::string p = "hgt." + std::to_string(layer) + ".";
  const int n_s = graph_->n_segments();
  const int n_r = graph_->n_parcels();
  const int H = config_.H;
  Var f_S = ad::matmul_nt(x_S, b(p + "node.segment"));
  Var f_R = ad::matmul_nt(x_R, b(p + "node.parcel"));
  Var f = ad::concat_rows({f_S, f_R});

  // Source blocks: one projected copy of the source type per relation
  // direction; edges address rows of the stacked blocks.
  std::vector<Var> blocks;
  ad::Index dst, src;
  std::vector<double> w;
  int rows = 0;
  auto offset = [&](EntityType t) { return t == EntityType::Segment ? 0 : n_s; };
  auto add_block = [&](const std::string& rel, EntityType src_type, EntityType dst_type, const std::vector<Edge>& list,
                       bool reverse) {
    if (list.empty()) return;
    const Var& source = src_type == EntityType::Segment ? f_S : f_R;
    blocks.push_back(ad::matmul_nt(source, b(p + "edge." + rel)));
    for (const auto& e : list) {
      src.push_back(rows + (reverse ? e.dst : e.src));
      dst.push_back(offset(dst_type) + (reverse ? e.src : e.dst));
      w.push_back(e.weight);
    }
    rows += static_cast<int>(source.rows());
  };
  for (Relation r : kIntraRelations) {
    add_block(std::string(relation_name(r)), relation_entity(r), relation_entity(r), edges[r].edges, false);
  }
  if (config_.use_sr_edges) {
    // Segment -> parcel and the back connection parcel -> segment.
    add_block("SR", EntityType::Segment, EntityType::Parcel, graph_->assignment.edges, false);
    add_block("SR", EntityType::Parcel, EntityType::Segment, graph_->assignment.edges, true);
  }
  Var h = f;
  if (!blocks.empty()) {
    Var P = blocks.size() == 1 ? blocks[0] : ad::concat_rows(blocks);
    Var Q = ad::matmul_nt(f, b(p + "W_q"));
    Var K = ad::matmul_nt(P, b(p + "W_k"));
    Var V = ad::matmul_nt(P, b(p + "W_v"));
    const double scale = 1.0 / std::sqrt(static_cast<double>(config_.D));
    Var scores = ad::edge_head_scores(Q, K, dst, src, w, H, scale);
    Var alpha = ad::segment_softmax(scores, dst, n_s + n_r);
    if (trace) {
      trace->hgt_attention.push_back(alpha.value());
      trace->hgt_group = dst;
    }
    alpha = dropout(alpha, opt);
    Var agg = ad::edge_aggregate(alpha, V, dst, src, w, H, n_s + n_r);
    h = ad::add(ad::head_mean(agg, H), f);
  } else if (trace) {
    trace->hgt_attention.push_back(Mat(0, H));
    trace->hgt_group.clear();
  }
  return {ad::slice_rows(h, 0, n_s), ad::slice_rows(h, n_s, n_r)};
}

EncoderOutput HomeEncoder::forward(Bindings& b, const EdgeView& edges, const FeatureMasks& masks,
                                   const ForwardOptions& opt, EncoderTrace* trace) const {
  EncoderOutput out;
  out.x0_S = input_embedding(b, EntityType::Segment, graph_->segment_features);
  out.x0_R = input_embedding(b, EntityType::Parcel, graph_->parcel_features);
  if (masks.segment.size()) out.x0_S = ad::mul_row_const(out.x0_S, masks.segment);
  if (masks.parcel.size()) out.x0_R = ad::mul_row_const(out.x0_R, masks.parcel);
  out.xt_S = compress(b, EntityType::Segment, out.x0_S, opt);
  out.xt_R = compress(b, EntityType::Parcel, out.x0_R, opt);
  out.x_R = shape_attention(b, out.xt_S, out.xt_R, opt, trace);
  Var s = out.xt_S, r = out.x_R;
  for (int l = 0; l < config_.layers(); ++l) std::tie(s, r) = hgt_layer(b, l, s, r, edges, opt, trace);
  out.h_S = s;
  out.h_R = r;
  return out;
}

std::pair<Var, Var> HomeEncoder::encode_permuted(Bindings& b, const std::vector<int>& perm, const FeatureMasks& masks,
                                                 const ForwardOptions& opt) const {
  if (static_cast<int>(perm.size()) != graph_->n_segments()) throw Error("permutation size mismatch");
  Var x0_S;
  if (config_.use_rfe) {
    RowMatrix shuffled(graph_->segment_features.rows(), graph_->segment_features.cols());
    for (std::size_t i = 0; i < perm.size(); ++i) {
      shuffled.row(static_cast<Eigen::Index>(i)) = graph_->segment_features.row(perm[i]);
    }
    x0_S = input_embedding(b, EntityType::Segment, shuffled);
  } else {
    x0_S = ad::gather_rows(input_embedding(b, EntityType::Segment, graph_->segment_features), perm);
  }
  Var x0_R = input_embedding(b, EntityType::Parcel, graph_->parcel_features);
  if (masks.segment.size()) x0_S = ad::mul_row_const(x0_S, masks.segment);
  if (masks.parcel.size()) x0_R = ad::mul_row_const(x0_R, masks.parcel);
  Var xt_S = compress(b, EntityType::Segment, x0_S, opt);
  Var xt_R = compress(b, EntityType::Parcel, x0_R, opt);
  return {xt_S, shape_attention(b, xt_S, xt_R, opt)};
}

EmbeddingTable encode(const HomeEncoder& encoder, const ParamStore& params) {
  ad::Tape tape;
  Bindings b(tape, params, false);
  const auto out = encoder.forward(b, full_view(encoder.graph()), {}, ForwardOptions{});
  return EmbeddingTable{out.h_S.value(), out.h_R.value()};
}

}  // namespace homegcl
