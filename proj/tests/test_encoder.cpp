#include <doctest.h>

#include <map>

#include "fixtures.hpp"
#include "homegcl/autodiff/ops.hpp"
#include "homegcl/core/error.hpp"
#include "homegcl/encoder/encoder.hpp"

using namespace homegcl;
using testutil::random_mat;
using testutil::rows;

namespace {

EncoderConfig small_config(int D = 8, int H = 2) {
  EncoderConfig c;
  c.D = D;
  c.H = H;
  c.d_f = 4;
  c.D_l = 3;
  c.D_d = 3;
  return c;
}

ParamStore params_for(const HomeEncoder& enc, std::uint64_t seed) {
  ParamStore p;
  Rng rng(seed);
  enc.init_params(p, rng);
  return p;
}

// Per-group sums of an attention column.
std::map<int, double> group_sums(const Mat& att, int col, const std::vector<int>& group) {
  std::map<int, double> s;
  for (std::size_t e = 0; e < group.size(); ++e) s[group[e]] += att(static_cast<Eigen::Index>(e), col);
  return s;
}

struct HgtCase {
  HomeGraph g;
  EncoderConfig cfg;
};

// Oracle evaluation of one transformer layer over every node.
oracle::Rows hgt_reference(const HomeGraph& g, const EncoderConfig& cfg, const ParamStore& p, const EdgeView& edges,
                           const Mat& x_S, const Mat& x_R) {
  const int D = cfg.D, n_s = g.n_segments();
  oracle::Rows x = rows(x_S);
  for (const auto& r : rows(x_R)) x.push_back(r);
  static std::map<std::string, oracle::Rows> mats;
  mats.clear();
  for (const auto& name : p.names()) mats[name] = rows(p.at(name));
  std::vector<const oracle::Rows*> node_proj;
  for (int i = 0; i < static_cast<int>(x.size()); ++i) {
    node_proj.push_back(&mats[i < n_s ? "hgt.0.node.segment" : "hgt.0.node.parcel"]);
  }
  std::vector<oracle::TypedEdge> typed;
  std::vector<const oracle::Rows*> edge_proj;
  for (Relation r : kIntraRelations) {
    const int off = relation_entity(r) == EntityType::Segment ? 0 : n_s;
    for (const auto& e : edges[r].edges) {
      typed.push_back({e.src + off, e.dst + off, e.weight, std::string(relation_name(r))});
      edge_proj.push_back(&mats["hgt.0.edge." + std::string(relation_name(r))]);
    }
  }
  if (cfg.use_sr_edges) {
    for (const auto& e : g.assignment.edges) {
      typed.push_back({e.src, e.dst + n_s, e.weight, "SR"});
      edge_proj.push_back(&mats["hgt.0.edge.SR"]);
      typed.push_back({e.dst + n_s, e.src, e.weight, "SR"});
      edge_proj.push_back(&mats["hgt.0.edge.SR"]);
    }
  }
  std::vector<oracle::Rows> wq, wk, wv;
  for (int h = 0; h < cfg.H; ++h) {
    wq.push_back(rows(p.at("hgt.0.W_q").middleRows(h * D, D)));
    wk.push_back(rows(p.at("hgt.0.W_k").middleRows(h * D, D)));
    wv.push_back(rows(p.at("hgt.0.W_v").middleRows(h * D, D)));
  }
  return oracle::hgt_layer(x, node_proj, typed, edge_proj, wq, wk, wv);
}

double max_diff(const Mat& a, const oracle::Rows& b, int row_offset = 0) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      m = std::max(m, std::abs(a(i, j) - b[static_cast<std::size_t>(i + row_offset)][static_cast<std::size_t>(j)]));
    }
  }
  return m;
}

}  // namespace

TEST_CASE("raw feature encoding") {
  const auto g = testutil::city_graph(2, 2, 1);
  EncoderConfig cfg = small_config(16);
  HomeEncoder enc(g, cfg);
  ParamStore p = params_for(enc, 3);
  const auto table = encode(enc, p);
  CHECK(table.segments.rows() == g.n_segments());
  CHECK(table.segments.cols() == 16);
  CHECK(table.parcels.rows() == g.n_parcels());
  CHECK(table.parcels.cols() == 16);
  CHECK(table.segments.allFinite());

  // Identical raw rows give identical compressed rows.
  RowMatrix f(2, g.segment_features.cols());
  f.row(0) = g.segment_features.row(1);
  f.row(1) = g.segment_features.row(1);
  ad::Tape t;
  Bindings b(t, p, false);
  const Mat xt = enc.compress(b, EntityType::Segment, enc.input_embedding(b, EntityType::Segment, f), {}).value();
  CHECK(xt.row(0) == xt.row(1));

  // Out-of-vocabulary categorical code.
  RowMatrix bad = g.parcel_features.topRows(1);
  bad(0, 0) = 99;
  CHECK_THROWS_AS(enc.input_embedding(b, EntityType::Parcel, bad), ValidationError);

  // Zero output layer gives zero vectors whatever the input.
  p.at("jfe.segment.mlp2.weight").setZero();
  ad::Tape t2;
  Bindings b2(t2, p, false);
  const Mat z = enc.compress(b2, EntityType::Segment, enc.input_embedding(b2, EntityType::Segment, g.segment_features), {})
                    .value();
  CHECK(z.isZero());
}

TEST_CASE("shape attention matches the reference") {
  const auto g = testutil::city_graph(2, 2, 1);
  HomeEncoder enc(g, small_config());
  ParamStore p = params_for(enc, 4);
  Rng rng(8);
  const Mat xs = random_mat(rng, g.n_segments(), 8), xr = random_mat(rng, g.n_parcels(), 8);
  ad::Tape t;
  Bindings b(t, p, false);
  EncoderTrace trace;
  const Mat x_R = enc.shape_attention(b, t.constant(xs), t.constant(xr), {}, &trace).value();

  const auto db = enc.distance_buckets(p.buffers.at("psa.distance_bucket_edges"));
  const auto ab = enc.angle_buckets();
  std::vector<std::pair<int, int>> pairs;
  std::vector<double> bias;
  for (std::size_t e = 0; e < g.assignment.edges.size(); ++e) {
    pairs.emplace_back(g.assignment.edges[e].src, g.assignment.edges[e].dst);
    double v = 0.0;
    for (int k = 0; k < 3; ++k) {
      v += p.at("psa.dist_embedding")(db[e], k) * p.at("psa.w_l")(0, k);
      v += p.at("psa.angle_embedding")(ab[e], k) * p.at("psa.w_d")(0, k);
    }
    bias.push_back(v);
  }
  const auto ref = oracle::shape_attention(rows(xs), rows(xr), pairs, bias, rows(p.at("psa.W_A1")),
                                           rows(p.at("psa.W_A2")), rows(p.at("psa.W_A3")));
  CHECK(max_diff(x_R, ref.x_r) < 1e-12);
  for (std::size_t e = 0; e < ref.att.size(); ++e) CHECK(std::abs(trace.shape_attention(static_cast<Eigen::Index>(e), 0) - ref.att[e]) < 1e-12);
  for (const auto& [parcel, s] : group_sums(trace.shape_attention, 0, trace.shape_group)) CHECK(std::abs(s - 1.0) < 1e-6);

  // Zero output matrix leaves only the residual.
  p.at("psa.W_A3").setZero();
  ad::Tape t2;
  Bindings b2(t2, p, false);
  CHECK(enc.shape_attention(b2, t2.constant(xs), t2.constant(xr), {}).value() == xr);
}

TEST_CASE("shape attention with two segments by hand") {
  // Parcel 0 keeps two segments, parcel 1 one. D = 2 with hand-set weights.
  auto g = testutil::city_graph(2, 2, 1);
  std::vector<Edge> kept;
  std::vector<SrGeometry> geo;
  std::vector<int> count(static_cast<std::size_t>(g.n_parcels()), 0);
  for (std::size_t e = 0; e < g.assignment.edges.size(); ++e) {
    const int r = g.assignment.edges[e].dst;
    const int limit = r == 0 ? 2 : 1;
    if (count[static_cast<std::size_t>(r)] < limit) {
      ++count[static_cast<std::size_t>(r)];
      kept.push_back(g.assignment.edges[e]);
      geo.push_back(g.geometry[e]);
    }
  }
  g.assignment.edges = kept;
  g.geometry = geo;
  EncoderConfig cfg = small_config(2, 1);
  cfg.use_shape_bias = false;
  HomeEncoder enc(g, cfg);
  ParamStore p = params_for(enc, 1);
  p.at("psa.W_A1") = Mat::Identity(2, 2);
  p.at("psa.W_A2") = (Mat(2, 2) << 2, 0, 0, 1).finished();
  p.at("psa.W_A3") = Mat::Identity(2, 2);
  Mat xs = Mat::Zero(g.n_segments(), 2), xr = Mat::Zero(g.n_parcels(), 2);
  int s0 = -1, s1 = -1;
  for (const auto& e : g.assignment.edges) {
    if (e.dst != 0) continue;
    (s0 < 0 ? s0 : s1) = e.src;
  }
  xr.row(0) << 1, 0;
  xs.row(s0) << 1, 1;
  xs.row(s1) << 0, 2;
  ad::Tape t;
  Bindings b(t, p, false);
  EncoderTrace trace;
  const Mat x_R = enc.shape_attention(b, t.constant(xs), t.constant(xr), {}, &trace).value();
  // Scores (1, 0) / sqrt(2); attention e^{a} / (e^{a} + 1).
  const double a = std::exp(1.0 / std::sqrt(2.0));
  const double w0 = a / (a + 1.0), w1 = 1.0 / (a + 1.0);
  CHECK(x_R(0, 0) == doctest::Approx(1.0 + 2.0 * w0).epsilon(1e-12));
  CHECK(x_R(0, 1) == doctest::Approx(w0 + 2.0 * w1).epsilon(1e-12));
  for (std::size_t e = 0; e < trace.shape_group.size(); ++e) {
    if (trace.shape_group[e] != 0) CHECK(trace.shape_attention(static_cast<Eigen::Index>(e), 0) == 1.0);
  }
}

TEST_CASE("transformer layer matches the reference") {
  const auto g = testutil::city_graph(2, 2, 1);
  const EncoderConfig cfg = small_config(4, 3);
  HomeEncoder enc(g, cfg);
  ParamStore p = params_for(enc, 5);
  Rng rng(2);
  const Mat xs = random_mat(rng, g.n_segments(), 4), xr = random_mat(rng, g.n_parcels(), 4);
  const EdgeView edges = full_view(g);
  ad::Tape t;
  Bindings b(t, p, false);
  EncoderTrace trace;
  const auto [hs, hr] = enc.hgt_layer(b, 0, t.constant(xs), t.constant(xr), edges, {}, &trace);
  const auto ref = hgt_reference(g, cfg, p, edges, xs, xr);
  CHECK(max_diff(hs.value(), ref) < 1e-12);
  CHECK(max_diff(hr.value(), ref, g.n_segments()) < 1e-12);
  for (int h = 0; h < cfg.H; ++h) {
    for (const auto& [node, s] : group_sums(trace.hgt_attention[0], h, trace.hgt_group)) CHECK(std::abs(s - 1.0) < 1e-6);
  }

  // Zero value path leaves the node projection.
  p.at("hgt.0.W_v").setZero();
  ad::Tape t2;
  Bindings b2(t2, p, false);
  const auto [zs, zr] = enc.hgt_layer(b2, 0, t2.constant(xs), t2.constant(xr), edges, {});
  CHECK(zs.value() == Mat(xs * p.at("hgt.0.node.segment").transpose()));
  CHECK(zr.value() == Mat(xr * p.at("hgt.0.node.parcel").transpose()));
}

TEST_CASE("transformer layer without edges and with one edge") {
  const auto g = testutil::city_graph(2, 2, 1);
  EncoderConfig cfg = small_config(4, 2);
  cfg.use_sr_edges = false;
  HomeEncoder enc(g, cfg);
  ParamStore p = params_for(enc, 6);
  Rng rng(3);
  const Mat xs = random_mat(rng, g.n_segments(), 4), xr = random_mat(rng, g.n_parcels(), 4);
  EdgeView empty;
  for (Relation r : kIntraRelations) empty[r].relation = r;
  ad::Tape t;
  Bindings b(t, p, false);
  const auto [hs, hr] = enc.hgt_layer(b, 0, t.constant(xs), t.constant(xr), empty, {});
  CHECK(hs.value() == Mat(xs * p.at("hgt.0.node.segment").transpose()));
  CHECK(hr.value() == Mat(xr * p.at("hgt.0.node.parcel").transpose()));

  EdgeView one = empty;
  one[Relation::ParGeo].edges.push_back({1, 2, 0.5});
  EncoderTrace trace;
  const auto [os, orr] = enc.hgt_layer(b, 0, t.constant(xs), t.constant(xr), one, {}, &trace);
  CHECK(trace.hgt_attention[0].rows() == 1);
  for (int h = 0; h < 2; ++h) CHECK(trace.hgt_attention[0](0, h) == doctest::Approx(1.0));
  // h = mean over heads of v + f with a single neighbour.
  const Mat f = xr * p.at("hgt.0.node.parcel").transpose();
  const Mat fe = 0.5 * f.row(1) * p.at("hgt.0.edge.R_geo").transpose();
  Mat v = Mat::Zero(1, 4);
  for (int h = 0; h < 2; ++h) v += 0.5 * fe * p.at("hgt.0.W_v").middleRows(h * 4, 4).transpose();
  CHECK((orr.value().row(2) - (v + f.row(2))).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(orr.value().row(0) == f.row(0));
}

TEST_CASE("encoder forward composition") {
  const auto g = testutil::city_graph(2, 2, 1);
  EncoderConfig cfg = small_config();
  cfg.use_hgt = false;
  HomeEncoder enc(g, cfg);
  const ParamStore p = params_for(enc, 7);
  ad::Tape t;
  Bindings b(t, p, false);
  const auto out = enc.forward(b, full_view(g), {}, {});
  CHECK(out.h_S.value() == out.xt_S.value());
  CHECK(out.h_R.value() == out.x_R.value());

  HomeEncoder full(g, small_config());
  const ParamStore q = params_for(full, 7);
  const auto a = encode(full, q), c = encode(full, q);
  CHECK(a.segments == c.segments);
  CHECK(a.parcels == c.parcels);
}

TEST_CASE("segment relabeling permutes the embeddings") {
  const auto g = testutil::city_graph(3, 2, 2);
  Rng rng(11);
  const std::vector<int> perm = rng.permutation(g.n_segments());  // old id -> new id
  HomeGraph h = g;
  for (int s = 0; s < g.n_segments(); ++s) h.segment_features.row(perm[static_cast<std::size_t>(s)]) = g.segment_features.row(s);
  for (Relation r : {Relation::SegGeo, Relation::SegFun, Relation::SegMob}) {
    for (auto& e : h.relation(r).edges) {
      e.src = perm[static_cast<std::size_t>(e.src)];
      e.dst = perm[static_cast<std::size_t>(e.dst)];
    }
  }
  for (std::size_t e = 0; e < h.assignment.edges.size(); ++e) {
    h.assignment.edges[e].src = perm[static_cast<std::size_t>(h.assignment.edges[e].src)];
    h.geometry[e].segment = h.assignment.edges[e].src;
  }
  const EncoderConfig cfg = small_config();
  HomeEncoder ea(g, cfg), eb(h, cfg);
  const ParamStore p = params_for(ea, 9);
  const auto a = encode(ea, p), b = encode(eb, p);
  double worst = (a.parcels - b.parcels).cwiseAbs().maxCoeff();
  for (int s = 0; s < g.n_segments(); ++s) {
    worst = std::max(worst, (a.segments.row(s) - b.segments.row(perm[static_cast<std::size_t>(s)])).cwiseAbs().maxCoeff());
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("softmax shift invariance") {
  Rng rng(4);
  const Mat scores = random_mat(rng, 6, 1);
  const std::vector<int> group = {0, 0, 1, 1, 1, 2};
  Mat shifted = scores;
  for (int e = 2; e < 5; ++e) shifted(e, 0) += 7.5;
  ad::Tape t;
  const Mat a = ad::segment_softmax(t.constant(scores), group, 3).value();
  const Mat b = ad::segment_softmax(t.constant(shifted), group, 3).value();
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(a(5, 0) == 1.0);
}
