#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "homegcl/autodiff/ops.hpp"
#include "homegcl/ssl/augment.hpp"
#include "homegcl/ssl/losses.hpp"

using namespace homegcl;
using testutil::random_mat;
using testutil::rows;

namespace {

double eval(const std::function<ad::Var(ad::Tape&)>& f) {
  ad::Tape t;
  return f(t).scalar();
}

}  // namespace

TEST_CASE("edge removal and feature mask probabilities") {
  CHECK(edge_removal_prob(1.0, 0.3, 0.7) == 0.0);
  CHECK(edge_removal_prob(0.0, 0.3, 0.7) == doctest::Approx(0.3));
  CHECK(edge_removal_prob(0.0, 1.0, 0.7) == doctest::Approx(0.7));
  const auto p = feature_mask_probs({1.0, 0.0, 0.0}, 0.4, 0.7);
  CHECK(p[0] == 0.0);
  CHECK(p[1] == doctest::Approx(0.4));
  CHECK(feature_mask_probs({0.0}, 1.0, 0.7)[0] == doctest::Approx(0.7));
  // Monotone non-increasing in weight and bounded by p_tau.
  double prev = 1.0;
  for (double w = 0.0; w <= 1.0; w += 0.05) {
    const double q = edge_removal_prob(w, 0.9, 0.7);
    CHECK(q <= prev);
    CHECK(q >= 0.0);
    CHECK(q <= 0.7);
    prev = q;
  }
}

TEST_CASE("feature importance") {
  // Hand computation: c = (1*2 + 3*0 + 1*1, 2*2 + 0 + 1*1, 0) = (3, 5, 0).
  Mat x(3, 3);
  x << 1, -2, 0, 3, 0, 0, -1, 1, 0;
  const auto c = feature_importance(x, {2, 0, 1});
  CHECK(c[0] == doctest::Approx(0.6));
  CHECK(c[1] == doctest::Approx(1.0));
  CHECK(c[2] == 0.0);
  const auto iso = feature_importance(x, {0, 0, 0});
  for (double v : iso) CHECK(v == 1.0);
}

TEST_CASE("augmentation is deterministic and leaves SR alone") {
  const auto g = testutil::city_graph(3, 3, 2);
  const std::vector<double> cs(static_cast<std::size_t>(g.segment_features.cols()) * 16, 0.5);
  const std::vector<double> cr(static_cast<std::size_t>(g.parcel_features.cols()) * 16, 0.2);
  const auto a = augment(g, cs, cr, {0.3, 0.4}, 0.7, 9);
  const auto b = augment(g, cs, cr, {0.3, 0.4}, 0.7, 9);
  CHECK(a.removed == b.removed);
  CHECK(a.masks.segment == b.masks.segment);
  const auto none = augment(g, cs, cr, {0.0, 0.0}, 0.7, 3);
  for (Relation r : kIntraRelations) CHECK(none.edges[r].edges == g.relation(r).edges);
  CHECK(none.masks.segment.minCoeff() == 1.0);
  CHECK(none.masks.parcel.minCoeff() == 1.0);
}

TEST_CASE("augmentation frequencies match the removal and mask probabilities") {
  const auto g = testutil::city_graph(2, 2, 4);
  const int in_s = static_cast<int>(g.segment_features.cols()) * 16;
  const int in_r = static_cast<int>(g.parcel_features.cols()) * 16;
  std::vector<double> cs(static_cast<std::size_t>(in_s)), cr(static_cast<std::size_t>(in_r));
  for (std::size_t k = 0; k < cs.size(); ++k) cs[k] = static_cast<double>(k % 5) / 4.0;
  for (std::size_t k = 0; k < cr.size(); ++k) cr[k] = static_cast<double>(k % 3) / 2.0;
  // p_e = p_n = 1 makes the p_tau truncation active for low weights.
  for (const ViewProbs probs : {ViewProbs{0.3, 0.4}, ViewProbs{1.0, 1.0}}) {
    const int draws = 10000;
    std::array<std::vector<double>, 6> removed;
    for (Relation r : kIntraRelations) removed[static_cast<std::size_t>(relation_index(r))].assign(g.relation(r).edges.size(), 0.0);
    std::vector<double> mask_s(cs.size(), 0.0);
    for (int d = 0; d < draws; ++d) {
      const auto v = augment(g, cs, cr, probs, 0.7, 1000 + static_cast<std::uint64_t>(d));
      for (std::size_t r = 0; r < 6; ++r) {
        for (std::size_t e = 0; e < v.removed[r].size(); ++e) removed[r][e] += v.removed[r][e];
      }
      for (std::size_t k = 0; k < cs.size(); ++k) mask_s[k] += 1.0 - v.masks.segment(0, static_cast<Eigen::Index>(k));
    }
    for (Relation r : kIntraRelations) {
      const auto expected = edge_removal_probs(g.relation(r), probs.p_e, 0.7);
      for (std::size_t e = 0; e < expected.size(); ++e) {
        CHECK(std::abs(removed[static_cast<std::size_t>(relation_index(r))][e] / draws - expected[e]) < 0.02);
      }
    }
    const auto expected = feature_mask_probs(cs, probs.p_n, 0.7);
    for (std::size_t k = 0; k < cs.size(); ++k) CHECK(std::abs(mask_s[k] / draws - expected[k]) < 0.02);
  }
}

TEST_CASE("projection head") {
  ParamStore p;
  p.values["ssl.proj.w_1"] = (Mat(2, 2) << 1.0, -2.0, 0.5, 1.0).finished();
  p.values["ssl.proj.w_2"] = (Mat(2, 2) << 1.0, 0.0, 3.0, -1.0).finished();
  ad::Tape t;
  Bindings b(t, p, false);
  const Mat h = (Mat(1, 2) << 1.0, -1.0).finished();
  const Mat q = project(b, t.constant(h)).value();
  // Hidden pre-activation h w_1 = (0.5, -3); ELU gives (0.5, e^-3 - 1).
  const double e = std::exp(-3.0) - 1.0;
  CHECK(q(0, 0) == doctest::Approx(0.5 + 3.0 * e).epsilon(1e-12));
  CHECK(q(0, 1) == doctest::Approx(-e).epsilon(1e-12));
  const auto ref = oracle::projection({1.0, -1.0}, rows(p.values["ssl.proj.w_1"]), rows(p.values["ssl.proj.w_2"]));
  CHECK(std::abs(ref[0] - q(0, 0)) < 1e-12);
  p.values["ssl.proj.w_2"].setZero();
  ad::Tape t2;
  Bindings b2(t2, p, false);
  CHECK(project(b2, t2.constant(h)).value().isZero());
}

TEST_CASE("NT-Xent matches the naive reference") {
  Rng rng(3);
  for (int n : {1, 2, 8}) {
    const Mat q1 = random_mat(rng, n, 5), q2 = random_mat(rng, n, 5);
    const double lib = eval([&](ad::Tape& t) { return intra_entity_loss(t.constant(q1), t.constant(q2), 0.4); });
    if (n == 1) {
      CHECK(std::abs(lib) < 1e-12);
    } else {
      CHECK(std::abs(lib - oracle::nt_xent(rows(q1), rows(q2), 0.4)) < 1e-9);
    }
    const double scaled = eval([&](ad::Tape& t) {
      return intra_entity_loss(t.constant(q1 * 3.5), t.constant(q2 * 3.5), 0.4);
    });
    CHECK(std::abs(scaled - lib) < 1e-6);
  }
  // Two orthogonal entities, identical views, tau = 1: -log(e / (e + 2)).
  const Mat q = Mat::Identity(2, 2);
  const double v = eval([&](ad::Tape& t) { return intra_entity_loss(t.constant(q), t.constant(q), 1.0); });
  CHECK(v == doctest::Approx(-std::log(std::exp(1.0) / (std::exp(1.0) + 2.0))).epsilon(1e-12));
}

TEST_CASE("segment-parcel loss matches the naive reference") {
  Rng rng(5);
  const std::vector<int> parcel_of = {0, 0, 1, 2, 2, 2, 1};
  WeightedEdgeList a{Relation::SR, {}};
  for (std::size_t s = 0; s < parcel_of.size(); ++s) a.edges.push_back({static_cast<int>(s), parcel_of[s], 1.0});
  const Mat hs = random_mat(rng, 7, 4), hr = random_mat(rng, 3, 4), w = random_mat(rng, 4, 4);
  const std::vector<int> negative = {2, 0, 1};
  const double lib = eval([&](ad::Tape& t) {
    return segment_parcel_loss(t.constant(hs), t.constant(hr), a, t.constant(w), negative);
  });
  CHECK(std::abs(lib - oracle::segment_parcel(rows(hs), rows(hr), parcel_of, rows(w), negative)) < 1e-9);
  const double zero = eval([&](ad::Tape& t) {
    return segment_parcel_loss(t.constant(hs), t.constant(hr), a, t.constant(Mat::Zero(4, 4)), negative);
  });
  CHECK(zero == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
  // Large separated scores drive the loss towards zero.
  const Mat big = Mat::Identity(4, 4) * 50.0;
  const Mat hs2 = (Mat(2, 4) << 1, 0, 0, 0, -1, 0, 0, 0).finished();
  const Mat hr2 = (Mat(2, 4) << 1, 0, 0, 0, -1, 0, 0, 0).finished();
  WeightedEdgeList a2{Relation::SR, {{0, 0, 1.0}, {1, 1, 1.0}}};
  const double lim = eval([&](ad::Tape& t) {
    return segment_parcel_loss(t.constant(hs2), t.constant(hr2), a2, t.constant(big), {1, 0});
  });
  CHECK(lim < 1e-9);
  // Single parcel: the negative term is dropped.
  WeightedEdgeList a3{Relation::SR, {{0, 0, 1.0}}};
  const double single = eval([&](ad::Tape& t) {
    return segment_parcel_loss(t.constant(hs.topRows(1)), t.constant(hr.topRows(1)), a3, t.constant(Mat::Zero(4, 4)), {-1});
  });
  CHECK(single == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  Rng r2(1);
  const auto neg = sample_negative_parcels(5, r2);
  for (int i = 0; i < 5; ++i) CHECK(neg[static_cast<std::size_t>(i)] != i);
  CHECK(sample_negative_parcels(1, r2)[0] == -1);
}

TEST_CASE("city loss matches the naive reference") {
  Rng rng(6);
  const Mat hr = random_mat(rng, 3, 4), hf = random_mat(rng, 3, 4), w = random_mat(rng, 4, 4);
  const double lib = eval([&](ad::Tape& t) { return city_loss(t.constant(hr), t.constant(hf), t.constant(w)); });
  CHECK(std::abs(lib - oracle::city(rows(hr), rows(hf), rows(w))) < 1e-9);
  const double zero =
      eval([&](ad::Tape& t) { return city_loss(t.constant(hr), t.constant(hf), t.constant(Mat::Zero(4, 4))); });
  CHECK(zero == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
  CHECK(lib >= 0.0);
  // One parcel: the city vector is that parcel.
  const Mat one = hr.topRows(1);
  const double single = eval([&](ad::Tape& t) { return city_loss(t.constant(one), t.constant(hf.topRows(1)), t.constant(w)); });
  CHECK(std::abs(single - oracle::city(rows(one), rows(hf.topRows(1)), rows(w))) < 1e-12);
}

TEST_CASE("corruption permutes rows") {
  RowMatrix f(5, 2);
  f << 1, 2, 3, 4, 5, 6, 7, 8, 9, 10;
  const RowMatrix c = corrupt_segment_features(f, 4);
  CHECK(c == corrupt_segment_features(f, 4));
  CHECK(c.sum() == f.sum());
  std::vector<double> a(c.col(0).begin(), c.col(0).end()), b(f.col(0).begin(), f.col(0).end());
  std::sort(a.begin(), a.end());
  CHECK(a == b);
  RowMatrix one(1, 2);
  one << 3, 4;
  CHECK(corrupt_segment_features(one, 1) == one);
}

TEST_CASE("total loss weighting") {
  const LossComponents parts{4, 8, 12, 16, 0};
  CHECK(total_loss(parts, LossConfig{}) == doctest::Approx(10.0));
  CHECK(total_loss(parts, LossConfig{0, 0, 0, 0, 0.4, false}) == 0.0);
  CHECK(total_loss(parts, LossConfig{1, 0, 0, 0, 0.4, false}) == 4.0);
}
