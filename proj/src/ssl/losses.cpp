#include "homegcl/ssl/losses.hpp"

#include <cmath>

#include "homegcl/core/error.hpp"

namespace homegcl {

using ad::Var;

void validate(const LossConfig& c) {
  for (double l : {c.lambda_ss, c.lambda_rr, c.lambda_sr, c.lambda_c}) {
    if (!(l >= 0.0) || !std::isfinite(l)) throw ConfigError("loss weights must be finite and >= 0");
  }
  if (!(c.tau > 0.0)) throw ConfigError("loss.tau must be positive");
}

nlohmann::json to_json(const LossConfig& c) {
  return {{"lambda_ss", c.lambda_ss}, {"lambda_rr", c.lambda_rr},     {"lambda_sr", c.lambda_sr},
          {"lambda_c", c.lambda_c},   {"tau", c.tau}, {"fake_through_hgt", c.fake_through_hgt}};
}

LossConfig loss_config_from_json(const nlohmann::json& j) {
  LossConfig c;
  if (!j.is_object()) throw ConfigError("loss section must be an object");
  try {
    for (const auto& [k, v] : j.items()) {
      if (k == "lambda_ss") c.lambda_ss = v.get<double>();
      else if (k == "lambda_rr") c.lambda_rr = v.get<double>();
      else if (k == "lambda_sr") c.lambda_sr = v.get<double>();
      else if (k == "lambda_c") c.lambda_c = v.get<double>();
      else if (k == "tau") c.tau = v.get<double>();
      else if (k == "fake_through_hgt") c.fake_through_hgt = v.get<bool>();
      else throw ConfigError("unknown key loss." + k);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("loss: ") + e.what());
  }
  validate(c);
  return c;
}

void init_ssl_params(ParamStore& store, int D, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(D));
  store.add_uniform("ssl.proj.w_1", D, D, bound, rng);
  store.add_uniform("ssl.proj.w_2", D, D, bound, rng);
  store.add_uniform("ssl.W_D", D, D, bound, rng);
  store.add_uniform("ssl.W_C", D, D, bound, rng);
}

Var project(Bindings& b, Var h) { return ad::matmul(ad::elu(ad::matmul(h, b("ssl.proj.w_1"))), b("ssl.proj.w_2")); }

Var intra_entity_loss(Var q1, Var q2, double tau) {
  const auto n = q1.rows();
  if (q2.rows() != n || n == 0) throw Error("intra_entity_loss: views must have the same non-zero row count");
  Var z1 = ad::l2_normalize_rows(q1);
  Var z2 = ad::l2_normalize_rows(q2);
  Var s12 = ad::scale(ad::matmul_nt(z1, z2), 1.0 / tau);
  Var s11 = ad::scale(ad::matmul_nt(z1, z1), 1.0 / tau);
  Var s22 = ad::scale(ad::matmul_nt(z2, z2), 1.0 / tau);
  Var s21 = ad::transpose(s12);
  // Columns [0, n): the other view; [n, 2n): the same view without i itself.
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> mask(n, 2 * n);
  mask.setConstant(true);
  for (Eigen::Index i = 0; i < n; ++i) mask(i, n + i) = false;
  auto one_side = [&](Var cross, Var same) {
    Var lse = ad::logsumexp_rows_masked(ad::concat_cols({cross, same}), mask);
    return ad::mean(ad::sub(lse, ad::diag(cross)));
  };
  return ad::scale(ad::add(one_side(s12, s11), one_side(s21, s22)), 0.5);
}

std::vector<int> sample_negative_parcels(int n_parcels, Rng& rng) {
  std::vector<int> out(static_cast<std::size_t>(n_parcels), -1);
  if (n_parcels < 2) return out;
  for (int r = 0; r < n_parcels; ++r) {
    const int k = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_parcels - 1)));
    out[static_cast<std::size_t>(r)] = k < r ? k : k + 1;
  }
  return out;
}

Var segment_parcel_loss(Var h_S, Var h_R, const WeightedEdgeList& assignment, Var W_D,
                        const std::vector<int>& negative) {
  const int n_r = static_cast<int>(h_R.rows());
  std::vector<std::vector<int>> members(static_cast<std::size_t>(n_r));
  for (const auto& e : assignment.edges) members[static_cast<std::size_t>(e.dst)].push_back(e.src);
  ad::Index pos_r, pos_s, neg_r, neg_s;
  for (int r = 0; r < n_r; ++r) {
    for (int s : members[static_cast<std::size_t>(r)]) {
      pos_r.push_back(r);
      pos_s.push_back(s);
    }
    const int other = negative.empty() ? -1 : negative[static_cast<std::size_t>(r)];
    if (other < 0) continue;
    for (int s : members[static_cast<std::size_t>(other)]) {
      neg_r.push_back(r);
      neg_s.push_back(s);
    }
  }
  if (pos_r.empty()) throw Error("segment_parcel_loss: no assigned segments");
  Var left = ad::matmul(h_R, W_D);
  Var pos = ad::row_dot(ad::gather_rows(left, pos_r), ad::gather_rows(h_S, pos_s));
  Var loss = ad::neg(ad::mean(ad::log_sigmoid(pos)));
  if (!neg_r.empty()) {
    Var negs = ad::row_dot(ad::gather_rows(left, neg_r), ad::gather_rows(h_S, neg_s));
    // log(1 - sigmoid(x)) = log sigmoid(-x)
    loss = ad::sub(loss, ad::mean(ad::log_sigmoid(ad::neg(negs))));
  }
  return loss;
}

std::vector<int> corruption_permutation(int n, Rng& rng) { return rng.permutation(n); }

RowMatrix corrupt_segment_features(const RowMatrix& features, std::uint64_t seed) {
  Rng rng(seed);
  const auto perm = corruption_permutation(static_cast<int>(features.rows()), rng);
  RowMatrix out(features.rows(), features.cols());
  for (std::size_t i = 0; i < perm.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = features.row(perm[i]);
  return out;
}

Var city_loss(Var h_R, Var h_R_fake, Var W_C) {
  if (h_R.rows() == 0) throw Error("city_loss: no parcels");
  Var city = ad::mean_rows(h_R);
  Var real = ad::matmul_nt(ad::matmul(h_R, W_C), city);
  Var fake = ad::matmul_nt(ad::matmul(h_R_fake, W_C), city);
  return ad::neg(ad::add(ad::mean(ad::log_sigmoid(real)), ad::mean(ad::log_sigmoid(ad::neg(fake)))));
}

double total_loss(const LossComponents& p, const LossConfig& w) {
  return w.lambda_ss * p.ss + w.lambda_rr * p.rr + w.lambda_sr * p.sr + w.lambda_c * p.c;
}

}  // namespace homegcl
