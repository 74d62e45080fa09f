#pragma once
// Naive loop references for the encoder and the training objectives. Inputs
// are plain nested vectors; nothing here calls into the library.

#include <cmath>
#include <string>
#include <vector>

namespace oracle {

using Rows = std::vector<std::vector<double>>;

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double cos_sim(const std::vector<double>& a, const std::vector<double>& b) {
  return dot(a, b) / (std::sqrt(dot(a, a)) * std::sqrt(dot(b, b)));
}

// y = M x for M stored row-major as Rows.
inline std::vector<double> matvec(const Rows& m, const std::vector<double>& x) {
  std::vector<double> y(m.size(), 0.0);
  for (std::size_t i = 0; i < m.size(); ++i) y[i] = dot(m[i], x);
  return y;
}

// a^T M b
inline double bilinear(const std::vector<double>& a, const Rows& m, const std::vector<double>& b) {
  return dot(a, matvec(m, b));
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline double elu(double x) { return x > 0.0 ? x : std::exp(x) - 1.0; }

// q = w2^T ELU(w1^T h)
inline std::vector<double> projection(const std::vector<double>& h, const Rows& w1, const Rows& w2) {
  const std::size_t d = w1[0].size();
  std::vector<double> hidden(d, 0.0);
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t i = 0; i < h.size(); ++i) hidden[k] += w1[i][k] * h[i];
    hidden[k] = elu(hidden[k]);
  }
  const std::size_t out_d = w2[0].size();
  std::vector<double> q(out_d, 0.0);
  for (std::size_t k = 0; k < out_d; ++k) {
    for (std::size_t i = 0; i < d; ++i) q[k] += w2[i][k] * hidden[i];
  }
  return q;
}

// One ordering of NT-Xent: anchors from a, positives from b.
inline double nt_xent_one(const Rows& a, const Rows& b, double tau) {
  double total = 0.0;
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double pos = std::exp(cos_sim(a[i], b[i]) / tau);
    double denom = 0.0;
    for (std::size_t j = 0; j < n; ++j) denom += std::exp(cos_sim(a[i], b[j]) / tau);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) denom += std::exp(cos_sim(a[i], a[j]) / tau);
    }
    total += -std::log(pos / denom);
  }
  return total / static_cast<double>(n);
}

inline double nt_xent(const Rows& q1, const Rows& q2, double tau) {
  return 0.5 * (nt_xent_one(q1, q2, tau) + nt_xent_one(q2, q1, tau));
}

// parcel_of[s] is the parcel of segment s; negative[r] the negative parcel.
inline double segment_parcel(const Rows& h_s, const Rows& h_r, const std::vector<int>& parcel_of, const Rows& w,
                             const std::vector<int>& negative) {
  double pos = 0.0, neg = 0.0;
  int n_pos = 0, n_neg = 0;
  for (std::size_t r = 0; r < h_r.size(); ++r) {
    for (std::size_t s = 0; s < h_s.size(); ++s) {
      if (parcel_of[s] == static_cast<int>(r)) {
        pos += std::log(sigmoid(bilinear(h_r[r], w, h_s[s])));
        ++n_pos;
      }
      if (negative[r] >= 0 && parcel_of[s] == negative[r]) {
        neg += std::log(1.0 - sigmoid(bilinear(h_r[r], w, h_s[s])));
        ++n_neg;
      }
    }
  }
  double l = pos / n_pos;
  if (n_neg > 0) l += neg / n_neg;
  return -l;
}

inline double city(const Rows& h_r, const Rows& h_fake, const Rows& w) {
  std::vector<double> c(h_r[0].size(), 0.0);
  for (const auto& h : h_r) {
    for (std::size_t k = 0; k < c.size(); ++k) c[k] += h[k] / static_cast<double>(h_r.size());
  }
  double real = 0.0, fake = 0.0;
  for (const auto& h : h_r) real += std::log(sigmoid(bilinear(h, w, c)));
  for (const auto& h : h_fake) fake += std::log(1.0 - sigmoid(bilinear(h, w, c)));
  return -(real / h_r.size() + fake / h_fake.size());
}

struct ShapeAttention {
  Rows x_r;
  std::vector<double> att;  // per (segment, parcel) pair in input order
};

// Pairs are (segment, parcel); bias[e] is the already-looked-up bias term.
inline ShapeAttention shape_attention(const Rows& xt_s, const Rows& xt_r,
                                      const std::vector<std::pair<int, int>>& pairs, const std::vector<double>& bias,
                                      const Rows& wa1, const Rows& wa2, const Rows& wa3) {
  const double d = static_cast<double>(xt_r[0].size());
  std::vector<double> score(pairs.size());
  for (std::size_t e = 0; e < pairs.size(); ++e) {
    score[e] = (bilinear(xt_r[pairs[e].second], wa1, xt_s[pairs[e].first]) + bias[e]) / std::sqrt(d);
  }
  ShapeAttention out;
  out.att.assign(pairs.size(), 0.0);
  out.x_r = xt_r;
  for (std::size_t r = 0; r < xt_r.size(); ++r) {
    double mx = -1e300;
    for (std::size_t e = 0; e < pairs.size(); ++e) {
      if (pairs[e].second == static_cast<int>(r)) mx = std::max(mx, score[e]);
    }
    double z = 0.0;
    for (std::size_t e = 0; e < pairs.size(); ++e) {
      if (pairs[e].second == static_cast<int>(r)) z += std::exp(score[e] - mx);
    }
    std::vector<double> a(xt_r[0].size(), 0.0);
    for (std::size_t e = 0; e < pairs.size(); ++e) {
      if (pairs[e].second != static_cast<int>(r)) continue;
      out.att[e] = std::exp(score[e] - mx) / z;
      const auto v = matvec(wa2, xt_s[pairs[e].first]);
      for (std::size_t k = 0; k < a.size(); ++k) a[k] += out.att[e] * v[k];
    }
    const auto upd = matvec(wa3, a);
    for (std::size_t k = 0; k < a.size(); ++k) out.x_r[r][k] += upd[k];
  }
  return out;
}

struct TypedEdge {
  int src = 0;
  int dst = 0;
  double weight = 1.0;
  std::string relation;
};

// One transformer layer. node_proj[i] is the node-type matrix of node i,
// edge_proj maps a relation to its matrix; wq/wk/wv hold one D x D block per head.
inline Rows hgt_layer(const Rows& x, const std::vector<const Rows*>& node_proj, const std::vector<TypedEdge>& edges,
                      const std::vector<const Rows*>& edge_proj, const std::vector<Rows>& wq,
                      const std::vector<Rows>& wk, const std::vector<Rows>& wv) {
  const std::size_t n = x.size();
  const std::size_t d = x[0].size();
  const std::size_t heads = wq.size();
  Rows f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = matvec(*node_proj[i], x[i]);
  Rows h = f;
  for (std::size_t t = 0; t < n; ++t) {
    std::vector<std::size_t> incoming;
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (edges[e].dst == static_cast<int>(t)) incoming.push_back(e);
    }
    if (incoming.empty()) continue;
    std::vector<double> mean(d, 0.0);
    for (std::size_t hd = 0; hd < heads; ++hd) {
      const auto q = matvec(wq[hd], f[t]);
      std::vector<double> score;
      std::vector<std::vector<double>> values;
      for (std::size_t e : incoming) {
        auto fe = matvec(*edge_proj[e], f[static_cast<std::size_t>(edges[e].src)]);
        for (double& v : fe) v *= edges[e].weight;
        score.push_back(dot(q, matvec(wk[hd], fe)) / std::sqrt(static_cast<double>(d)));
        values.push_back(matvec(wv[hd], fe));
      }
      double mx = -1e300, z = 0.0;
      for (double s : score) mx = std::max(mx, s);
      for (double s : score) z += std::exp(s - mx);
      for (std::size_t m = 0; m < score.size(); ++m) {
        const double a = std::exp(score[m] - mx) / z;
        for (std::size_t k = 0; k < d; ++k) mean[k] += a * values[m][k] / static_cast<double>(heads);
      }
    }
    for (std::size_t k = 0; k < d; ++k) h[t][k] += mean[k];
  }
  return h;
}

}  // namespace oracle
